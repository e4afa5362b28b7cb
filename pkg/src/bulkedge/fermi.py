"""Fermi points of edge-operator families: location, signs, indices, flow.

An edge family assigns to every point of a parameter manifold a half-line
operator through its block symbol, together with the residual functions
whose simultaneous zeros (inside the certificate disk) make up the Fermi
set.  Signs come from the Jacobian of the residuals in an oriented chart:
minus its determinant sign on odd-dimensional bases, plus on even ones.
Summed signs give the edge index; on circle families the same count is
recovered dynamically as spectral flow of the truncated operators.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    BoundaryDegenerateError,
    InvalidArgumentError,
    NotAFermiPointError,
    SymmetryViolationError,
    TrackingFailureError,
    UnrefinedCandidateWarning,
)
from .manifolds import Chart, Sphere, Torus
from .toeplitz import (
    BlockSymbol,
    LowEnergyWindow,
    auto_window,
    low_energy_window,
    truncate,
)

RESIDUAL_TOL = 1e-12
DEDUP_RADIUS = 1e-6
DISK_MARGIN = 1e-6
JACOBIAN_DET_TOL = 1e-8
FD_STEP = 1e-6
RICHARDSON_REL_TOL = 1e-4
MAX_NEWTON_ITER = 50
MAX_CANDIDATES = 512
ZERO_CROSSING_ATOL = 1e-6
MAX_BISECTIONS = 12


@dataclass
class FermiPoint:
    """A refined singular parameter point with its certification data."""

    chart_key: str
    chart_coords: np.ndarray
    location: np.ndarray
    residual_norm: float
    c_value: complex
    sign: int = 0
    det_jacobian: float | None = None
    jacobian: np.ndarray | None = None


@dataclass
class EdgeFamily:
    """Family of half-line operators over a parameter manifold.

    ``residual`` maps ambient points, shape (..., ambient_dim), to the
    sign-coordinate residuals, shape (..., dim); its zeros subject to
    |constraint| < 1 are the Fermi set.  ``residual_jacobian`` optionally
    supplies the analytic derivative with respect to ambient coordinates.
    """

    family_id: str
    manifold: Torus | Sphere
    parity: str  # 'odd' or 'even'
    residual: Callable[[np.ndarray], np.ndarray]
    constraint: Callable[[np.ndarray], np.ndarray]
    symbol_at: Callable[[np.ndarray], BlockSymbol]
    effective_block: Callable[[np.ndarray], np.ndarray]
    residual_jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    orientation_sign: int = +1
    reference_window: float | None = None

    def reversed(self) -> "EdgeFamily":
        out = EdgeFamily(**{**self.__dict__})
        out.orientation_sign = -self.orientation_sign
        out.family_id = self.family_id + "/reversed"
        return out


def _eroded(mask: np.ndarray) -> np.ndarray:
    """Shrink a boolean mask by one grid step in every axis direction."""
    out = mask.copy()
    padded = np.pad(mask, 1, constant_values=False)
    for axis in range(mask.ndim):
        for shift in (-1, 1):
            rolled = np.roll(padded, shift, axis=axis)
            slicer = tuple(slice(1, -1) for _ in range(mask.ndim))
            out &= rolled[slicer]
    return out


def _local_minima(values: np.ndarray, periodic: bool) -> np.ndarray:
    """Boolean mask of points not exceeding any neighbour in the 3^d cube."""
    if periodic:
        cube = values
        for axis in range(values.ndim):
            cube = np.minimum(
                np.minimum(np.roll(cube, 1, axis=axis), cube), np.roll(cube, -1, axis=axis)
            )
    else:
        padded = np.pad(values, 1, constant_values=np.inf)
        cube = padded
        for axis in range(values.ndim):
            cube = np.minimum(
                np.minimum(np.roll(cube, 1, axis=axis), cube), np.roll(cube, -1, axis=axis)
            )
        slicer = tuple(slice(1, -1) for _ in range(values.ndim))
        cube = cube[slicer]
    return values <= cube


def _batch_newton(
    family: EdgeFamily, chart: Chart, seeds: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Refine candidate chart points; returns (points, residual norms, converged)."""
    manifold = family.manifold
    u = np.array(seeds, dtype=float)
    n, d = u.shape
    active = np.ones(n, dtype=bool)
    res_norm = np.full(n, np.inf)
    for _ in range(MAX_NEWTON_ITER):
        if not np.any(active):
            break
        pts = manifold.embed(chart, u[active])
        f = family.residual(pts)
        norms = np.linalg.norm(f, axis=-1)
        res_norm[active] = norms
        done = norms < RESIDUAL_TOL
        idx_active = np.where(active)[0]
        active[idx_active[done]] = False
        still = idx_active[~done]
        if len(still) == 0:
            break
        uu = u[still]
        ff = f[~done]
        jac = np.empty((len(still), d, d))
        for col in range(d):
            step = np.zeros(d)
            step[col] = FD_STEP
            fp = family.residual(manifold.embed(chart, uu + step))
            fm = family.residual(manifold.embed(chart, uu - step))
            jac[:, :, col] = (fp - fm) / (2.0 * FD_STEP)
        delta = -np.einsum("nij,nj->ni", np.linalg.pinv(jac), ff)
        norms_d = np.linalg.norm(delta, axis=-1)
        big = norms_d > 0.5
        delta[big] *= (0.5 / norms_d[big])[:, None]
        u[still] = uu + delta
        if not manifold.periodic():
            escaped = np.linalg.norm(u[still], axis=-1) > 0.98
            active[still[escaped]] = False
            res_norm[still[escaped]] = np.inf
    return u, res_norm, res_norm < RESIDUAL_TOL


def find_fermi_points(family: EdgeFamily, scan_resolution: int = 64) -> list[FermiPoint]:
    """Locate and refine all Fermi points by grid scan plus Newton iteration.

    Candidates are local minima of the squared residual norm on each chart
    grid.  Refined points outside the unit certificate disk are discarded;
    points within 1e-6 of its boundary raise, because the family stops
    being Fredholm there.
    """
    if scan_resolution < 32:
        raise InvalidArgumentError(f"scan resolution must be at least 32, got {scan_resolution}")
    manifold = family.manifold
    found: list[FermiPoint] = []
    unconverged = 0
    for chart in manifold.charts:
        grid = manifold.chart_grid(chart, scan_resolution)
        valid = manifold.chart_valid(chart, grid)
        pts = manifold.embed(chart, grid)
        res = family.residual(pts)
        norm2 = np.sum(np.abs(res) ** 2, axis=-1)
        norm2 = np.where(valid, norm2, np.inf)
        shaped = norm2.reshape(manifold.grid_shape(scan_resolution))
        minima = _local_minima(shaped, manifold.periodic()).reshape(-1)
        minima &= np.isfinite(norm2)
        if not manifold.periodic():
            # drop minima created by the chart-boundary mask; interior zeros
            # near the edge are covered by a neighbouring chart
            core = _eroded(valid.reshape(manifold.grid_shape(scan_resolution)))
            minima &= core.reshape(-1)
        seeds = grid[minima]
        values = norm2[minima]
        if len(seeds) > MAX_CANDIDATES:
            order = np.argsort(values, kind="stable")[:MAX_CANDIDATES]
            seeds = seeds[order]
            values = values[order]
        if len(seeds) == 0:
            continue
        refined, norms, ok = _batch_newton(family, chart, seeds)
        # silent drops are fine for plateau minima far from zero; warn only
        # for candidates that looked like genuine zeros
        plausible = np.minimum(values, np.where(np.isfinite(norms), norms**2, np.inf)) < 1e-6
        unconverged += int(np.sum(~ok & plausible))
        for u, rn in zip(refined[ok], norms[ok]):
            point = manifold.canonical(manifold.embed(chart, u))
            cval = complex(np.asarray(family.constraint(point[None, ...])).reshape(-1)[0])
            if abs(cval) >= 1.0 + DISK_MARGIN:
                continue
            if abs(abs(cval) - 1.0) < DISK_MARGIN:
                raise BoundaryDegenerateError(
                    f"refined candidate at {point} has |c| = {abs(cval):.9f}; "
                    "the family degenerates on |c| = 1"
                )
            found.append(
                FermiPoint(
                    chart_key=chart.key,
                    chart_coords=np.array(u),
                    location=point,
                    residual_norm=float(rn),
                    c_value=cval,
                )
            )
    if unconverged:
        warnings.warn(
            f"{unconverged} scan candidate(s) did not converge under Newton refinement "
            "and were dropped",
            UnrefinedCandidateWarning,
            stacklevel=2,
        )
    deduped: list[FermiPoint] = []
    for fp in sorted(found, key=lambda f: tuple(np.round(f.location, 9))):
        if all(manifold.distance(fp.location, other.location) > DEDUP_RADIUS for other in deduped):
            deduped.append(fp)
    return deduped


def _chart_jacobian(family: EdgeFamily, fp: FermiPoint, method: str) -> np.ndarray:
    manifold = family.manifold
    chart = next(c for c in manifold.charts if c.key == fp.chart_key)
    u = fp.chart_coords
    if method == "analytic":
        if family.residual_jacobian is None:
            raise InvalidArgumentError("no analytic Jacobian available for this family")
        ambient_jac = family.residual_jacobian(fp.location)
        return np.asarray(ambient_jac) @ manifold.embed_jacobian(chart, u)

    def fd(step: float) -> np.ndarray:
        d = len(u)
        jac = np.empty((d, d))
        for col in range(d):
            dv = np.zeros(d)
            dv[col] = step
            fp_ = family.residual(manifold.embed(chart, (u + dv)[None, :]))[0]
            fm_ = family.residual(manifold.embed(chart, (u - dv)[None, :]))[0]
            jac[:, col] = (fp_ - fm_) / (2.0 * step)
        return jac

    jac1 = fd(FD_STEP)
    jac2 = fd(FD_STEP / 2.0)
    det1, det2 = np.linalg.det(jac1), np.linalg.det(jac2)
    scale = max(abs(det1), abs(det2), JACOBIAN_DET_TOL)
    if abs(det1 - det2) / scale > RICHARDSON_REL_TOL:
        raise NotAFermiPointError(
            f"finite-difference Jacobian determinant unstable: {det1:.6e} vs {det2:.6e}"
        )
    return jac2


def sign_at(family: EdgeFamily, fp: FermiPoint, method: str = "auto") -> FermiPoint:
    """Attach the sign of a Fermi point from its oriented-chart Jacobian.

    Odd-dimensional bases use minus the determinant sign, even-dimensional
    ones plus; a determinant below 1e-8 means no sign coordinate exists and
    is a hard error.
    """
    if method == "auto":
        method = "analytic" if family.residual_jacobian is not None else "numeric"
    jac = _chart_jacobian(family, fp, method)
    chart = next(c for c in family.manifold.charts if c.key == fp.chart_key)
    orient = family.manifold.orientation(chart, fp.chart_coords) * family.orientation_sign
    det = float(np.linalg.det(jac)) * orient
    if abs(det) < JACOBIAN_DET_TOL:
        raise NotAFermiPointError(
            f"Jacobian determinant {det:.3e} below {JACOBIAN_DET_TOL:.0e} at {fp.location}"
        )
    sign = -int(np.sign(det)) if family.parity == "odd" else int(np.sign(det))
    fp.sign = sign
    fp.det_jacobian = det
    fp.jacobian = jac
    return fp


def edge_index(
    family: EdgeFamily, scan_resolution: int = 64, method: str = "auto"
) -> tuple[int, list[FermiPoint]]:
    """Sum of Fermi-point signs over the parameter manifold."""
    points = find_fermi_points(family, scan_resolution)
    for fp in points:
        sign_at(family, fp, method=method)
    return sum(fp.sign for fp in points), points


# ---------------------------------------------------------------------------
# spectral flow


def _certified_levels(
    family: EdgeFamily, k: float, n_sites: int, mu: float
) -> np.ndarray:
    symbol = family.symbol_at(np.array([k]))
    window = low_energy_window(truncate(symbol, n_sites), mu)
    return window.certified_eigenvalues()


def _sorted_match_ambiguous(ev0: np.ndarray, ev1: np.ndarray) -> bool:
    for i in range(len(ev0)):
        motion = abs(ev1[i] - ev0[i])
        if motion == 0.0:
            continue
        others = np.abs(np.delete(ev1, i) - ev0[i])
        if len(others) and np.min(others) < 10.0 * motion:
            return True
    return False


def _crossings(ev0: np.ndarray, ev1: np.ndarray) -> int:
    total = 0
    for a, b in zip(ev0, ev1):
        sa = 1 if a >= 0.0 else -1
        sb = 1 if b >= 0.0 else -1
        if sa > 0 and sb < 0:
            total += 1
        elif sa < 0 and sb > 0:
            total -= 1
    return total


def _greedy_unpaired(ev0: np.ndarray, ev1: np.ndarray) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Match the common count of levels in sorted order; return the leftovers."""
    n = min(len(ev0), len(ev1))
    if len(ev0) == len(ev1):
        return ev0, ev1, []
    longer, shorter = (ev0, ev1) if len(ev0) > len(ev1) else (ev1, ev0)
    keep = np.ones(len(longer), dtype=bool)
    leftovers = []
    for _ in range(len(longer) - n):
        idx = np.where(keep)[0]
        cost = [np.min(np.abs(shorter - longer[i])) if len(shorter) else abs(longer[i]) for i in idx]
        drop = idx[int(np.argmax(cost))]
        keep[drop] = False
        leftovers.append(float(longer[drop]))
    trimmed = longer[keep]
    if len(ev0) > len(ev1):
        return trimmed, ev1, leftovers
    return ev0, trimmed, leftovers


def spectral_flow(
    family: EdgeFamily,
    n_sites: int = 60,
    mu: float | None = None,
    samples: int = 512,
    threads: int = 1,
) -> int:
    """Signed count of certified eigenvalue zero crossings around a circle family.

    A crossing from positive to negative in the direction of increasing
    (oriented) parameter counts +1.  Intervals where the certified window
    occupancy changes or the sorted pairing is ambiguous are bisected, up to
    twelve levels; leftover modes appearing or vanishing away from zero are
    accepted as window entry or exit.
    """
    if family.manifold.dim != 1:
        raise InvalidArgumentError("spectral flow requires a one-dimensional parameter loop")
    if mu is None:
        if family.reference_window is not None:
            mu = family.reference_window
        else:
            ks = 2.0 * np.pi * np.arange(64) / 64.0
            mu = min(auto_window(family.symbol_at(np.array([k]))) for k in ks)
    ks = 2.0 * np.pi * np.arange(samples + 1) / samples
    if family.orientation_sign < 0:
        ks = ks[::-1]

    def levels(k: float) -> np.ndarray:
        return _certified_levels(family, float(k), n_sites, mu)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            all_levels = list(pool.map(levels, ks))
    else:
        all_levels = [levels(k) for k in ks]

    def segment(k0: float, k1: float, ev0: np.ndarray, ev1: np.ndarray, depth: int) -> int:
        if len(ev0) == len(ev1) and not _sorted_match_ambiguous(ev0, ev1):
            return _crossings(ev0, ev1)
        if depth >= MAX_BISECTIONS:
            m0, m1, leftovers = _greedy_unpaired(ev0, ev1)
            if all(abs(x) > ZERO_CROSSING_ATOL for x in leftovers) and not _sorted_match_ambiguous(m0, m1):
                return _crossings(m0, m1)
            raise TrackingFailureError(
                f"could not resolve eigenvalue tracking on [{k0:.6f}, {k1:.6f}] "
                f"after {MAX_BISECTIONS} bisections"
            )
        km = 0.5 * (k0 + k1)
        evm = levels(km)
        return segment(k0, km, ev0, evm, depth + 1) + segment(km, k1, evm, ev1, depth + 1)

    total = 0
    for i in range(samples):
        total += segment(ks[i], ks[i + 1], all_levels[i], all_levels[i + 1], 0)
    return total


# ---------------------------------------------------------------------------
# time-reversal evenness


@dataclass
class EvennessReport:
    """Outcome of the time-reversal pairing checks on a three-torus family."""

    ok: bool
    ai_ok: bool
    ai_deviation: float
    pairing_ok: bool
    fixed_point_ok: bool
    signs_ok: bool
    index: int
    index_even: bool
    fermi_points: list[FermiPoint] = field(default_factory=list)
    failure: str = ""


def _symbol_ai_deviation(family: EdgeFamily, samples: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    kappas = rng.uniform(0.0, 2.0 * np.pi, size=(samples, family.manifold.dim))
    worst = 0.0
    for kappa in kappas:
        s_plus = family.symbol_at(kappa)
        s_minus = family.symbol_at(-kappa)
        degrees = set(s_plus.coeffs) | set(s_minus.coeffs)
        for m in degrees:
            zero = np.zeros((s_plus.rank, s_plus.rank), dtype=complex)
            cp = s_plus.coeffs.get(m, zero)
            cm = s_minus.coeffs.get(m, zero)
            worst = max(worst, float(np.linalg.norm(np.conj(cp) - cm, 2)))
    return worst


def check_evenness(
    family: EdgeFamily,
    scan_resolution: int = 64,
    ai_samples: int = 64,
    seed: int = 42,
) -> EvennessReport:
    """Verify the momentum-reversal structure forced by spinless time reversal.

    Checks, in order: the symbol family satisfies conj(C_m(k)) = C_m(-k); the
    Fermi points pair under k -> -k to 1e-8; none sits within 1e-6 of a
    reversal-fixed point (all coordinates in {0, pi}); paired points carry
    equal signs; and the edge index is even.
    """
    if not isinstance(family.manifold, Torus) or family.manifold.dim != 3:
        raise InvalidArgumentError("evenness check requires a three-torus family")
    ai_dev = _symbol_ai_deviation(family, ai_samples, seed)
    ai_ok = ai_dev < 1e-10
    if not ai_ok:
        return EvennessReport(
            ok=False, ai_ok=False, ai_deviation=ai_dev, pairing_ok=False,
            fixed_point_ok=False, signs_ok=False, index=0, index_even=False,
            failure=f"time-reversal symmetry violated: max symbol deviation {ai_dev:.3e}",
        )
    index, points = edge_index(family, scan_resolution)
    manifold = family.manifold

    fixed_pts = np.array(np.meshgrid(*[[0.0, np.pi]] * 3, indexing="ij")).reshape(3, -1).T
    fixed_ok = True
    pairing_ok = True
    signs_ok = True
    failure = ""
    partners: list[int] = []
    for i, fp in enumerate(points):
        if min(manifold.distance(fp.location, q) for q in fixed_pts) < 1e-6:
            fixed_ok = False
            failure = f"Fermi point at reversal-fixed momentum {fp.location}"
            break
        tau = np.mod(-fp.location, 2.0 * np.pi)
        dists = [manifold.distance(tau, other.location) for other in points]
        j = int(np.argmin(dists))
        if dists[j] > 1e-8 or j == i:
            pairing_ok = False
            failure = f"Fermi point {fp.location} has no reversal partner (best distance {dists[j]:.3e})"
            break
        partners.append(j)
        if points[j].sign != fp.sign:
            signs_ok = False
            failure = f"paired Fermi points {fp.location} and {points[j].location} carry opposite signs"
            break
    index_even = index % 2 == 0
    if not index_even and not failure:
        failure = f"edge index {index} is odd"
    ok = ai_ok and pairing_ok and fixed_ok and signs_ok and index_even
    return EvennessReport(
        ok=ok, ai_ok=ai_ok, ai_deviation=ai_dev, pairing_ok=pairing_ok,
        fixed_point_ok=fixed_ok, signs_ok=signs_ok, index=index,
        index_even=index_even, fermi_points=points, failure=failure,
    )


# ---------------------------------------------------------------------------
# local-block certification at Fermi points


def verify_bulk_edge(
    bulk,
    edge: EdgeFamily,
    grid: int | str = "auto",
    scan_resolution: int = 64,
    ai_samples: int = 2000,
    seed: int = 42,
) -> dict:
    """Bulk against edge: the second Chern number must equal minus the edge index.

    The bulk family is first checked for a spectral gap and spinless time
    reversal.  With ``grid='auto'`` the Chern number is certified by rounding
    agreement at two resolutions; an explicit integer runs a single grid.
    Returns all intermediate quantities; the verdict is never reconciled
    silently.
    """
    from .bloch import check_ai_symmetry, second_chern_number, second_chern_two_resolution

    ai_ok, ai_dev = check_ai_symmetry(bulk, samples=ai_samples, seed=seed)
    if not ai_ok:
        raise SymmetryViolationError(
            f"bulk family is not time-reversal symmetric: max deviation {ai_dev:.3e}"
        )
    if grid == "auto":
        lo, hi, agree = second_chern_two_resolution(bulk)
        if not agree:
            raise TrackingFailureError(
                f"second Chern number undecided: grid {lo.grid} rounds to {lo.rounded}, "
                f"grid {hi.grid} to {hi.rounded}"
            )
        chern = hi
        grids = [lo.grid, hi.grid]
    else:
        chern = second_chern_number(bulk, int(grid))
        grids = [int(grid)]
    index, points = edge_index(edge, scan_resolution)
    return {
        "bulk_c2": chern.rounded,
        "bulk_c2_raw": chern.raw,
        "bulk_c2_quality": chern.quality,
        "bulk_min_gap": chern.min_abs_eigenvalue,
        "grids": grids,
        "ai_deviation": ai_dev,
        "edge_index": index,
        "fermi_points": points,
        "bulk_edge_ok": chern.rounded == -index,
    }


def certify_local_block(
    family: EdgeFamily,
    fp: FermiPoint,
    n_sites: int = 60,
    stencil_step: float = 0.05,
) -> dict:
    """Check the two-level picture of the window around one Fermi point.

    On a five-point stencil around the Fermi point the certified window of the
    truncated operator must have the dimension of the effective block and
    reproduce its eigenvalues within 10 |c|^N plus 1e-8.
    """
    manifold = family.manifold
    chart = next(c for c in manifold.charts if c.key == fp.chart_key)
    u0 = fp.chart_coords
    d = len(u0)
    offsets = [np.zeros(d)]
    for axis in range(min(2, d)):
        step = np.zeros(d)
        step[axis] = stencil_step
        offsets += [step, -step]
    offsets = offsets[:5]
    tol = 10.0 * abs(fp.c_value) ** n_sites + 1e-8
    worst = 0.0
    for off in offsets:
        point = manifold.canonical(manifold.embed(chart, u0 + off))
        symbol = family.symbol_at(point)
        mu = auto_window(symbol)
        window = low_energy_window(truncate(symbol, n_sites), mu)
        block = family.effective_block(point)
        expected = np.sort(np.linalg.eigvalsh(block))
        expected = expected[np.abs(expected) < mu]
        got = np.sort(window.certified_eigenvalues())
        if len(got) != len(expected):
            return {
                "ok": False,
                "detail": f"window dimension {len(got)} != effective block count {len(expected)} at {point}",
            }
        if len(got):
            worst = max(worst, float(np.max(np.abs(got - expected))))
    return {"ok": worst <= tol, "max_deviation": worst, "tolerance": tol}
