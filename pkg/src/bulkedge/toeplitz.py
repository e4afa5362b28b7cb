"""Half-line block Toeplitz operators: symbols, truncations, low-energy windows.

The dense truncation of a half-infinite lattice operator carries an
artificial second boundary at the last site.  Eigenpairs are therefore
post-processed before certification: exactly degenerate groups and
nearly degenerate pairs are rotated to diagonalize the weight on the
first half of the chain, which cleanly separates genuine left-boundary
modes from their right-boundary mirrors, and delocalized bulk states are
rejected by a localization threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    CutoffInsufficientError,
    InvalidArgumentError,
    WindowBoundaryError,
)

COEFF_DROP_TOL = 1e-13
TAIL_TOL = 1e-10
FREDHOLM_TOL = 1e-8
BOUNDARY_TOL = 1e-9
DEFAULT_LOC_THRESHOLD = 0.9
DEFAULT_GROUP_TOL = 1e-8
DEFAULT_PAIR_TOL = 1e-2


@dataclass
class BlockSymbol:
    """Finitely supported Fourier blocks C_m of a Hermitian matrix symbol.

    Hermitian as an operator means C_{-m} = C_m^dagger for every m; the
    constructor enforces this by symmetrization.
    """

    rank: int
    coeffs: dict[int, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        sym: dict[int, np.ndarray] = {}
        for m in sorted({abs(m) for m in self.coeffs}):
            has_pos = m in self.coeffs
            has_neg = -m in self.coeffs
            if has_pos and has_neg:
                avg = 0.5 * (
                    np.asarray(self.coeffs[m], dtype=complex)
                    + np.asarray(self.coeffs[-m], dtype=complex).conj().T
                )
            elif has_pos:
                avg = np.asarray(self.coeffs[m], dtype=complex)
            else:
                avg = np.asarray(self.coeffs[-m], dtype=complex).conj().T
            if m == 0:
                avg = 0.5 * (avg + avg.conj().T)
            if np.linalg.norm(avg, 2) < COEFF_DROP_TOL:
                continue
            sym[m] = avg
            if m > 0:
                sym[-m] = avg.conj().T
        self.coeffs = sym

    @property
    def max_degree(self) -> int:
        return max((abs(m) for m in self.coeffs), default=0)

    def evaluate(self, k: np.ndarray) -> np.ndarray:
        """Symbol matrix sum_m C_m exp(i m k), vectorized over k."""
        k = np.asarray(k, dtype=float)
        out = np.zeros(k.shape + (self.rank, self.rank), dtype=complex)
        for m, cm in self.coeffs.items():
            out += np.exp(1j * m * k)[..., None, None] * cm
        return out

    def min_singular_value(self, samples: int = 256) -> float:
        k = 2.0 * np.pi * np.arange(samples) / samples
        svals = np.linalg.svd(self.evaluate(k), compute_uv=False)
        return float(np.min(svals))


def symbol_from_bulk(family, k_par: np.ndarray, fourier_cutoff: int = 4, n_quad: int = 256) -> BlockSymbol:
    """Fourier blocks of a torus family at fixed transverse momenta.

    C_m = (1/2pi) int H(k_par, k) exp(-i m k) dk, evaluated by the uniform
    quadrature rule which is exact for trigonometric polynomials of degree
    below n_quad - fourier_cutoff.
    """
    k_par = np.atleast_1d(np.asarray(k_par, dtype=float))
    if k_par.shape != (family.dim - 1,):
        raise InvalidArgumentError(
            f"expected {family.dim - 1} transverse momenta, got shape {k_par.shape}"
        )
    ks = 2.0 * np.pi * np.arange(n_quad) / n_quad
    args = [np.full(n_quad, kp) for kp in k_par] + [ks]
    h = family.eval(*args)
    coeffs: dict[int, np.ndarray] = {}
    check_to = fourier_cutoff + 3
    for m in range(-check_to, check_to + 1):
        cm = np.mean(h * np.exp(-1j * m * ks)[:, None, None], axis=0)
        norm = np.linalg.norm(cm, 2)
        if abs(m) > fourier_cutoff:
            if norm > TAIL_TOL:
                raise CutoffInsufficientError(
                    f"Fourier block at degree {m} has norm {norm:.3e} beyond the cutoff {fourier_cutoff}"
                )
            continue
        if norm >= COEFF_DROP_TOL:
            coeffs[m] = cm
    return BlockSymbol(rank=family.rank, coeffs=coeffs, metadata={"k_par": k_par.tolist()})


def fredholm_check(symbol: BlockSymbol, samples: int = 256) -> tuple[bool, float]:
    """Invertibility of the symbol on the circle, the Fredholm criterion."""
    smin = symbol.min_singular_value(samples)
    return smin > FREDHOLM_TOL, smin


@dataclass
class TruncatedToeplitz:
    """Dense N-site truncation of the half-line operator of a block symbol."""

    symbol: BlockSymbol
    n_sites: int
    matrix: np.ndarray


def truncate(symbol: BlockSymbol, n_sites: int) -> TruncatedToeplitz:
    """Dense block Toeplitz truncation; Hermitian by construction, bit for bit."""
    m_max = symbol.max_degree
    if n_sites < 8:
        raise InvalidArgumentError(f"need at least 8 sites, got {n_sites}")
    if n_sites <= m_max:
        raise InvalidArgumentError(f"{n_sites} sites cannot hold a symbol of degree {m_max}")
    r = symbol.rank
    mat = np.zeros((r * n_sites, r * n_sites), dtype=complex)
    c0 = symbol.coeffs.get(0)
    if c0 is not None:
        c0 = 0.5 * (c0 + c0.conj().T)
        for i in range(n_sites):
            mat[r * i: r * i + r, r * i: r * i + r] = c0
    for m in range(1, m_max + 1):
        cm = symbol.coeffs.get(m)
        if cm is None:
            continue
        cdag = cm.conj().T
        for i in range(m, n_sites):
            # block row i, column i-m holds C_m; the mirror block is its adjoint
            mat[r * i: r * i + r, r * (i - m): r * (i - m) + r] = cm
            mat[r * (i - m): r * (i - m) + r, r * i: r * i + r] = cdag
    return TruncatedToeplitz(symbol=symbol, n_sites=n_sites, matrix=mat)


@dataclass
class WindowPair:
    """One eigenpair of a truncation inside the spectral window."""

    eigenvalue: float
    vector: np.ndarray
    weight: float
    certified: bool


@dataclass
class LowEnergyWindow:
    """Eigenpairs with |eigenvalue| < mu, annotated with localization weights."""

    mu: float
    pairs: list[WindowPair]

    @property
    def certified(self) -> list[WindowPair]:
        return [p for p in self.pairs if p.certified]

    @property
    def spurious(self) -> list[WindowPair]:
        return [p for p in self.pairs if not p.certified]

    def certified_eigenvalues(self) -> np.ndarray:
        return np.array([p.eigenvalue for p in self.certified])


def _rotate_group(vectors: np.ndarray, half: int) -> np.ndarray:
    """Rotate a nearly degenerate group to diagonalize the first-half weight."""
    q = vectors[:half].conj().T @ vectors[:half]
    _, u = np.linalg.eigh(0.5 * (q + q.conj().T))
    return vectors @ u


def low_energy_window(
    trunc: TruncatedToeplitz,
    mu: float,
    loc_threshold: float = DEFAULT_LOC_THRESHOLD,
    group_tol: float = DEFAULT_GROUP_TOL,
    pair_tol: float = DEFAULT_PAIR_TOL,
) -> LowEnergyWindow:
    """All eigenpairs inside (-mu, mu), certified by left-boundary localization.

    Certification keeps eigenvectors with at least ``loc_threshold`` of their
    squared norm on the first half of the chain.  Before thresholding,
    degenerate groups (gap below ``group_tol``) and closest pairs (gap below
    ``pair_tol``) are rotated to extremize that weight, resolving mixtures of
    left- and right-boundary modes created by the truncation.
    """
    if mu <= 0:
        raise InvalidArgumentError("window radius must be positive")
    evals, evecs = np.linalg.eigh(trunc.matrix)
    if np.min(np.abs(np.abs(evals) - mu)) < BOUNDARY_TOL:
        raise WindowBoundaryError(
            f"an eigenvalue lies within {BOUNDARY_TOL:.0e} of the window boundary +-{mu}"
        )
    inside = np.abs(evals) < mu
    w = evals[inside]
    v = evecs[:, inside].copy()
    r = trunc.symbol.rank
    half = r * int(np.ceil(trunc.n_sites / 2))

    # stage 1: rotate exactly degenerate groups as a whole
    grouped: set[int] = set()
    i = 0
    while i < len(w):
        j = i
        while j + 1 < len(w) and w[j + 1] - w[j] <= group_tol:
            j += 1
        if j > i:
            idx = list(range(i, j + 1))
            v[:, idx] = _rotate_group(v[:, idx], half)
            grouped.update(idx)
        i = j + 1

    # stage 2: rotate disjoint nearest-neighbour pairs, smallest gaps first;
    # keep a rotation only when it splits into a clean boundary/anti-boundary
    # pair, so that nearly degenerate bulk states are not smeared into
    # half-localized wavepackets
    gaps = sorted(
        (w[i + 1] - w[i], i)
        for i in range(len(w) - 1)
        if i not in grouped and i + 1 not in grouped and w[i + 1] - w[i] <= pair_tol
    )
    used: set[int] = set()
    for _, i in gaps:
        if i in used or i + 1 in used:
            continue
        rotated = _rotate_group(v[:, [i, i + 1]], half)
        if float(np.max(np.linalg.norm(rotated[:half], axis=0) ** 2)) >= 0.98:
            v[:, [i, i + 1]] = rotated
        used.update((i, i + 1))

    pairs = []
    for i in range(len(w)):
        psi = v[:, i]
        weight = float(np.linalg.norm(psi[:half]) ** 2)
        lam = float(np.real(psi.conj() @ (trunc.matrix @ psi)))
        pairs.append(WindowPair(lam, psi, weight, weight >= loc_threshold))
    pairs.sort(key=lambda p: p.eigenvalue)
    return LowEnergyWindow(mu=mu, pairs=pairs)


def bulk_gap_estimate(symbol: BlockSymbol, samples: int = 256) -> float:
    """Smallest magnitude of a symbol eigenvalue over the circle."""
    k = 2.0 * np.pi * np.arange(samples) / samples
    evals = np.linalg.eigvalsh(symbol.evaluate(k))
    return float(np.min(np.abs(evals)))


def auto_window(symbol: BlockSymbol, samples: int = 256) -> float:
    """Default window radius: half the estimated bulk gap."""
    return 0.5 * bulk_gap_estimate(symbol, samples)
