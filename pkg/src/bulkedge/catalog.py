"""Built-in family catalog.

Identifiers:

* ``example1`` - circle family of two-band chains; one Fermi point, index +1.
* ``example2`` - three-sphere family of the four-band model; index -1.
* ``example3`` - three-torus family, alias of ``hn:1``; index +2.
* ``example4`` - two-sphere family with vanishing mass (even case); index +1.
* ``hn:<n>``   - three-torus family with winding n in the first angle;
  edge index 2n, bulk second Chern number -2n.
* ``local:<a>,<re b>,<im b>,<re c>,<im c>`` - a single parameter point of the
  four-band model for kernel classification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch import BlochFamily
from .errors import InvalidArgumentError
from .fermi import EdgeFamily
from .localmodel import (
    LocalModelParams,
    chain2_symbol,
    effective_hamiltonian,
    h_loc,
    local_symbol,
)
from .manifolds import Sphere, Torus
from .toeplitz import BlockSymbol

ROOT3 = float(np.sqrt(3.0))
ROOT2 = float(np.sqrt(2.0))


@dataclass
class CatalogEntry:
    """One catalog family: an edge family and, when defined, its bulk parent."""

    entry_id: str
    description: str
    edge: EdgeFamily | None = None
    bulk: BlochFamily | None = None
    local_params: LocalModelParams | None = None

    def require_edge(self) -> EdgeFamily:
        if self.edge is None:
            raise InvalidArgumentError(f"family '{self.entry_id}' has no edge pipeline")
        return self.edge

    def require_bulk(self) -> BlochFamily:
        if self.bulk is None:
            raise InvalidArgumentError(f"family '{self.entry_id}' has no bulk pipeline")
        return self.bulk


# ---------------------------------------------------------------------------
# example1: circle family of the two-band chain


def _example1() -> CatalogEntry:
    def mass(k):
        return np.sin(k)

    def hop(k):
        return 1.5 + np.cos(k)

    def residual(pts):
        pts = np.asarray(pts, dtype=float)
        return mass(pts[..., 0])[..., None]

    def jacobian(point):
        return np.array([[np.cos(point[0])]])

    def constraint(pts):
        pts = np.asarray(pts, dtype=float)
        return hop(pts[..., 0]).astype(complex)

    def symbol_at(point):
        k = float(np.asarray(point).reshape(-1)[0])
        return chain2_symbol(float(mass(k)), complex(hop(k)))

    def block(point):
        k = float(np.asarray(point).reshape(-1)[0])
        return np.array([[mass(k)]], dtype=complex)

    edge = EdgeFamily(
        family_id="example1",
        manifold=Torus(1),
        parity="odd",
        residual=residual,
        constraint=constraint,
        symbol_at=symbol_at,
        effective_block=block,
        residual_jacobian=jacobian,
        reference_window=ROOT2,
    )
    return CatalogEntry(
        entry_id="example1",
        description="two-band chain over the circle: mass sin(k), hopping 3/2 + cos(k)",
        edge=edge,
    )


# ---------------------------------------------------------------------------
# hn:<n> (and example3 = hn:1): three-torus families of the four-band model


def _hn_params(n: int):
    def pa(k1, k2, k3):
        return -np.cos(k2 + k3)

    def pb(k1, k2, k3):
        return -1.0 - np.exp(-1j * n * k1) - np.exp(-1j * k2)

    def pc(k1, k2, k3):
        return -1.0 - np.exp(-1j * k3)

    return pa, pb, pc


def _torus_edge(entry_id: str, n: int, b_shift: complex = 0.0) -> EdgeFamily:
    pa, pb, pc = _hn_params(n)

    def residual(pts):
        pts = np.asarray(pts, dtype=float)
        k1, k2, k3 = pts[..., 0], pts[..., 1], pts[..., 2]
        b = pb(k1, k2, k3) + b_shift
        return np.stack([np.real(b), np.imag(b), pa(k1, k2, k3)], axis=-1)

    def jacobian(point):
        k1, k2, k3 = point
        s23 = np.sin(k2 + k3)
        return np.array(
            [
                [n * np.sin(n * k1), np.sin(k2), 0.0],
                [n * np.cos(n * k1), np.cos(k2), 0.0],
                [0.0, s23, s23],
            ]
        )

    def constraint(pts):
        pts = np.asarray(pts, dtype=float)
        return pc(pts[..., 0], pts[..., 1], pts[..., 2])

    def symbol_at(point):
        k1, k2, k3 = np.asarray(point, dtype=float)
        return local_symbol(float(pa(k1, k2, k3)), complex(pb(k1, k2, k3) + b_shift), complex(pc(k1, k2, k3)))

    def block(point):
        k1, k2, k3 = np.asarray(point, dtype=float)
        return effective_hamiltonian(float(pa(k1, k2, k3)), complex(pb(k1, k2, k3) + b_shift))

    return EdgeFamily(
        family_id=entry_id,
        manifold=Torus(3),
        parity="odd",
        residual=residual,
        constraint=constraint,
        symbol_at=symbol_at,
        effective_block=block,
        residual_jacobian=jacobian,
        reference_window=ROOT3,
    )


def _torus_bulk(name: str, n: int) -> BlochFamily:
    pa, pb, pc = _hn_params(n)

    def eval_h(k1, k2, k3, k4):
        k1, k2, k3, k4 = np.broadcast_arrays(
            np.asarray(k1, dtype=float), np.asarray(k2, dtype=float),
            np.asarray(k3, dtype=float), np.asarray(k4, dtype=float),
        )
        a = pa(k1, k2, k3)
        b = pb(k1, k2, k3)
        z = pc(k1, k2, k3) - np.exp(-1j * k4)
        zero = np.zeros_like(z)
        aa = a + np.zeros_like(z)
        rows = [
            [aa, np.conj(z), zero, np.conj(b) + zero],
            [z, -aa, np.conj(b) + zero, zero],
            [zero, b + zero, aa, -z],
            [b + zero, zero, -np.conj(z), -aa],
        ]
        return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)

    return BlochFamily(dim=4, rank=4, eval=eval_h, gap_required=True, name=name)


def _hn_entry(n: int, entry_id: str | None = None) -> CatalogEntry:
    entry_id = entry_id or f"hn:{n}"
    return CatalogEntry(
        entry_id=entry_id,
        description=f"four-band torus family with first-angle winding {n}",
        edge=_torus_edge(entry_id, n),
        bulk=_torus_bulk(entry_id, n),
    )


# ---------------------------------------------------------------------------
# example2: three-sphere family


def _example2() -> CatalogEntry:
    def params(pts):
        pts = np.asarray(pts, dtype=float)
        a = pts[..., 0]
        b = pts[..., 1] + 1j * pts[..., 2]
        c = (pts[..., 3] - 1.0).astype(complex)
        return a, b, c

    def residual(pts):
        a, b, _ = params(pts)
        return np.stack([np.real(b), np.imag(b), a], axis=-1)

    def jacobian(point):
        return np.array(
            [
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [1.0, 0.0, 0.0, 0.0],
            ]
        )

    def constraint(pts):
        return params(pts)[2]

    def symbol_at(point):
        a, b, c = params(np.asarray(point, dtype=float))
        return local_symbol(float(a), complex(b), complex(c))

    def block(point):
        a, b, _ = params(np.asarray(point, dtype=float))
        return effective_hamiltonian(float(a), complex(b))

    edge = EdgeFamily(
        family_id="example2",
        manifold=Sphere(3),
        parity="odd",
        residual=residual,
        constraint=constraint,
        symbol_at=symbol_at,
        effective_block=block,
        residual_jacobian=jacobian,
        reference_window=ROOT3,
    )
    return CatalogEntry(
        entry_id="example2",
        description="four-band model over the three-sphere: (a, b, c) = (x, y + iz, w - 1)",
        edge=edge,
    )


# ---------------------------------------------------------------------------
# example4: two-sphere family, even case


def _example4() -> CatalogEntry:
    def params(pts):
        pts = np.asarray(pts, dtype=float)
        b = pts[..., 0] + 1j * pts[..., 1]
        c = (pts[..., 2] - 1.0).astype(complex)
        return b, c

    def residual(pts):
        b, _ = params(pts)
        return np.stack([np.real(b), np.imag(b)], axis=-1)

    def jacobian(point):
        return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])

    def constraint(pts):
        return params(pts)[1]

    def symbol_at(point):
        b, c = params(np.asarray(point, dtype=float))
        return local_symbol(0.0, complex(b), complex(c))

    def block(point):
        b, _ = params(np.asarray(point, dtype=float))
        return effective_hamiltonian(0.0, complex(b))

    edge = EdgeFamily(
        family_id="example4",
        manifold=Sphere(2),
        parity="even",
        residual=residual,
        constraint=constraint,
        symbol_at=symbol_at,
        effective_block=block,
        residual_jacobian=jacobian,
        reference_window=ROOT3,
    )
    return CatalogEntry(
        entry_id="example4",
        description="massless four-band model over the two-sphere: (b, c) = (y + iz, w - 1)",
        edge=edge,
    )


# ---------------------------------------------------------------------------
# variants


def with_broken_time_reversal(entry: CatalogEntry, shift: float = 0.1) -> CatalogEntry:
    """Shift the coupling b by a constant imaginary amount, breaking k -> -k symmetry."""
    if not entry.entry_id.startswith(("hn:", "example3")):
        raise InvalidArgumentError("time-reversal breaking variant exists only for torus families")
    n = 1 if entry.entry_id == "example3" else int(entry.entry_id.split(":")[1])
    edge = _torus_edge(entry.entry_id + "/ai-broken", n, b_shift=1j * shift)
    return CatalogEntry(
        entry_id=entry.entry_id + "/ai-broken",
        description=entry.description + f" with b shifted by {shift}i",
        edge=edge,
        bulk=None,
    )


def stabilized(entry: CatalogEntry) -> CatalogEntry:
    """Direct sum with the constant gapped block diag(-1, +1) on bulk and edge."""
    bulk = entry.require_bulk().direct_sum(np.diag([-1.0, 1.0]).astype(complex))
    base_edge = entry.require_edge()
    pad = np.diag([-1.0, 1.0]).astype(complex)

    def symbol_at(point):
        sym = base_edge.symbol_at(point)
        coeffs = {}
        for m, cm in sym.coeffs.items():
            padded = np.zeros((sym.rank + 2, sym.rank + 2), dtype=complex)
            padded[: sym.rank, : sym.rank] = cm
            if m == 0:
                padded[sym.rank:, sym.rank:] = pad
            coeffs[m] = padded
        return BlockSymbol(rank=sym.rank + 2, coeffs=coeffs, metadata=dict(sym.metadata))

    edge = EdgeFamily(
        family_id=base_edge.family_id + "/stabilized",
        manifold=base_edge.manifold,
        parity=base_edge.parity,
        residual=base_edge.residual,
        constraint=base_edge.constraint,
        symbol_at=symbol_at,
        effective_block=base_edge.effective_block,
        residual_jacobian=base_edge.residual_jacobian,
        reference_window=base_edge.reference_window,
    )
    return CatalogEntry(
        entry_id=entry.entry_id + "/stabilized",
        description=entry.description + " direct-summed with diag(-1, +1)",
        edge=edge,
        bulk=bulk,
    )


# ---------------------------------------------------------------------------
# lookup


def known_ids() -> list[str]:
    return ["example1", "example2", "example3", "example4", "hn:<n>", "local:<a>,<rb>,<ib>,<rc>,<ic>"]


def get_entry(entry_id: str) -> CatalogEntry:
    """Resolve a catalog identifier; unknown or malformed ids raise."""
    entry_id = entry_id.strip()
    if entry_id == "example1":
        return _example1()
    if entry_id == "example2":
        return _example2()
    if entry_id == "example3":
        return _hn_entry(1, "example3")
    if entry_id == "example4":
        return _example4()
    if entry_id.startswith("hn:"):
        tail = entry_id[3:]
        try:
            n = int(tail)
        except ValueError as exc:
            raise InvalidArgumentError(f"malformed winding number in '{entry_id}'") from exc
        if n < 1:
            raise InvalidArgumentError(f"winding number must be at least 1, got {n}")
        return _hn_entry(n)
    if entry_id.startswith("local:"):
        parts = entry_id[6:].split(",")
        if len(parts) != 5:
            raise InvalidArgumentError(
                "local point must be 'local:<a>,<re b>,<im b>,<re c>,<im c>'"
            )
        try:
            vals = [float(p) for p in parts]
        except ValueError as exc:
            raise InvalidArgumentError(f"malformed local parameters in '{entry_id}'") from exc
        params = LocalModelParams(a=vals[0], b=vals[1] + 1j * vals[2], c=vals[3] + 1j * vals[4])
        return CatalogEntry(
            entry_id=entry_id,
            description="ad-hoc four-band model parameter point",
            local_params=params,
        )
    raise InvalidArgumentError(f"unknown family '{entry_id}'; known ids: {', '.join(known_ids())}")


def inline_trig_family(spec: dict) -> BlochFamily:
    """Bulk family from a table of trigonometric coefficient matrices.

    The table lists Fourier blocks: ``{"rank": r, "dim": d, "terms": [
    {"harmonics": [n1, ..., nd], "re": [[...]], "im": [[...]]}, ...]}`` with
    every harmonic bounded by 4 per variable.  The conjugate blocks are added
    automatically so the family is Hermitian.
    """
    rank = int(spec["rank"])
    dim = int(spec["dim"])
    terms = []
    for term in spec["terms"]:
        harm = np.asarray(term["harmonics"], dtype=int)
        if harm.shape != (dim,):
            raise InvalidArgumentError("each term needs one harmonic per variable")
        if np.any(np.abs(harm) > 4):
            raise InvalidArgumentError("harmonics are capped at degree 4 per variable")
        mat = np.asarray(term["re"], dtype=float) + 1j * np.asarray(term.get("im", np.zeros((rank, rank))), dtype=float)
        if mat.shape != (rank, rank):
            raise InvalidArgumentError("coefficient matrices must be rank x rank")
        terms.append((harm, mat))

    def eval_h(*ks):
        ks = np.broadcast_arrays(*[np.asarray(k, dtype=float) for k in ks])
        shape = ks[0].shape
        out = np.zeros(shape + (rank, rank), dtype=complex)
        for harm, mat in terms:
            phase = np.zeros(shape, dtype=float)
            for h, k in zip(harm, ks):
                phase = phase + h * k
            expo = np.exp(1j * phase)
            out += expo[..., None, None] * mat
            out += np.conj(expo)[..., None, None] * mat.conj().T
        return out

    return BlochFamily(dim=dim, rank=rank, eval=eval_h, name="inline-trig")
