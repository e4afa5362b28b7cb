"""Closed-form spectral theory of the four-band half-line lattice model.

The model family H(a, b, c) has one hopping block and an on-site block
built from a real mass a and complex couplings b, c.  Its half-line
kernel at energy E is classified exactly: decaying boundary solutions
exist only for |c| < 1 at E = +-sqrt(a^2 + |b|^2) (plus flat-band
degeneracies when c = 0), with explicit geometric eigenvectors.  A
two-band chain with the analogous structure provides the rank-two
oracle used by the circle-family examples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import BoundaryDegenerateError, InvalidArgumentError
from .toeplitz import BlockSymbol

CLAUSE_TOL = 1e-12
BOUNDARY_BAND = 1e-9


@dataclass(frozen=True)
class LocalModelParams:
    """Parameter point (a, b, c) with a probe energy E."""

    a: float
    b: complex
    c: complex
    e: float = 0.0


def local_blocks(a: float, b: complex, c: complex) -> tuple[np.ndarray, np.ndarray]:
    """Hopping block A (Fourier degree +1) and on-site block V of the model."""
    hop = np.zeros((4, 4), dtype=complex)
    hop[0, 1] = -1.0
    hop[3, 2] = 1.0
    onsite = np.array(
        [
            [a, np.conj(c), 0.0, np.conj(b)],
            [c, -a, np.conj(b), 0.0],
            [0.0, b, a, -c],
            [b, 0.0, -np.conj(c), -a],
        ],
        dtype=complex,
    )
    return hop, onsite


def h_loc(a: float, b: complex, c: complex, k) -> np.ndarray:
    """Bloch matrix of the model; vectorized over the momentum argument."""
    k = np.asarray(k, dtype=float)
    z = c - np.exp(-1j * k)
    zero = np.zeros_like(z)
    aa = np.broadcast_to(a + zero, z.shape)
    bb = b + zero
    rows = [
        [aa, np.conj(z), zero, np.conj(bb)],
        [z, -aa, np.conj(bb), zero],
        [zero, bb, aa, -z],
        [bb, zero, -np.conj(z), -aa],
    ]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def local_symbol(a: float, b: complex, c: complex) -> BlockSymbol:
    hop, onsite = local_blocks(a, b, c)
    return BlockSymbol(rank=4, coeffs={0: onsite, 1: hop}, metadata={"model": "local4", "a": a, "b": b, "c": c})


def chain2_blocks(mass: float, hop: complex) -> tuple[np.ndarray, np.ndarray]:
    """Blocks of the two-band chain: boundary mode at E = mass when |hop| < 1."""
    hopping = np.zeros((2, 2), dtype=complex)
    hopping[0, 1] = -1.0
    onsite = np.array([[mass, np.conj(hop)], [hop, -mass]], dtype=complex)
    return hopping, onsite


def chain2_symbol(mass: float, hop: complex) -> BlockSymbol:
    hopping, onsite = chain2_blocks(mass, hop)
    return BlockSymbol(rank=2, coeffs={0: onsite, 1: hopping}, metadata={"model": "chain2", "mass": mass, "hop": hop})


def effective_hamiltonian(a: float, b: complex) -> np.ndarray:
    """Two-level block Re(b) s1 + Im(b) s2 + a s3 governing the boundary energies."""
    return np.array([[a, np.conj(b)], [b, -a]], dtype=complex)


def transfer_matrix(params: LocalModelParams) -> np.ndarray:
    """Site-to-site propagator of the half-line eigenvalue equation (c != 0)."""
    a, b, c, e = params.a, params.b, params.c, params.e
    if abs(c) < CLAUSE_TOL:
        raise InvalidArgumentError("transfer matrix requires c != 0")
    cb = np.conj(c)
    s = a * a + abs(b) ** 2 + 1.0 - e * e
    return np.array(
        [
            [c, -(a + e), np.conj(b), 0.0],
            [-c * (a - e) / cb, s / cb, 0.0, -np.conj(b) * c / cb],
            [b * c / cb, 0.0, s / cb, -(a + e) * c / cb],
            [0.0, -b, -(a - e), c],
        ],
        dtype=complex,
    )


def boundary_solution_span(params: LocalModelParams) -> np.ndarray:
    """Two first-site vectors spanning all formal half-line solutions (c != 0)."""
    a, b, c, e = params.a, params.b, params.c, params.e
    if abs(c) < CLAUSE_TOL:
        raise InvalidArgumentError("solution span requires c != 0")
    v1 = np.array([np.conj(c), -(a - e), b, 0.0], dtype=complex)
    v2 = np.array([0.0, -np.conj(b), -(a + e), np.conj(c)], dtype=complex)
    return np.stack([v1, v2], axis=1)


def discriminant(params: LocalModelParams) -> float:
    """Factored discriminant controlling existence of decaying solutions."""
    a2b2 = params.a**2 + abs(params.b) ** 2
    e2 = params.e**2
    cc = abs(params.c)
    return float((a2b2 + (cc - 1.0) ** 2 - e2) * (a2b2 + (cc + 1.0) ** 2 - e2))


class KernelKind(Enum):
    NO_SOLUTION = "none"
    DIM1 = "dim1"
    DIM2 = "dim2"
    INFINITE = "infinite"


@dataclass(frozen=True)
class EdgeVector:
    """Closed-form boundary vector: components scale geometrically site to site.

    value(n) for site n >= 1 is decay**(n-1) times the fixed amplitude vector,
    with the convention 0**0 = 1 so that decay = 0 yields a first-site vector.
    """

    decay: complex
    amplitudes: np.ndarray

    def value(self, n) -> np.ndarray:
        n = np.asarray(n)
        scalar = n.ndim == 0
        n = np.atleast_1d(n).astype(int)
        if np.any(n < 1):
            raise InvalidArgumentError("sites are indexed from 1")
        if self.decay == 0:
            factors = np.where(n == 1, 1.0 + 0.0j, 0.0j)
        else:
            factors = self.decay ** (n - 1)
        out = factors[:, None] * self.amplitudes[None, :]
        return out[0] if scalar else out

    def first_sites(self, count: int) -> np.ndarray:
        return self.value(np.arange(1, count + 1))


def _e1(c: complex, scale: complex = 1.0) -> EdgeVector:
    return EdgeVector(decay=c, amplitudes=np.array([scale, 0.0, 0.0, 0.0], dtype=complex))


def _e4(c: complex, scale: complex = 1.0) -> EdgeVector:
    return EdgeVector(decay=c, amplitudes=np.array([0.0, 0.0, 0.0, scale], dtype=complex))


def _combo(c: complex, coeff: complex) -> EdgeVector:
    return EdgeVector(decay=c, amplitudes=np.array([coeff, 0.0, 0.0, 1.0], dtype=complex))


@dataclass
class KernelClassification:
    """Exact kernel of the half-line operator at the probe energy."""

    kind: KernelKind
    basis: list[EdgeVector] = field(default_factory=list)
    condition_tag: str = ""

    @property
    def dimension(self) -> int | None:
        if self.kind == KernelKind.NO_SOLUTION:
            return 0
        if self.kind == KernelKind.DIM1:
            return 1
        if self.kind == KernelKind.DIM2:
            return 2
        return None


def kernel_classification(params: LocalModelParams) -> KernelClassification:
    """Full case analysis of square-summable half-line solutions at energy E.

    Clause predicates are evaluated with absolute tolerance 1e-12 on the
    defining equations; parameters within 1e-9 of the degeneration circle
    |c| = 1 raise when a solution clause would otherwise fire.
    """
    a, b, c, e = params.a, params.b, params.c, params.e
    s = np.sqrt(a * a + abs(b) ** 2)
    b_zero = abs(b) <= CLAUSE_TOL
    at_pm_s = abs(abs(e) - s) <= CLAUSE_TOL

    if abs(c) <= CLAUSE_TOL:
        w = np.sqrt(a * a + abs(b) ** 2 + 1.0)
        if abs(abs(e) - w) <= CLAUSE_TOL:
            return KernelClassification(KernelKind.INFINITE, [], "flat-band")
        if at_pm_s:
            return _zero_hopping_kernel(a, b, e, decay=0.0)
        return KernelClassification(KernelKind.NO_SOLUTION, [], "no-clause")

    would_fire = at_pm_s and (not b_zero or abs(e - a) <= CLAUSE_TOL or abs(e + a) <= CLAUSE_TOL)
    if abs(abs(c) - 1.0) < BOUNDARY_BAND:
        if would_fire:
            raise BoundaryDegenerateError(
                f"|c| = {abs(c):.12f} sits on the degeneration circle while a kernel clause fires"
            )
        return KernelClassification(KernelKind.NO_SOLUTION, [], "degeneration-circle")
    if abs(c) > 1.0:
        return KernelClassification(KernelKind.NO_SOLUTION, [], "outside-disk")
    if discriminant(params) <= 0.0:
        return KernelClassification(KernelKind.NO_SOLUTION, [], "nonpositive-discriminant")
    if not at_pm_s:
        return KernelClassification(KernelKind.NO_SOLUTION, [], "off-shell")
    return _zero_hopping_kernel(a, b, e, decay=c)


def _zero_hopping_kernel(a: float, b: complex, e: float, decay: complex) -> KernelClassification:
    """Shared kernel structure at E = +-sqrt(a^2+|b|^2) for any |decay| < 1."""
    if abs(b) <= CLAUSE_TOL:
        if abs(a) <= CLAUSE_TOL and abs(e) <= CLAUSE_TOL:
            return KernelClassification(KernelKind.DIM2, [_e1(decay), _e4(decay)], "zero-energy-pair")
        if abs(e - a) <= CLAUSE_TOL:
            return KernelClassification(KernelKind.DIM1, [_e1(decay)], "mass-aligned")
        if abs(e + a) <= CLAUSE_TOL:
            return KernelClassification(KernelKind.DIM1, [_e4(decay)], "mass-antialigned")
        return KernelClassification(KernelKind.NO_SOLUTION, [], "off-shell")
    coeff = (a + e) / b
    return KernelClassification(KernelKind.DIM1, [_combo(decay, coeff)], "coupled-boundary-mode")
