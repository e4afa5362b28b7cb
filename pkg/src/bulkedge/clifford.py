"""Standard graded and ungraded Clifford representations.

All sign conventions downstream (sign coordinates, suspension maps, the
Pauli form of low-energy blocks) are fixed by the representations built
here: the rank-two graded representation has grading diag(1,-1) and
generators sigma_1, sigma_2, and higher ranks are graded tensor powers of
it in a deterministic basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

RELATION_TOL = 1e-14

SIGMA_1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _freeze(m: np.ndarray) -> np.ndarray:
    m = np.ascontiguousarray(m, dtype=complex)
    m.flags.writeable = False
    return m


@dataclass(frozen=True)
class GradedCliffordRep:
    """Graded representation: grading involution plus anticommuting generators.

    The grading ``epsilon`` squares to the identity and anticommutes with
    every generator; the generators are Hermitian, unitary and pairwise
    anticommuting.
    """

    n: int
    dim: int
    epsilon: np.ndarray
    gammas: tuple[np.ndarray, ...]

    def relation_defect(self) -> float:
        """Largest entrywise violation of the defining relations."""
        eye = np.eye(self.dim)
        worst = float(np.max(np.abs(self.epsilon @ self.epsilon - eye)))
        worst = max(worst, float(np.max(np.abs(self.epsilon - self.epsilon.conj().T))))
        for i, gi in enumerate(self.gammas):
            worst = max(worst, float(np.max(np.abs(gi - gi.conj().T))))
            worst = max(worst, float(np.max(np.abs(gi @ self.epsilon + self.epsilon @ gi))))
            for j, gj in enumerate(self.gammas):
                target = 2.0 * eye if i == j else 0.0
                worst = max(worst, float(np.max(np.abs(gi @ gj + gj @ gi - target))))
        return worst


@dataclass(frozen=True)
class UngradedCliffordRep:
    """Ungraded representation: Hermitian unitary pairwise-anticommuting generators."""

    n: int
    dim: int
    gammas: tuple[np.ndarray, ...]

    def relation_defect(self) -> float:
        eye = np.eye(self.dim)
        worst = 0.0
        for i, gi in enumerate(self.gammas):
            worst = max(worst, float(np.max(np.abs(gi - gi.conj().T))))
            for j, gj in enumerate(self.gammas):
                target = 2.0 * eye if i == j else 0.0
                worst = max(worst, float(np.max(np.abs(gi @ gj + gj @ gi - target))))
        return worst


_RANK2 = GradedCliffordRep(
    n=2, dim=2, epsilon=_freeze(SIGMA_3), gammas=(_freeze(SIGMA_1), _freeze(SIGMA_2))
)


def _block_sort(epsilon: np.ndarray, gammas: list[np.ndarray]) -> tuple[np.ndarray, list[np.ndarray]]:
    """Permute the basis so the grading becomes diag(I, -I), stably by index."""
    signs = np.real(np.diag(epsilon))
    perm = np.argsort(-signs, kind="stable")
    eps = epsilon[np.ix_(perm, perm)]
    return eps, [g[np.ix_(perm, perm)] for g in gammas]


def graded_tensor(left: GradedCliffordRep, right: GradedCliffordRep) -> GradedCliffordRep:
    """Graded tensor product in the deterministic block-sorted Kronecker basis.

    The right factor's generators are dressed by the left grading so that the
    two generator sets anticommute; afterwards the basis is stably permuted to
    bring the product grading to diag(I, -I) exactly.
    """
    eye_r = np.eye(right.dim)
    gammas = [np.kron(g, eye_r) for g in left.gammas]
    gammas += [np.kron(left.epsilon, g) for g in right.gammas]
    epsilon = np.kron(left.epsilon, right.epsilon)
    epsilon, gammas = _block_sort(epsilon, gammas)
    return GradedCliffordRep(
        n=left.n + right.n,
        dim=left.dim * right.dim,
        epsilon=_freeze(epsilon),
        gammas=tuple(_freeze(g) for g in gammas),
    )


def standard_graded_rep(n: int) -> GradedCliffordRep:
    """Standard graded irreducible representation with n generators (n even).

    Built as the (n/2)-fold graded tensor power of the rank-two representation,
    left associated, with block sorting applied after every product.
    """
    if n < 2 or n % 2 != 0:
        raise InvalidArgumentError(f"generator count must be a positive even integer, got {n}")
    if n > 12:
        raise InvalidArgumentError(f"generator count capped at 12, got {n}")
    rep = _RANK2
    for _ in range(n // 2 - 1):
        rep = graded_tensor(rep, _RANK2)
    return rep


def standard_ungraded_rep(n: int) -> UngradedCliffordRep:
    """Standard ungraded irreducible representation with n generators (n odd).

    Extracted from the graded representation with n+1 generators: in the basis
    where the grading is diag(I, -I) each generator is off-diagonal with equal
    Hermitian blocks, and those blocks are the ungraded generators.  For n = 1
    this gives the scalar +1, for n = 3 exactly the three Pauli matrices.
    """
    if n < 1 or n % 2 == 0:
        raise InvalidArgumentError(f"generator count must be a positive odd integer, got {n}")
    graded = standard_graded_rep(n + 1)
    half = graded.dim // 2
    gammas = []
    for i in range(n):
        g = graded.gammas[i]
        block = g[:half, half:]
        if np.max(np.abs(block - g[half:, :half].conj().T)) > RELATION_TOL:
            raise AssertionError("graded generator is not off-diagonal in the sorted basis")
        gammas.append(_freeze(block))
    return UngradedCliffordRep(n=n, dim=half, gammas=tuple(gammas))


def clifford_mu(rep: GradedCliffordRep | UngradedCliffordRep, x: np.ndarray) -> np.ndarray:
    """Linear combination sum_i x_i gamma_i of the representation's generators."""
    x = np.asarray(x, dtype=float)
    if x.shape != (rep.n,):
        raise InvalidArgumentError(f"expected a coefficient vector of length {rep.n}, got shape {x.shape}")
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for xi, g in zip(x, rep.gammas):
        out += xi * g
    return out


def suspension(a: np.ndarray, gamma_next: np.ndarray, t: float) -> np.ndarray:
    """One suspension step A*cos(t) - gamma*sin(t).

    Requires that ``gamma_next`` anticommutes with ``a``; the measured
    anticommutator norm is reported on failure.
    """
    a = np.asarray(a, dtype=complex)
    gamma_next = np.asarray(gamma_next, dtype=complex)
    if a.shape != gamma_next.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError("operator and generator must be square matrices of equal size")
    anti = np.linalg.norm(a @ gamma_next + gamma_next @ a, 2)
    if anti >= 1e-12:
        raise InvalidArgumentError(f"generator does not anticommute with the operator: |AG+GA| = {anti:.3e}")
    return a * np.cos(t) - gamma_next * np.sin(t)


def iterated_suspension(a: np.ndarray, gammas: list[np.ndarray], ts: np.ndarray) -> np.ndarray:
    """Fold the one-step suspension over a list of generators and angles.

    This is purely the trigonometric recursion; anticommutation between the
    intermediate operator and the next generator is not assumed, so the result
    is meaningful for arbitrary Hermitian input.
    """
    ts = np.asarray(ts, dtype=float)
    if len(gammas) != len(ts):
        raise InvalidArgumentError("need one angle per generator")
    out = np.asarray(a, dtype=complex)
    for g, t in zip(gammas, ts):
        out = out * np.cos(t) - np.asarray(g, dtype=complex) * np.sin(t)
    return out


def suspension_ball_coords(ts: np.ndarray) -> tuple[float, np.ndarray]:
    """Polar-coordinate image (x_0, x) of a tuple of suspension angles.

    x_j = sin(t_j) * prod_{i>j} cos(t_i) and x_0 = prod_i cos(t_i); on
    [-pi/2, pi/2]^m this parametrizes the hemisphere x_0 >= 0, so the
    iterated suspension of A equals x_0*A - sum_j x_j*gamma_j.
    """
    ts = np.asarray(ts, dtype=float)
    m = len(ts)
    xs = np.empty(m)
    for j in range(m):
        xs[j] = np.sin(ts[j]) * np.prod(np.cos(ts[j + 1:]))
    x0 = float(np.prod(np.cos(ts)))
    return x0, xs


def commutant_dimension(matrices: list[np.ndarray]) -> int:
    """Dimension of the joint commutant of a set of matrices.

    Computed as the nullity of the stacked Sylvester operators
    X -> M X - X M; a value of 1 certifies irreducibility of the set.
    """
    d = matrices[0].shape[0]
    eye = np.eye(d)
    rows = []
    for m in matrices:
        rows.append(np.kron(m, eye) - np.kron(eye, m.T))
    stack = np.vstack(rows)
    svals = np.linalg.svd(stack, compute_uv=False)
    return int(np.sum(svals < 1e-10 * max(1.0, svals[0])))
