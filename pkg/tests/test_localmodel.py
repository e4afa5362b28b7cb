"""Closed-form spectral theory of the four-band half-line model."""

import numpy as np
import pytest

from bulkedge.errors import BoundaryDegenerateError, InvalidArgumentError
from bulkedge.localmodel import (
    KernelKind,
    LocalModelParams,
    boundary_solution_span,
    discriminant,
    effective_hamiltonian,
    h_loc,
    kernel_classification,
    local_blocks,
    local_symbol,
    transfer_matrix,
)
from bulkedge.selftest import oracle_equivalence, transfer_identities


def test_h_loc_at_origin_has_flat_bands():
    h = h_loc(0.0, 0.0, 0.0, 0.0)
    expected = np.zeros((4, 4), dtype=complex)
    expected[0, 1] = expected[1, 0] = -1.0
    expected[2, 3] = expected[3, 2] = 1.0
    assert np.array_equal(h, expected)
    assert np.allclose(np.sort(np.linalg.eigvalsh(h)), [-1, -1, 1, 1])


def test_h_loc_is_hermitian_everywhere():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(1000):
        a = rng.uniform(-2, 2)
        b = rng.uniform(-2, 2) + 1j * rng.uniform(-2, 2)
        c = rng.uniform(-2, 2) + 1j * rng.uniform(-2, 2)
        k = rng.uniform(0, 2 * np.pi)
        h = h_loc(a, b, c, k)
        worst = max(worst, float(np.max(np.abs(h - h.conj().T))))
    assert worst == 0.0


def test_h_loc_magnitudes_follow_the_clifford_norm():
    rng = np.random.default_rng(6)
    for _ in range(20):
        a = rng.uniform(-2, 2)
        b = rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)
        c = rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)
        k = rng.uniform(0, 2 * np.pi)
        r = np.sqrt(a**2 + abs(b) ** 2 + abs(c - np.exp(-1j * k)) ** 2)
        w = np.sort(np.linalg.eigvalsh(h_loc(a, b, c, k)))
        assert np.allclose(w, [-r, -r, r, r], atol=1e-12)


def test_symbol_blocks_equal_model_blocks():
    a, b, c = 0.3, 0.7 - 0.2j, -0.4 + 0.9j
    hop, onsite = local_blocks(a, b, c)
    symbol = local_symbol(a, b, c)
    assert np.array_equal(symbol.coeffs[0], onsite)
    assert np.array_equal(symbol.coeffs[1], hop)
    # Fourier consistency: evaluating the symbol reproduces the Bloch matrix
    for k in (0.0, 1.2, 4.4):
        assert np.max(np.abs(symbol.evaluate(np.array(k)) - h_loc(a, b, c, k))) < 1e-14


def test_transfer_matrix_requires_nonzero_coupling():
    with pytest.raises(InvalidArgumentError):
        transfer_matrix(LocalModelParams(0.1, 0.2, 0.0, 0.0))


def test_transfer_identities_hold():
    ok, detail = transfer_identities(n_samples=1000, seed=42)
    assert ok, detail


def test_recursion_matches_dense_truncation_kernel():
    # the span plus transfer recursion reproduces an actual eigenvector
    params = LocalModelParams(0.6, 0.8, 0.3, 1.0)
    r = transfer_matrix(params)
    span = boundary_solution_span(params)
    # the decaying eigenvector corresponds to z = (a+E)/b * w, w = 1 (up to scale)
    z = (params.a + params.e) / params.b
    psi = [span[:, 0] * z + span[:, 1]]
    for _ in range(40):
        psi.append(r @ psi[-1])
    psi = np.array(psi)
    expected = np.zeros_like(psi)
    n = np.arange(41)
    expected[:, 0] = z * np.conj(params.c) * params.c**n
    expected[:, 3] = np.conj(params.c) * params.c**n
    assert np.max(np.abs(psi - expected)) < 1e-12


def test_discriminant_formulas():
    p = LocalModelParams(0.5, 0.3 + 0.4j, 0.7, np.sqrt(0.5**2 + 0.25))
    assert abs(discriminant(p) - (abs(p.c) ** 2 - 1.0) ** 2) < 1e-12
    p = LocalModelParams(0.0, 0.0, 0.5, 0.0)
    assert abs(discriminant(p) - 0.5625) < 1e-15
    p = LocalModelParams(0.0, 0.0, 1.0, 0.0)
    assert discriminant(p) == 0.0


def test_kernel_classification_model_points():
    cls = kernel_classification(LocalModelParams(0.0, 0.0, 0.5, 0.0))
    assert cls.kind == KernelKind.DIM2
    v1 = cls.basis[0].value(np.array([1, 2, 3]))
    assert np.allclose(v1[:, 0], [1.0, 0.5, 0.25])

    cls = kernel_classification(LocalModelParams(0.6, 0.8, 0.3, 1.0))
    assert cls.kind == KernelKind.DIM1
    vec = cls.basis[0].value(1)
    assert np.allclose(vec, [2.0, 0.0, 0.0, 1.0])

    cls = kernel_classification(LocalModelParams(0.0, 0.0, 0.0, 1.0))
    assert cls.kind == KernelKind.INFINITE

    cls = kernel_classification(LocalModelParams(0.5, 0.0, 0.3, -0.5))
    assert cls.kind == KernelKind.DIM1
    assert np.allclose(cls.basis[0].value(1), [0.0, 0.0, 0.0, 1.0])


def test_kernel_classification_boundary_degenerate():
    with pytest.raises(BoundaryDegenerateError):
        kernel_classification(LocalModelParams(0.0, 0.0, 1.0 - 1e-10, 0.0))
    # away from any kernel clause the degeneration circle is just "no solution"
    cls = kernel_classification(LocalModelParams(0.5, 0.4, 1.0, 0.123))
    assert cls.kind == KernelKind.NO_SOLUTION


def test_kernel_vectors_decay_geometrically():
    cls = kernel_classification(LocalModelParams(0.6, 0.8, 0.35 + 0.2j, 1.0))
    vec = cls.basis[0]
    vals = vec.value(np.arange(1, 30))
    norms = np.linalg.norm(vals, axis=1)
    ratios = norms[1:] / norms[:-1]
    assert np.allclose(ratios, abs(0.35 + 0.2j), rtol=1e-12)


def test_zero_coupling_uses_first_site_convention():
    cls = kernel_classification(LocalModelParams(0.0, 0.0, 0.0, 0.0))
    assert cls.kind == KernelKind.DIM2
    v = cls.basis[0].value(np.array([1, 2, 5]))
    assert np.allclose(v[0], [1, 0, 0, 0])
    assert np.allclose(v[1:], 0.0)


def test_nonpositive_discriminant_means_no_solution():
    rng = np.random.default_rng(9)
    count = 0
    for _ in range(500):
        a = rng.uniform(-1, 1)
        b = rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)
        c = rng.uniform(0.1, 1.6) * np.exp(2j * np.pi * rng.uniform())
        lo = a * a + abs(b) ** 2 + (abs(c) - 1.0) ** 2
        hi = a * a + abs(b) ** 2 + (abs(c) + 1.0) ** 2
        e = np.sqrt(rng.uniform(lo, hi))  # straddles the first factor only
        p = LocalModelParams(a, b, c, e)
        if discriminant(p) <= 0.0:
            count += 1
            assert kernel_classification(p).kind == KernelKind.NO_SOLUTION
    assert count > 400


def test_effective_hamiltonian_values():
    assert np.array_equal(effective_hamiltonian(0.0, 0.0), np.zeros((2, 2)))
    assert np.array_equal(effective_hamiltonian(1.0, 0.0), np.diag([1.0, -1.0]).astype(complex))
    a, b = 0.3, 0.4 - 0.5j
    w = np.linalg.eigvalsh(effective_hamiltonian(a, b))
    s = np.sqrt(a * a + abs(b) ** 2)
    assert np.allclose(np.sort(w), [-s, s])


def test_oracle_equivalence_small_batch():
    ok, detail = oracle_equivalence(n_samples=80, seed=7)
    assert ok, detail
