"""Block symbols, truncations and certified low-energy windows."""

import numpy as np
import pytest

from bulkedge.catalog import get_entry
from bulkedge.errors import (
    CutoffInsufficientError,
    InvalidArgumentError,
    WindowBoundaryError,
)
from bulkedge.localmodel import local_blocks, local_symbol
from bulkedge.toeplitz import (
    BlockSymbol,
    auto_window,
    fredholm_check,
    low_energy_window,
    symbol_from_bulk,
    truncate,
)


def test_symbol_from_bulk_recovers_model_blocks():
    bulk = get_entry("hn:1").require_bulk()
    kappa = np.array([1.1, 2.3, 0.7])
    symbol = symbol_from_bulk(bulk, kappa, fourier_cutoff=2)
    a = -np.cos(kappa[1] + kappa[2])
    b = -1.0 - np.exp(-1j * kappa[0]) - np.exp(-1j * kappa[1])
    c = -1.0 - np.exp(-1j * kappa[2])
    hop, onsite = local_blocks(a, b, c)
    assert symbol.max_degree == 1
    assert np.max(np.abs(symbol.coeffs[0] - onsite)) < 1e-13
    assert np.max(np.abs(symbol.coeffs[1] - hop)) < 1e-13
    assert np.max(np.abs(symbol.coeffs[-1] - hop.conj().T)) < 1e-13


def test_symbol_from_constant_family_has_only_degree_zero():
    from bulkedge.bloch import BlochFamily

    const = np.diag([-1.0, 1.0]).astype(complex)

    def eval_h(k1, k2):
        shape = np.broadcast_arrays(np.asarray(k1, float), np.asarray(k2, float))[0].shape
        return np.broadcast_to(const, shape + (2, 2)).copy()

    family = BlochFamily(dim=2, rank=2, eval=eval_h)
    symbol = symbol_from_bulk(family, np.array([0.4]))
    assert set(symbol.coeffs) == {0}


def test_symbol_cutoff_insufficient_raises():
    from bulkedge.bloch import BlochFamily

    def eval_h(k1, k2):
        k1, k2 = np.broadcast_arrays(np.asarray(k1, float), np.asarray(k2, float))
        out = np.zeros(k1.shape + (1, 1), dtype=complex)
        out[..., 0, 0] = 2.0 * np.cos(2.0 * k2) + 3.0
        return out

    family = BlochFamily(dim=2, rank=1, eval=eval_h)
    with pytest.raises(CutoffInsufficientError):
        symbol_from_bulk(family, np.array([0.0]), fourier_cutoff=1)


def test_fredholm_criterion_on_model_points():
    ok, smin = fredholm_check(local_symbol(0.0, 0.0, 0.5))
    assert ok and smin > 0.4
    ok, smin = fredholm_check(local_symbol(0.0, 0.0, 1.0))
    assert not ok and smin < 1e-8
    ok, smin = fredholm_check(local_symbol(1.0, 0.0, 0.0))
    # hermitian symbol: singular values are |eigenvalues| = sqrt(a^2 + 1)
    assert ok and abs(smin - np.sqrt(2.0)) < 1e-12


def test_truncate_scalar_shift_pattern():
    symbol = BlockSymbol(rank=1, coeffs={1: np.array([[1.0 + 0.0j]])})
    trunc = truncate(symbol, 8)
    expected3 = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)
    assert np.array_equal(trunc.matrix[:3, :3], expected3)
    with pytest.raises(InvalidArgumentError):
        truncate(symbol, 3)


def test_truncate_block_pattern_matches_model():
    a, b, c = 0.2, 0.3 - 0.1j, 0.4 + 0.2j
    hop, onsite = local_blocks(a, b, c)
    trunc = truncate(local_symbol(a, b, c), 8)
    assert np.array_equal(trunc.matrix[:4, :4], onsite.astype(complex))
    assert np.array_equal(trunc.matrix[4:8, :4], hop)
    assert np.array_equal(trunc.matrix[:4, 4:8], hop.conj().T)
    assert np.array_equal(trunc.matrix[:4, 8:12], np.zeros((4, 4)))


def test_truncation_is_bitwise_hermitian():
    trunc = truncate(local_symbol(0.37, 0.21 + 0.64j, -0.3 + 0.52j), 24)
    assert np.array_equal(trunc.matrix, trunc.matrix.conj().T)


def test_boundary_eigenvalue_converges_when_decay_is_compact():
    # with vanishing third coupling the boundary vector lives on one site,
    # so the truncated eigenvalue is exact
    for n_sites in (40, 60):
        trunc = truncate(local_symbol(0.6, 0.8, 0.0), n_sites)
        evals = np.linalg.eigvalsh(trunc.matrix)
        assert np.min(np.abs(evals - 1.0)) < 1e-10


def test_window_examples_from_model():
    win = low_energy_window(truncate(local_symbol(0.0, 0.0, 0.5), 60), 1.3)
    cert = win.certified
    assert len(cert) == 2
    assert all(abs(p.eigenvalue) < 1e-12 for p in cert)

    win = low_energy_window(truncate(local_symbol(0.6, 0.8, 0.3), 60), 1.3)
    vals = np.sort(win.certified_eigenvalues())
    assert len(vals) == 2
    assert np.allclose(vals, [-1.0, 1.0], atol=1e-10)

    win = low_energy_window(truncate(local_symbol(2.0, 0.0, 0.0), 60), 1.3)
    assert len(win.certified) == 0


def test_window_boundary_collision_raises():
    trunc = truncate(local_symbol(0.6, 0.8, 0.3), 40)
    evals = np.linalg.eigvalsh(trunc.matrix)
    mu = float(abs(evals[len(evals) // 3]))
    with pytest.raises(WindowBoundaryError):
        low_energy_window(trunc, mu)


def test_right_edge_modes_are_flagged_spurious():
    win = low_energy_window(truncate(local_symbol(0.0, 0.0, 0.5), 60), 1.3)
    mirror = [p for p in win.spurious if abs(p.eigenvalue) < 1e-10]
    assert len(mirror) == 2
    assert all(p.weight < 0.1 for p in mirror)


def test_certified_eigenvalues_match_exact_boundary_energies():
    rng = np.random.default_rng(21)
    for n_sites in (30, 60):
        for _ in range(8):
            a = rng.uniform(-0.8, 0.8)
            b = rng.uniform(-0.8, 0.8) + 1j * rng.uniform(-0.8, 0.8)
            c = rng.uniform(0.1, 0.85) * np.exp(2j * np.pi * rng.uniform())
            s = float(np.sqrt(a * a + abs(b) ** 2))
            if s < 0.05:
                continue
            tol = 10.0 * abs(c) ** n_sites + 1e-10
            win = low_energy_window(
                truncate(local_symbol(a, b, c), n_sites), s + 0.45,
                pair_tol=max(1e-2, 2 * tol),
            )
            vals = np.sort(win.certified_eigenvalues())
            assert len(vals) == 2
            assert np.max(np.abs(vals - [-s, s])) <= tol


def test_certified_vector_matches_exact_boundary_vector():
    n_sites = 60
    a, b, c = 0.6, 0.8, 0.3
    e = 1.0
    win = low_energy_window(truncate(local_symbol(a, b, c), n_sites), 1.3)
    top = [p for p in win.certified if p.eigenvalue > 0][0]
    n = np.arange(n_sites)
    exact = np.zeros((n_sites, 4), dtype=complex)
    exact[:, 0] = ((a + e) / b) * c**n
    exact[:, 3] = c**n
    exact = exact.reshape(-1)
    exact /= np.linalg.norm(exact)
    assert abs(np.vdot(exact, top.vector)) > 1.0 - 1e-8


def test_window_stability_within_a_spectral_gap():
    trunc = truncate(local_symbol(0.6, 0.8, 0.3), 60)
    # boundary energies sit at +-1; the continuum starts at ~1.22
    win_a = low_energy_window(trunc, 1.05)
    win_b = low_energy_window(trunc, 1.15)
    assert np.array_equal(win_a.certified_eigenvalues(), win_b.certified_eigenvalues())


def test_auto_window_is_half_the_bulk_gap():
    symbol = local_symbol(0.0, 0.0, 0.5)
    assert abs(auto_window(symbol) - 0.25) < 1e-6
