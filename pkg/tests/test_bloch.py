"""Spectral projectors and lattice Chern numbers."""

import warnings

import numpy as np
import pytest

from bulkedge.bloch import (
    BlochFamily,
    check_ai_symmetry,
    first_chern_number,
    gauge_transformed_second_chern,
    negative_projector,
    second_chern_number,
    second_chern_two_resolution,
)
from bulkedge.catalog import get_entry
from bulkedge.errors import GaplessInputError, InvalidArgumentError

S1 = np.array([[0, 1], [1, 0]], dtype=complex)
S2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
S3 = np.array([[1, 0], [0, -1]], dtype=complex)


def qwz(m):
    def eval_h(k1, k2):
        k1, k2 = np.broadcast_arrays(np.asarray(k1, float), np.asarray(k2, float))
        d1, d2 = np.sin(k1), np.sin(k2)
        d3 = m - np.cos(k1) - np.cos(k2)
        return (d1[..., None, None] * S1 + d2[..., None, None] * S2
                + d3[..., None, None] * S3)

    return BlochFamily(dim=2, rank=2, eval=eval_h, name=f"qwz-{m}")


def product_family(m1, m2):
    def eval_h(k1, k2, k3, k4):
        k1, k2, k3, k4 = np.broadcast_arrays(*[np.asarray(k, float) for k in (k1, k2, k3, k4)])
        out = np.zeros(k1.shape + (4, 4), dtype=complex)
        out[..., :2, :2] = qwz(m1).eval(k1, k2)
        out[..., 2:, 2:] = qwz(m2).eval(k3, k4)
        return out

    return BlochFamily(dim=4, rank=4, eval=eval_h, name="product")


def test_negative_projector_diagonal_cases():
    p = negative_projector(np.diag([-1.0, 1.0]).astype(complex))
    assert np.allclose(p.matrix, np.diag([1.0, 0.0]))
    assert p.rank == 1
    p = negative_projector((-np.eye(4)).astype(complex))
    assert np.allclose(p.matrix, np.eye(4))
    assert p.rank == 4


def test_negative_projector_on_catalog_bulk():
    bulk = get_entry("hn:1").require_bulk()
    h = bulk.evaluate(np.zeros(4))
    p = negative_projector(h)
    assert p.rank == 2
    assert np.max(np.abs(p.matrix @ p.matrix - p.matrix)) < 1e-12
    assert np.max(np.abs(p.matrix - p.matrix.conj().T)) < 1e-12


def test_negative_projector_rejects_gapless():
    with pytest.raises(GaplessInputError):
        negative_projector(np.diag([0.0, 1.0]).astype(complex))


def test_projector_invariants_at_random_momenta():
    bulk = get_entry("hn:1").require_bulk()
    rng = np.random.default_rng(0)
    for _ in range(25):
        p = negative_projector(bulk.evaluate(rng.uniform(0, 2 * np.pi, 4)))
        assert p.rank == 2
        assert np.max(np.abs(p.matrix @ p.matrix - p.matrix)) < 1e-12


def test_constant_family_has_zero_c2():
    const = np.diag([-1.0, -1.0, 1.0, 1.0]).astype(complex)

    def eval_h(k1, k2, k3, k4):
        shape = np.broadcast_arrays(*[np.asarray(k, float) for k in (k1, k2, k3, k4)])[0].shape
        return np.broadcast_to(const, shape + (4, 4)).copy()

    family = BlochFamily(dim=4, rank=4, eval=eval_h, name="const")
    res = second_chern_number(family, grid=8)
    assert res.rounded == 0
    assert abs(res.raw) < 1e-12


def test_first_chern_matches_degree_count():
    # degrees of the two-band model by counting oriented preimages of the pole
    assert first_chern_number(qwz(1.0), grid=40).rounded == -1
    assert first_chern_number(qwz(-1.0), grid=40).rounded == 1
    assert first_chern_number(qwz(3.0), grid=40).rounded == 0
    assert first_chern_number(qwz(1.0), grid=40).quality < 1e-10


def test_second_chern_product_family_is_product_of_first():
    for m1, m2, expected in [(1.0, 1.0, 1), (1.0, -1.0, -1)]:
        res = second_chern_number(product_family(m1, m2), grid=8)
        assert res.rounded == expected
        assert res.quality < 1e-8


def test_second_chern_hn1_two_resolution():
    bulk = get_entry("hn:1").require_bulk()
    lo, hi, agree = second_chern_two_resolution(bulk, grids=(12, 16))
    assert agree
    assert lo.rounded == hi.rounded == -2
    assert hi.quality < lo.quality  # refinement moves toward the integer


def test_second_chern_requires_four_dims_and_sane_grid():
    with pytest.raises(InvalidArgumentError):
        second_chern_number(qwz(1.0), grid=12)
    with pytest.raises(InvalidArgumentError):
        second_chern_number(product_family(1.0, 1.0), grid=4)


def test_gauge_invariance_of_raw_value():
    bulk = get_entry("hn:1").require_bulk()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        base = second_chern_number(bulk, grid=8).raw
        gauged = gauge_transformed_second_chern(bulk, grid=8, seed=123)
    assert abs(base - gauged) < 1e-12


def test_orientation_reversal_flips_c2():
    bulk = get_entry("hn:1").require_bulk()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        forward = second_chern_number(bulk, grid=12)
        backward = second_chern_number(bulk.reversed_axis(0), grid=12)
    assert forward.rounded == -2
    assert backward.rounded == 2
    # raw values differ by corner-plaquette asymmetry, not by more than O(h)
    assert abs(forward.raw + backward.raw) < 0.1


def test_direct_sum_with_gapped_block_keeps_c2():
    bulk = get_entry("hn:1").require_bulk()
    stabilized = bulk.direct_sum(np.diag([-1.0, 1.0]).astype(complex))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        a = second_chern_number(bulk, grid=12)
        b = second_chern_number(stabilized, grid=12)
    assert b.negative_bands == a.negative_bands + 1
    assert abs(a.raw - b.raw) < 1e-10


def test_ai_symmetry_checks():
    ok, dev = check_ai_symmetry(get_entry("hn:1").require_bulk(), samples=2000, seed=1)
    assert ok and dev < 1e-12

    # sin(k) s2 + cos(k) s3 conjugates into itself at -k: genuinely symmetric
    def sym_eval(k1):
        k1 = np.asarray(k1, float)
        return np.sin(k1)[..., None, None] * S2 + np.cos(k1)[..., None, None] * S3

    ok, _ = check_ai_symmetry(BlochFamily(1, 2, sym_eval), samples=500, seed=2)
    assert ok

    # cos(k) s2 + sin(k) s3 breaks the symmetry
    def broken_eval(k1):
        k1 = np.asarray(k1, float)
        return np.cos(k1)[..., None, None] * S2 + np.sin(k1)[..., None, None] * S3

    ok, dev = check_ai_symmetry(BlochFamily(1, 2, broken_eval), samples=500, seed=3)
    assert not ok and dev > 0.1


def test_constant_real_family_is_ai_symmetric():
    const = np.array([[0.0, 2.0], [2.0, 1.0]], dtype=complex)

    def eval_h(k1):
        shape = np.asarray(k1, float).shape
        return np.broadcast_to(const, shape + (2, 2)).copy()

    ok, dev = check_ai_symmetry(BlochFamily(1, 2, eval_h), samples=200, seed=4)
    assert ok and dev == 0.0


def test_hermiticity_defect_is_tiny_for_catalog():
    assert get_entry("hn:2").require_bulk().hermiticity_defect(samples=100) < 1e-12
