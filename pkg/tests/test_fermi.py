"""Fermi-point location, signs, indices, spectral flow and symmetry checks."""

import warnings

import numpy as np
import pytest

from bulkedge.catalog import get_entry, stabilized, with_broken_time_reversal
from bulkedge.errors import NotAFermiPointError
from bulkedge.fermi import (
    EdgeFamily,
    certify_local_block,
    check_evenness,
    edge_index,
    find_fermi_points,
    sign_at,
    spectral_flow,
    verify_bulk_edge,
)
from bulkedge.localmodel import chain2_symbol
from bulkedge.manifolds import Torus
from bulkedge.selftest import hn_expected_points

ROOT3_HALF = np.sqrt(3.0) / 2.0


def _locations(points):
    return sorted(tuple(np.round(p.location, 8)) for p in points)


def test_find_fermi_points_example2():
    edge = get_entry("example2").require_edge()
    points = find_fermi_points(edge, 64)
    assert len(points) == 1
    assert np.linalg.norm(points[0].location - np.array([0, 0, 0, 1.0])) < 1e-8
    assert abs(points[0].c_value) < 1e-8


def test_find_fermi_points_example3():
    edge = get_entry("example3").require_edge()
    points = find_fermi_points(edge, 64)
    expected = hn_expected_points(1)
    assert len(points) == 2
    for fp in points:
        assert min(np.linalg.norm(fp.location - e) for e in expected) < 1e-8
        assert abs(abs(fp.c_value) - np.sqrt(2.0 - np.sqrt(3.0))) < 1e-9


def test_find_fermi_points_hn3_union_formula():
    edge = get_entry("hn:3").require_edge()
    points = find_fermi_points(edge, 64)
    expected = hn_expected_points(3)
    assert len(points) == 6
    for fp in points:
        assert min(edge.manifold.distance(fp.location, e) for e in expected) < 1e-8


def test_signs_match_worked_values():
    edge2 = get_entry("example2").require_edge()
    fp = sign_at(edge2, find_fermi_points(edge2, 64)[0])
    assert fp.sign == -1 and abs(fp.det_jacobian - 1.0) < 1e-10

    edge3 = get_entry("example3").require_edge()
    for fp in find_fermi_points(edge3, 64):
        sign_at(edge3, fp)
        assert fp.sign == +1
        assert abs(fp.det_jacobian + ROOT3_HALF) < 1e-10

    edge4 = get_entry("example4").require_edge()
    fp = sign_at(edge4, find_fermi_points(edge4, 64)[0])
    assert fp.sign == +1 and abs(fp.det_jacobian - 1.0) < 1e-10

    edge1 = get_entry("example1").require_edge()
    fp = sign_at(edge1, find_fermi_points(edge1, 64)[0])
    assert fp.sign == +1 and abs(fp.det_jacobian + 1.0) < 1e-10


def test_analytic_and_numeric_jacobians_agree():
    for name in ("example1", "example2", "example3", "example4", "hn:2"):
        edge = get_entry(name).require_edge()
        for fp in find_fermi_points(edge, 64):
            analytic = sign_at(edge, fp, method="analytic")
            det_a = analytic.det_jacobian
            numeric = sign_at(edge, fp, method="numeric")
            assert analytic.sign == numeric.sign
            assert abs(det_a - numeric.det_jacobian) < 1e-6


def test_edge_index_values():
    for name, expected in (("example1", 1), ("example2", -1), ("example3", 2),
                           ("example4", 1), ("hn:2", 4)):
        index, _ = edge_index(get_entry(name).require_edge(), 64)
        assert index == expected


def test_edge_index_empty_for_gapped_family():
    def residual(pts):
        pts = np.asarray(pts, dtype=float)
        b = np.exp(1j * pts[..., 0])  # never vanishes
        return np.stack([np.real(b), np.imag(b), 2.0 + 0.0 * pts[..., 0]], axis=-1)

    family = EdgeFamily(
        family_id="gapped",
        manifold=Torus(3),
        parity="odd",
        residual=residual,
        constraint=lambda pts: np.zeros(np.asarray(pts).shape[:-1], dtype=complex),
        symbol_at=lambda p: chain2_symbol(2.0, 0.0),
        effective_block=lambda p: np.array([[2.0]], dtype=complex),
    )
    index, points = edge_index(family, 32)
    assert index == 0 and points == []


def test_degenerate_zero_is_a_hard_error():
    def residual(pts):
        pts = np.asarray(pts, dtype=float)
        return np.sin(pts[..., :1]) ** 2  # quadratic zero at k = 0

    family = EdgeFamily(
        family_id="degenerate",
        manifold=Torus(1),
        parity="odd",
        residual=residual,
        constraint=lambda pts: np.zeros(np.asarray(pts).shape[:-1], dtype=complex),
        symbol_at=lambda p: chain2_symbol(0.0, 0.0),
        effective_block=lambda p: np.zeros((1, 1), dtype=complex),
    )
    points = find_fermi_points(family, 64)
    assert len(points) >= 1
    with pytest.raises(NotAFermiPointError):
        sign_at(family, points[0])


def test_spectral_flow_example1_and_reversal():
    edge = get_entry("example1").require_edge()
    assert spectral_flow(edge, n_sites=60, samples=512, threads=2) == 1
    assert spectral_flow(edge.reversed(), n_sites=60, samples=512, threads=2) == -1


def test_spectral_flow_constant_family_is_zero():
    def symbol_at(point):
        return chain2_symbol(0.3, 0.2)

    family = EdgeFamily(
        family_id="constant",
        manifold=Torus(1),
        parity="odd",
        residual=lambda pts: 0.3 + 0.0 * np.asarray(pts, dtype=float)[..., :1],
        constraint=lambda pts: np.full(np.asarray(pts).shape[:-1], 0.2, dtype=complex),
        symbol_at=symbol_at,
        effective_block=lambda p: np.array([[0.3]], dtype=complex),
    )
    assert spectral_flow(family, n_sites=40, samples=64) == 0


def test_spectral_flow_equals_edge_index_on_the_circle():
    edge = get_entry("example1").require_edge()
    index, _ = edge_index(edge, 64)
    assert spectral_flow(edge, n_sites=60, samples=256) == index


def test_check_evenness_passes_on_symmetric_families():
    rep = check_evenness(get_entry("example3").require_edge(), seed=11)
    assert rep.ok and rep.index == 2 and rep.index_even
    rep = check_evenness(get_entry("hn:2").require_edge(), seed=11)
    assert rep.ok and rep.index == 4
    # the two points of example3 pair into one orbit with equal signs
    assert rep.pairing_ok and rep.signs_ok and rep.fixed_point_ok


def test_check_evenness_detects_broken_symmetry():
    broken = with_broken_time_reversal(get_entry("example3"))
    rep = check_evenness(broken.require_edge(), seed=11)
    assert not rep.ok and not rep.ai_ok
    assert rep.ai_deviation > 0.01
    assert "time-reversal" in rep.failure


def test_verify_bulk_edge_explicit_grid():
    entry = get_entry("hn:1")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = verify_bulk_edge(entry.require_bulk(), entry.require_edge(), grid=12)
    assert out["bulk_c2"] == -2
    assert out["edge_index"] == 2
    assert out["bulk_edge_ok"]


def test_stabilized_entry_preserves_edge_structure():
    entry = stabilized(get_entry("hn:1"))
    index, points = edge_index(entry.require_edge(), 64)
    assert index == 2 and len(points) == 2
    sym = entry.require_edge().symbol_at(points[0].location)
    assert sym.rank == 6


def test_certify_local_block_at_example3_points():
    edge = get_entry("example3").require_edge()
    for fp in find_fermi_points(edge, 64):
        out = certify_local_block(edge, fp, n_sites=60)
        assert out["ok"], out
        assert out["max_deviation"] <= out["tolerance"]


def test_certify_local_block_example1():
    edge = get_entry("example1").require_edge()
    fp = find_fermi_points(edge, 64)[0]
    out = certify_local_block(edge, fp, n_sites=60)
    assert out["ok"], out
