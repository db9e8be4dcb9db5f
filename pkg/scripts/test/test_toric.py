#!/usr/bin/env python3
"""
Tests for fans, moment polytopes, monomial valuations and sweeps.
"""
from fractions import Fraction

import pytest

from scripts.toric import (
    FanPair,
    Polytope,
    is_primitive,
    lattice_section_count,
    lattice_volume_estimate,
    moment_polytope,
    polytope_barycenter,
    polytope_volume,
    primitive_vectors,
    product_of_lines_fan,
    projective_space_fan,
    toric_beta,
    toric_log_discrepancy,
    toric_report,
    toric_sweep,
    toric_volume_curve,
)
from scripts.dim1 import GENERIC, P1Pair, p1_betahat, p1_report, p1_volume_curve
from scripts.utils.errors import PreconditionError
from scripts.volfun import Polynomial


@pytest.fixture(scope="module")
def p2():
    fan = projective_space_fan(2)
    return fan, moment_polytope(fan)


def cube_fan() -> FanPair:
    """Cones over the faces of [-1, 1]^3: Fano, but not simplicial."""
    corners = [(x, y, z) for x in (1, -1) for y in (1, -1) for z in (1, -1)]
    cones = []
    for axis in range(3):
        for sign in (1, -1):
            cones.append([i for i, c in enumerate(corners) if c[axis] == sign])
    return FanPair.from_lists(corners, cones)


def test_p2_polytope(p2):
    _, polytope = p2
    assert set(polytope.vertices) == {(-1, -1), (2, -1), (-1, 2)}
    assert polytope_volume(polytope) == Fraction(9, 2)
    assert polytope_barycenter(polytope) == (0, 0)
    assert polytope.normalized_volume == 9
    assert polytope.contains((0, 0)) and polytope.interior_contains((0, 0))
    assert not polytope.interior_contains((-1, 0))
    assert polytope.support_range((1, 0)) == (-1, 2)


def test_polytope_rejects_unbounded_and_empty():
    with pytest.raises(PreconditionError, match="unbounded"):
        Polytope.from_constraints([((1, 0), 1), ((0, 1), 1)])
    with pytest.raises(PreconditionError):
        Polytope.from_constraints([((1,), -1), ((-1,), -1)])


def test_cube_and_its_slices():
    cube = Polytope.from_constraints([((1, 0, 0), 1), ((-1, 0, 0), 1), ((0, 1, 0), 1),
                                      ((0, -1, 0), 1), ((0, 0, 1), 1), ((0, 0, -1), 1)])
    assert cube.volume == 8
    assert cube.barycenter == (0, 0, 0)
    assert cube.slice_volume((1, 0, 0), Fraction(0)) == 4
    assert cube.slice_volume((1, 1, 1), Fraction(3)) == 0


def test_log_discrepancy(p2):
    fan, _ = p2
    assert toric_log_discrepancy(fan, (1, 0)) == 1
    assert toric_log_discrepancy(fan, (1, 1)) == 2
    assert toric_log_discrepancy(fan, (2, 1)) == 3
    assert toric_log_discrepancy(fan, (-1, 0)) == 2
    with pytest.raises(PreconditionError):
        toric_log_discrepancy(fan, (0, 0))


def test_log_discrepancy_with_boundary():
    fan = product_of_lines_fan(2, ["1/2", 0, 0, 0])
    assert toric_log_discrepancy(fan, (1, 0)) == Fraction(1, 2)
    assert toric_log_discrepancy(fan, (1, 1)) == Fraction(3, 2)


def test_volume_curves_on_p2(p2):
    _, polytope = p2
    line = toric_volume_curve(polytope, (1, 0))
    assert line.tau == 3
    assert line.body.canonical().pieces == (Polynomial.from_coefficients([9, -6, 1]),)
    diagonal = toric_volume_curve(polytope, (1, 1))
    assert diagonal.tau == 3
    assert diagonal.body.canonical().pieces == (Polynomial.from_coefficients([9, 0, -1]),)
    weighted = toric_volume_curve(polytope, (2, 1))
    assert weighted.tau == 6
    assert weighted.body.breakpoints == (0, 3, 6)
    with pytest.raises(PreconditionError):
        toric_volume_curve(polytope, (2, 2))


def test_beta_vanishes_on_p2(p2):
    fan, polytope = p2
    for v in [(1, 0), (1, 1), (2, 1), (-1, -1), (3, -2)]:
        assert toric_beta(fan, v, polytope) == 0


def test_report_with_boundary_is_unstable():
    fan = product_of_lines_fan(2, ["1/2", 0, 0, 0])
    polytope = moment_polytope(fan)
    assert polytope.volume == 3
    assert polytope.barycenter == (Fraction(1, 4), 0)
    _, report = toric_report(fan, (1, 0), polytope)
    assert report.A == Fraction(1, 2)
    assert report.beta == Fraction(-3, 2)
    assert report.betahat == Fraction(-1, 2)
    _, opposite = toric_report(fan, (-1, 0), polytope)
    assert opposite.betahat == Fraction(1, 4)


def test_fan_validation():
    with pytest.raises(PreconditionError, match="primitive"):
        FanPair.from_lists([(2, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (2, 0)])
    with pytest.raises(PreconditionError, match="klt"):
        projective_space_fan(2, [1, 0, 0])
    with pytest.raises(PreconditionError, match="complete"):
        FanPair.from_lists([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2)])


def test_not_log_fano():
    # the second Hirzebruch surface is only weak Fano
    f2 = FanPair.from_lists([(1, 0), (0, 1), (-1, 2), (0, -1)], [(0, 1), (1, 2), (2, 3), (3, 0)])
    with pytest.raises(PreconditionError, match="not log Fano in toric model"):
        moment_polytope(f2)


def test_non_simplicial_fan():
    fan = cube_fan()
    assert not fan.is_simplicial
    assert moment_polytope(fan).volume == Fraction(4, 3)
    with pytest.raises(PreconditionError, match="non-simplicial"):
        toric_log_discrepancy(fan, (1, 0, 0))


def test_three_dimensional_product():
    fan = product_of_lines_fan(3)
    polytope = moment_polytope(fan)
    assert polytope.normalized_volume == 48
    curve, report = toric_report(fan, (1, 0, 0), polytope)
    assert curve.tau == 2
    assert report.S == 1 and report.betahat == 0


def test_lattice_counts(p2):
    _, polytope = p2
    assert lattice_section_count(polytope, (1, 0), 1, 0) == 10
    assert lattice_section_count(polytope, (1, 0), 1, 1) == 6
    estimate = lattice_volume_estimate(polytope, (1, 0), 30, Fraction(1, 2))
    exact = toric_volume_curve(polytope, (1, 0))(Fraction(1, 2))
    assert abs(estimate - exact) / exact < Fraction(1, 10)
    with pytest.raises(PreconditionError):
        lattice_section_count(polytope, (1, 0), 0, 0)


def test_lattice_count_needs_cartier_multiple():
    polytope = moment_polytope(product_of_lines_fan(2, ["1/2", 0, 0, 0]))
    with pytest.raises(PreconditionError, match="Cartier"):
        lattice_section_count(polytope, (1, 0), 1, 0)
    assert lattice_section_count(polytope, (1, 0), 2, 0) == 20


def test_primitive_vectors():
    vectors = primitive_vectors(2, 1)
    assert len(vectors) == 8
    assert all(is_primitive(v) for v in vectors)
    assert (2, 0) not in primitive_vectors(2, 2)
    with pytest.raises(PreconditionError):
        primitive_vectors(2, 0)


def test_sweep_on_p2_is_sorted_and_flags_minima(p2):
    fan, _ = p2
    entries = toric_sweep(fan, 2, max_workers=2)
    assert len(entries) == len(primitive_vectors(2, 2))
    keys = [(e.report.betahat, e.v) for e in entries]
    assert keys == sorted(keys)
    assert all(e.report.betahat == 0 and e.is_minimum for e in entries)
    assert all(e.curve is not None for e in entries)


def test_sweep_with_boundary_finds_the_destabilizer():
    fan = product_of_lines_fan(2, ["1/2", 0, 0, 0])
    entries = toric_sweep(fan, 1)
    assert entries[0].v == (1, 0)
    assert [e.v for e in entries if e.is_minimum] == [(1, 0)]
    data = entries[0].to_dict()
    assert data["v"] == [1, 0] and data["betahat"] == "-1/2"


def test_one_dimensional_model_matches_p1():
    fan = product_of_lines_fan(1)
    polytope = moment_polytope(fan)
    assert sorted(polytope.vertices) == [(-1,), (1,)]
    curve = toric_volume_curve(polytope, (1,))
    assert curve.tau == 2
    assert curve.body.canonical().pieces == (Polynomial.from_coefficients([2, -1]),)
    assert curve.body.canonical() == p1_volume_curve(P1Pair(())).body.canonical()
    expected = p1_report(P1Pair(()), GENERIC)
    entries = toric_sweep(fan, 1)
    assert sorted(e.v for e in entries) == [(-1,), (1,)]
    for entry in entries:
        assert entry.report.betahat == p1_betahat(P1Pair(()), GENERIC) == 0
        assert entry.report.S == expected.S
        assert entry.report.A == expected.A
