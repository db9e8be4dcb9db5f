#!/usr/bin/env python3
"""
Tests for pairs on P^1: verdicts, witnesses and cyclic covers.
"""
from fractions import Fraction

import pytest
import sympy

from scripts.dim1 import (
    GENERIC,
    INFINITY,
    CyclicCover,
    P1Pair,
    P1Valuation,
    VerdictKind,
    check_cover_monotonicity,
    check_cover_pointwise,
    check_cover_volume,
    check_minimizer_is_extremal,
    cover_pullback,
    format_coordinate,
    p1_betahat,
    p1_delta_threshold,
    p1_log_discrepancy,
    p1_report,
    p1_verdict,
    p1_volume_curve,
    parse_coordinate,
    valuations_of,
)
from scripts.utils.errors import CoverCompatibilityError, DomainRangeError, PreconditionError

HALF = Fraction(1, 2)


def three_half_points() -> P1Pair:
    return P1Pair.from_points([("0", HALF), ("inf", HALF), ("1", HALF)])


def test_parse_coordinate():
    assert parse_coordinate("inf") == INFINITY
    assert parse_coordinate("∞") == INFINITY
    assert parse_coordinate("1/2") == sympy.Rational(1, 2)
    assert parse_coordinate("sqrt(2)") == sympy.sqrt(2)
    assert format_coordinate(INFINITY) == "inf"
    with pytest.raises(PreconditionError):
        parse_coordinate("x + 1")


def test_pair_validation():
    with pytest.raises(PreconditionError):
        P1Pair.from_points([("0", Fraction(3, 2))])
    with pytest.raises(PreconditionError):
        P1Pair.from_points([("0", HALF), ("0", HALF)])
    with pytest.raises(PreconditionError):
        P1Pair.from_points([("0", Fraction(9, 10)), ("1", Fraction(9, 10)), ("2", Fraction(1, 5))])


def test_degree_and_discrepancy():
    pair = three_half_points()
    assert pair.degree == HALF
    assert p1_log_discrepancy(pair, P1Valuation(parse_coordinate("1"))) == HALF
    assert p1_log_discrepancy(pair, GENERIC) == 1
    assert [v.label() for v in valuations_of(pair)] == ["[0]", "[inf]", "[1]", "generic"]
    curve = p1_volume_curve(pair)
    assert curve.tau == HALF and curve(Fraction(1, 4)) == Fraction(1, 4)


def test_report_matches_closed_form():
    pair = three_half_points()
    for v in valuations_of(pair):
        assert p1_report(pair, v).betahat == p1_betahat(pair, v)
    assert p1_betahat(pair, GENERIC) == Fraction(3, 4)


def test_three_half_points_is_uniformly_stable():
    verdict = p1_verdict(three_half_points())
    assert verdict.kind is VerdictKind.UNIFORMLY_K_STABLE
    assert verdict.epsilon_star == HALF
    assert verdict.witness is None
    assert verdict.minimizer.label() == "[0]"
    assert verdict.delta_star > 0
    data = verdict.to_dict()
    assert data["verdict"] == "UniformlyKStable"
    assert data["epsilon_star"] == "1/2"
    assert len(data["reports"]) == 4


def test_two_half_points_is_semistable_only():
    pair = P1Pair.from_points([("1", HALF), ("-1", HALF)])
    verdict = p1_verdict(pair)
    assert verdict.kind is VerdictKind.K_SEMISTABLE_ONLY
    assert verdict.epsilon_star == 0
    assert verdict.witness == P1Valuation(parse_coordinate("1"))
    assert p1_delta_threshold(pair) == 0


@pytest.mark.parametrize("c", [Fraction(1, 10), HALF, Fraction(9, 10)])
def test_single_point_is_unstable(c):
    pair = P1Pair.from_points([("0", c)])
    verdict = p1_verdict(pair)
    assert verdict.kind is VerdictKind.UNSTABLE
    assert verdict.witness.label() == "[0]"
    assert verdict.epsilon_star == -c / (2 * (1 - c))
    assert verdict.delta_star < 0


def test_empty_boundary():
    verdict = p1_verdict(P1Pair(()))
    assert verdict.kind is VerdictKind.K_SEMISTABLE_ONLY
    assert verdict.witness == GENERIC


def test_cover_pullback_of_three_half_points():
    upstairs = cover_pullback(three_half_points(), CyclicCover(2))
    assert upstairs == P1Pair.from_points([("1", HALF), ("-1", HALF)])
    assert upstairs.describe() == "1/2[1] + 1/2[-1]"


def test_cover_pullback_drops_zero_coefficients():
    pair = P1Pair.from_points([("0", HALF), ("inf", HALF)])
    assert cover_pullback(pair, CyclicCover(2)) == P1Pair(())


def test_cover_pullback_keeps_positive_ramified_coefficients():
    pair = P1Pair.from_points([("0", Fraction(3, 4)), ("inf", HALF)])
    upstairs = cover_pullback(pair, CyclicCover(2))
    assert upstairs.coefficient_at(sympy.Integer(0)) == HALF
    assert upstairs.coefficient_at(INFINITY) == 0


def test_cover_pullback_splits_irrational_preimages():
    pair = P1Pair.from_points([("0", HALF), ("inf", HALF), ("2", Fraction(1, 3))])
    upstairs = cover_pullback(pair, CyclicCover(2))
    assert [p.label() for p in upstairs.marked_points] == ["[sqrt(2)]", "[-sqrt(2)]"]


def test_cover_must_be_crepant_compatible():
    with pytest.raises(CoverCompatibilityError, match="cover not crepant-compatible"):
        cover_pullback(P1Pair.from_points([("1", HALF)]), CyclicCover(2))
    with pytest.raises(PreconditionError):
        CyclicCover(1)


def test_cover_lift_and_ramification():
    cover = CyclicCover(3)
    assert cover.ramification_index(sympy.Integer(0)) == 3
    assert cover.ramification_index(sympy.Integer(1)) == 1
    lifted = cover.lift(P1Valuation(sympy.Integer(1)))
    assert len(lifted) == 3
    assert lifted[0] == (P1Valuation(sympy.Integer(1)), 1)
    assert cover.lift(GENERIC) == [(GENERIC, 1)]


def test_cover_volume_and_descent():
    pair, cover = three_half_points(), CyclicCover(2)
    for v in valuations_of(pair):
        for x in (0, Fraction(1, 8), HALF):
            assert check_cover_volume(pair, cover, v, x)
    with pytest.raises(DomainRangeError):
        check_cover_volume(pair, cover, GENERIC, 1)
    assert check_cover_pointwise(pair, cover)
    assert check_cover_monotonicity(pair, cover)


def test_minimizer_is_the_heaviest_point():
    pair = P1Pair.from_points([("0", Fraction(1, 5)), ("1", Fraction(3, 5)), ("2", Fraction(1, 3))])
    verdict = p1_verdict(pair)
    assert verdict.minimizer == P1Valuation(parse_coordinate("1"))
    assert check_minimizer_is_extremal(pair)
    assert check_minimizer_is_extremal(P1Pair(()))
    assert p1_verdict(P1Pair(())).minimizer.is_generic


def test_degree_three_cover_of_two_thirds_points():
    pair = P1Pair.from_points([("0", Fraction(2, 3)), ("inf", Fraction(2, 3))])
    cover = CyclicCover(3)
    assert cover_pullback(pair, cover) == P1Pair(())
    assert p1_volume_curve(pair)(Fraction(1, 3)) == Fraction(1, 3)
    assert p1_volume_curve(P1Pair(()))(1) == 1
    assert check_cover_volume(pair, cover, GENERIC, Fraction(1, 3))


def test_cover_monotonicity_with_trivial_upstairs():
    pair = P1Pair.from_points([("0", HALF), ("inf", HALF)])
    cover = CyclicCover(2)
    assert p1_verdict(cover_pullback(pair, cover)).epsilon_star == 0
    assert p1_verdict(pair).epsilon_star == 0
    assert check_cover_monotonicity(pair, cover)
