#!/usr/bin/env python3
"""
Tests for invariant reports and the delta/epsilon threshold conversions.
"""
from fractions import Fraction

import pytest

from scripts.invariants import (
    InvariantReport,
    delta_from_epsilon,
    delta_from_prime,
    delta_prime,
    epsilon_from_delta,
    epsilon_from_prime,
    epsilon_prime,
    implication_one_to_two,
    implication_two_to_one,
    make_report,
    optimal_delta,
    predicate_one,
    predicate_two,
    quick_positive_bound,
    tau_bound_consistent,
    threshold_table,
)
from scripts.p2wb import PlaneDivisorCase, plane_divisor_report
from scripts.utils.errors import ConsistencyError, PreconditionError
from scripts.volfun import Polynomial, VolumeCurve


def line_curve() -> VolumeCurve:
    return VolumeCurve.from_pieces(2, [0, 3], [Polynomial.from_coefficients([9, -6, 1])])


def test_make_report_for_a_line_on_p2():
    report = make_report(2, Fraction(9), Fraction(1), line_curve())
    assert report.S == 1
    assert report.tau == 3
    assert report.beta == 0
    assert report.betahat == 0
    assert report.j == 18
    assert report.j_identity_holds()
    assert optimal_delta(report) == 0


def test_make_report_preconditions():
    with pytest.raises(PreconditionError):
        make_report(2, Fraction(9), Fraction(0), line_curve())
    with pytest.raises(ConsistencyError):
        make_report(2, Fraction(8), Fraction(1), line_curve())
    with pytest.raises(ConsistencyError):
        make_report(3, Fraction(9), Fraction(1), line_curve())


def test_report_dict_round_trip():
    report = make_report(2, Fraction(9), Fraction(3, 2), line_curve())
    data = report.to_dict(with_float=True)
    assert data["A"] == "3/2"
    assert "betahat_float" in data
    assert InvariantReport.from_dict(data) == report


def test_quick_positive_bound():
    assert quick_positive_bound(Fraction(3), Fraction(2), 2) == Fraction(1, 3)
    assert quick_positive_bound(Fraction(1), Fraction(2), 2) is None
    with pytest.raises(PreconditionError):
        quick_positive_bound(Fraction(0), Fraction(1), 1)


def test_conversions():
    assert delta_prime(Fraction(1, 2)) == 1
    assert delta_from_prime(Fraction(1)) == Fraction(1, 2)
    assert epsilon_prime(Fraction(1, 3)) == Fraction(1, 2)
    assert epsilon_from_prime(Fraction(1, 2)) == Fraction(1, 3)
    assert delta_from_epsilon(Fraction(1), 2) == Fraction(1, 3)
    assert epsilon_from_delta(Fraction(1), 2) == (Fraction(1, 5), Fraction(4, 5))
    assert epsilon_from_delta(Fraction(1), 1) == (Fraction(1, 3), Fraction(2, 3))
    assert epsilon_from_delta(Fraction(1, 100), 2) == (Fraction(1, 399), Fraction(4, 5))
    for bad in (Fraction(0), Fraction(1), Fraction(3, 2)):
        with pytest.raises(PreconditionError):
            delta_prime(bad)
        with pytest.raises(PreconditionError):
            epsilon_prime(bad)


def test_threshold_table_from_delta():
    params = threshold_table(2, delta=Fraction(1, 2))
    assert params.deltaPrime == 1
    assert params.theta == Fraction(4, 5)
    assert params.epsilonPrime == Fraction(1, 5)
    assert params.epsilon == Fraction(1, 6)


def test_threshold_table_from_epsilon():
    params = threshold_table(2, epsilon=Fraction(1, 2))
    assert params.epsilonPrime == 1
    assert params.deltaPrime == Fraction(1, 3)
    assert params.delta == Fraction(1, 4)
    assert params.theta is None
    assert "theta" not in params.to_dict()


def test_threshold_table_needs_exactly_one():
    with pytest.raises(PreconditionError):
        threshold_table(2)
    with pytest.raises(PreconditionError):
        threshold_table(2, delta=Fraction(1, 2), epsilon=Fraction(1, 2))
    with pytest.raises(PreconditionError):
        threshold_table(2, delta=Fraction(1))


def test_predicates_and_implications():
    # a point on P^1 with A = 1 and deg L = 1: S = 1/2, tau = 1
    curve = VolumeCurve.from_pieces(1, [0, 1], [Polynomial.from_coefficients([1, -1])])
    report = make_report(1, Fraction(1), Fraction(1), curve)
    assert report.betahat == Fraction(1, 2)
    assert predicate_two(report, Fraction(1))
    assert not predicate_two(report, Fraction(2))
    assert predicate_one(report, Fraction(1, 2))
    assert optimal_delta(report) == 1
    for t in (Fraction(1, 10), Fraction(1), Fraction(3)):
        assert implication_two_to_one(report, t)
        assert implication_one_to_two(report, t)
    assert tau_bound_consistent(report)


def test_conic_meets_the_betahat_inequality_with_equality():
    report = plane_divisor_report(PlaneDivisorCase(2))
    assert report.A == (1 + 1) * report.S
    assert predicate_two(report, Fraction(1))
    assert not predicate_two(report, Fraction(101, 100))
