#!/usr/bin/env python3
"""
Property-based tests (hypothesis) for the exact identities.
"""
import math
from fractions import Fraction

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from scripts.dim1 import (
    MarkedPoint,
    P1Pair,
    check_minimizer_is_extremal,
    p1_betahat,
    p1_report,
    p1_verdict,
    parse_coordinate,
    valuations_of,
)
from scripts.invariants import (
    delta_from_prime,
    delta_prime,
    epsilon_from_prime,
    epsilon_prime,
    implication_one_to_two,
    implication_two_to_one,
    predicate_one,
    predicate_two,
    threshold_table,
)
from scripts.p2wb import (
    PlaneDivisorCase,
    WeightedBlowupDescriptor,
    closed_form_betahat,
    plane_divisor_report,
    wb_betahat_range,
    wb_report,
)
from scripts.toric import moment_polytope, projective_space_fan, toric_report
from scripts.volfun import Polynomial, check_tau_upper

POOL = ("0", "inf", "1", "-1", "2", "1/3")
unit = st.fractions(min_value=0, max_value=1, max_denominator=30).filter(lambda f: 0 < f < 1)

P2_FAN = projective_space_fan(2)
P2_POLYTOPE = moment_polytope(P2_FAN)


@st.composite
def p1_pairs(draw):
    coordinates = draw(st.lists(st.sampled_from(POOL), max_size=4, unique=True))
    coefficients = [draw(unit) for _ in coordinates]
    assume(sum(coefficients, Fraction(0)) < 2)
    return P1Pair(tuple(MarkedPoint(parse_coordinate(at), c) for at, c in zip(coordinates, coefficients)))


@st.composite
def admissible_taus(draw, max_a=8):
    a = draw(st.integers(1, max_a))
    b = draw(st.integers(1, a))
    assume(math.gcd(a, b) == 1)
    t = draw(st.fractions(min_value=0, max_value=1, max_denominator=12))
    # tau runs from 3a down to 3b; only the part above 3 sqrt(ab) is admissible
    tau = 3 * a - (3 * a - 3 * b) * t
    assume(tau * tau >= 9 * a * b)
    return a, b, tau


@st.composite
def reports(draw):
    family = draw(st.sampled_from(("p1", "plane", "blowup", "toric")))
    if family == "p1":
        pair = draw(p1_pairs())
        return p1_report(pair, draw(st.sampled_from(valuations_of(pair))))
    if family == "plane":
        return plane_divisor_report(PlaneDivisorCase(draw(st.integers(1, 6))))
    if family == "blowup":
        a, b, tau = draw(admissible_taus())
        return wb_report(WeightedBlowupDescriptor(a, b, tau))[2]
    v = draw(st.sampled_from(((1, 0), (0, 1), (-1, -1), (2, 1), (1, -3))))
    return toric_report(P2_FAN, v, P2_POLYTOPE)[1]


positive = st.fractions(min_value=0, max_value=5, max_denominator=20).filter(lambda f: f > 0)


@settings(deadline=None, max_examples=60)
@given(p1_pairs())
def test_p1_closed_form_matches_integral(pair):
    for v in valuations_of(pair):
        report = p1_report(pair, v)
        assert report.betahat == p1_betahat(pair, v)
        assert report.j_identity_holds()
        assert report.S == report.tau / 2


@settings(deadline=None)
@given(unit)
def test_threshold_maps_invert(value):
    assert delta_from_prime(delta_prime(value)) == value
    assert epsilon_from_prime(epsilon_prime(value)) == value
    from_delta = threshold_table(3, delta=value)
    assert from_delta.epsilon > 0 and from_delta.theta > 0
    from_epsilon = threshold_table(3, epsilon=value)
    assert 0 < from_epsilon.delta < 1


@settings(deadline=None)
@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=9), min_size=1, max_size=5))
def test_interpolation_recovers_polynomials(coefficients):
    p = Polynomial.from_coefficients(coefficients)
    size = max(p.degree, 0) + 1
    points = [(Fraction(x), p(x)) for x in range(size)]
    assert Polynomial.interpolate(points) == p


@settings(deadline=None, max_examples=40)
@given(st.integers(-6, 6), st.integers(-6, 6))
def test_every_monomial_valuation_on_p2_has_zero_beta(x, y):
    assume((x, y) != (0, 0) and math.gcd(x, y) == 1)
    curve, report = toric_report(P2_FAN, (x, y), P2_POLYTOPE)
    assert report.beta == 0
    assert check_tau_upper(curve)
    for t in (Fraction(1, 2), Fraction(2)):
        assert implication_two_to_one(report, t)
        assert implication_one_to_two(report, t)


@settings(deadline=None, max_examples=40)
@given(admissible_taus(max_a=50))
def test_weighted_blowup_closed_form_on_the_window(case):
    a, b, tau = case
    eps, _, report = wb_report(WeightedBlowupDescriptor(a, b, tau))
    assert eps * tau == 9 * a * b
    assert report.betahat == closed_form_betahat(a, b, tau)
    assert report.betahat >= 0
    window = wb_betahat_range(a, b)
    assert window.nonincreasing
    assert report.betahat >= window.minimum == 0


@settings(deadline=None, max_examples=60)
@given(reports(), positive)
def test_betahat_predicate_is_a_betahat_bound(report, epsilon_p):
    assert predicate_two(report, epsilon_p) == (report.betahat >= epsilon_p / (1 + epsilon_p))


@settings(deadline=None, max_examples=60)
@given(reports(), positive)
def test_delta_predicate_is_a_beta_bound(report, delta_p):
    delta = delta_p / (1 + delta_p)
    assert predicate_one(report, delta_p) == (report.beta >= delta * report.j)


@settings(deadline=None, max_examples=60)
@given(p1_pairs())
def test_p1_minimizer_has_maximal_coefficient(pair):
    assert check_minimizer_is_extremal(pair)
    verdict = p1_verdict(pair)
    assert all(verdict.epsilon_star <= p1_betahat(pair, v) for v in valuations_of(pair))
    if pair.marked_points:
        top = max(p.c for p in pair.marked_points)
        assert pair.coefficient_at(verdict.minimizer.at) == top
    else:
        assert verdict.minimizer.is_generic
