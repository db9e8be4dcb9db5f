#!/usr/bin/env python3
"""
Tests for the exact piecewise-polynomial engine and the volume-curve checks.
"""
from fractions import Fraction

import pytest

from scripts.utils.errors import ConsistencyError, DomainRangeError
from scripts.volfun import (
    PiecewisePolynomial,
    Polynomial,
    VolumeCurve,
    check_fujita_lower,
    check_log_concavity,
    check_tau_upper,
    curve_frame,
    curve_from_dict,
    curve_to_dict,
    default_grid,
    expected_vanishing,
    fujita_lower_bound,
    integrate,
    midpoint_riemann,
    root_mean_holds,
)


def square_curve() -> VolumeCurve:
    """(3 - x)^2 on [0, 3], the line class on P^2."""
    return VolumeCurve.from_pieces(2, [0, 3], [Polynomial.from_coefficients([9, -6, 1])])


def test_polynomial_arithmetic():
    p = Polynomial.from_coefficients([1, 2, 3])
    assert p(2) == 17
    assert p.coefficients == (1, 2, 3)
    assert p.degree == 2
    assert p.derivative().coefficients == (2, 6)
    assert p.antiderivative()(1) == 3
    assert (p - p).degree == -1
    assert (p * 2)(1) == 12
    assert (1 - Polynomial.from_coefficients([0, 1]))(Fraction(1, 4)) == Fraction(3, 4)


def test_interpolation_is_exact():
    points = [(Fraction(0), Fraction(9)), (Fraction(1), Fraction(4)), (Fraction(2), Fraction(1))]
    assert Polynomial.interpolate(points) == Polynomial.from_coefficients([9, -6, 1])
    assert Polynomial.interpolate([(Fraction(1), Fraction(5))]) == Polynomial.constant(5)


def test_piecewise_rejects_jumps_and_bad_breakpoints():
    one, two = Polynomial.constant(1), Polynomial.constant(2)
    with pytest.raises(ConsistencyError):
        PiecewisePolynomial((Fraction(0), Fraction(1), Fraction(2)), (one, two))
    with pytest.raises(ConsistencyError):
        PiecewisePolynomial((Fraction(0), Fraction(0)), (one,))
    with pytest.raises(ConsistencyError):
        PiecewisePolynomial((Fraction(0), Fraction(1)), (one, one))


def test_piecewise_evaluation_and_derivatives():
    down = Polynomial.from_coefficients([2, -1])
    flat = Polynomial.constant(1)
    pp = PiecewisePolynomial((Fraction(0), Fraction(1), Fraction(3)), (down, flat))
    assert pp(Fraction(1, 2)) == Fraction(3, 2)
    assert pp(1) == 1 and pp(3) == 1
    assert pp.one_sided_derivative(1, "left") == -1
    assert pp.one_sided_derivative(1, "right") == 0
    with pytest.raises(DomainRangeError):
        pp(4)
    with pytest.raises(DomainRangeError):
        pp.one_sided_derivative(3, "right")


def test_canonical_merges_equal_pieces():
    p = Polynomial.from_coefficients([9, -6, 1])
    pp = PiecewisePolynomial((Fraction(0), Fraction(1), Fraction(3)), (p, p))
    merged = pp.canonical()
    assert merged.breakpoints == (0, 3)
    assert merged.pieces == (p,)


def test_integrate():
    curve = square_curve()
    assert integrate(curve.body, 0, 3) == 9
    assert integrate(curve.body, 1, 2) == Fraction(7, 3)
    with pytest.raises(DomainRangeError):
        integrate(curve.body, 2, 1)
    assert midpoint_riemann(curve.body, 0, 3) == pytest.approx(9.0, abs=1e-6)


def test_volume_curve_domain():
    curve = square_curve()
    assert curve.tau == 3 and curve.total_volume == 9
    assert curve(5) == 0
    assert curve(1) == 4
    with pytest.raises(DomainRangeError):
        curve(-1)


def test_volume_curve_validation():
    rising = Polynomial.from_coefficients([1, 1])
    with pytest.raises(ConsistencyError):
        VolumeCurve.from_pieces(1, [0, 1], [rising])
    nonvanishing = Polynomial.from_coefficients([2, -1])
    with pytest.raises(ConsistencyError):
        VolumeCurve(
            PiecewisePolynomial((Fraction(0), Fraction(1)), (nonvanishing,)), 1, Fraction(2), Fraction(1)
        )
    with pytest.raises(ConsistencyError):
        VolumeCurve.from_pieces(1, [0, 3], [Polynomial.from_coefficients([9, -6, 1])])


def test_expected_vanishing_and_bounds():
    curve = square_curve()
    assert expected_vanishing(curve) == 1
    assert check_tau_upper(curve)
    assert fujita_lower_bound(curve, 1) == 4
    assert check_fujita_lower(curve, default_grid(curve, 7))
    with pytest.raises(DomainRangeError):
        check_fujita_lower(curve, [4])


def test_cliff_curve_breaks_the_tau_bound():
    flat = Polynomial.constant(9)
    drop = Polynomial.from_coefficients([81, -54, 9])
    cliff = VolumeCurve.from_pieces(2, [0, 2, 3], [flat, drop])
    assert expected_vanishing(cliff) == Fraction(7, 3)
    assert not check_tau_upper(cliff)


def test_log_concavity():
    assert check_log_concavity(square_curve(), [(0, 3, Fraction(1, 2)), (1, 2, Fraction(1, 3))])
    steep = Polynomial.from_coefficients([9, -12, 4])
    shallow = Polynomial.from_coefficients([Fraction(9, 4), Fraction(-3, 2), Fraction(1, 4)])
    kinked = VolumeCurve.from_pieces(2, [0, 1, 3], [steep, shallow])
    assert not check_log_concavity(kinked, [(0, 3, Fraction(1, 2))])
    with pytest.raises(DomainRangeError):
        check_log_concavity(square_curve(), [(0, 3, Fraction(1))])


def test_root_mean():
    half = Fraction(1, 2)
    assert root_mean_holds(Fraction(9, 4), Fraction(1), Fraction(4), half, 2)
    assert not root_mean_holds(Fraction(2), Fraction(1), Fraction(4), half, 2)
    assert root_mean_holds(Fraction(2), Fraction(1), Fraction(3), half, 2)
    # cube roots need the refinement path
    assert root_mean_holds(Fraction(2), Fraction(1), Fraction(3), half, 3)
    assert not root_mean_holds(Fraction(1), Fraction(1), Fraction(3), half, 3)


def test_curve_dict_and_frame():
    curve = square_curve()
    data = curve_to_dict(curve, with_float=True)
    assert data["tau"] == "3"
    assert data["body"]["pieces"] == [["9", "-6", "1"]]
    assert curve_from_dict(data) == curve
    frame = curve_frame(curve, [0, Fraction(3, 2), 3, 4], label="line")
    assert list(frame.columns) == ["label", "x", "vol", "x_float", "vol_float"]
    assert list(frame["vol"]) == ["9", "9/4", "0", "0"]
    assert len(curve_frame(curve)) == 21
