#!/usr/bin/env python3
"""
Valuative Invariants
====================

Builds the (A, tau, S, beta, betahat, j) bundle for one valuation from its
volume curve, and implements the threshold conversions between the
delta-j formulation and the betahat formulation of uniform K-stability.

Notation:
  S        normalized expected vanishing, (1/L^n) * integral of vol(L - xF)
  delta'   delta / (1 - delta)
  epsilon' epsilon / (1 - epsilon)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

from scripts.utils.errors import ConsistencyError, PreconditionError
from scripts.utils.rationals import format_decimal, format_rational, parse_rational
from scripts.volfun import VolumeCurve, expected_vanishing

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InvariantReport:
    """Invariants of one divisorial valuation on one pair."""

    n: int
    Ln: Fraction
    A: Fraction
    tau: Fraction
    S: Fraction
    beta: Fraction
    betahat: Fraction
    j: Fraction

    def to_dict(self, with_float: bool = False) -> Dict[str, Any]:
        data: Dict[str, Any] = {"n": self.n}
        for name in ("Ln", "A", "tau", "S", "beta", "betahat", "j"):
            value = getattr(self, name)
            data[name] = format_rational(value)
            if with_float:
                data[f"{name}_float"] = format_decimal(value)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "InvariantReport":
        fields = {
            name: parse_rational(data[name])
            for name in ("Ln", "A", "tau", "S", "beta", "betahat", "j")
        }
        return cls(n=int(data["n"]), **fields)

    def j_identity_holds(self) -> bool:
        """j = (tau - A) * L^n + beta."""
        return self.j == (self.tau - self.A) * self.Ln + self.beta


def make_report(n: int, Ln: Fraction, A: Fraction, curve: VolumeCurve) -> InvariantReport:
    """Invariants of a valuation with log discrepancy ``A`` and volume curve ``curve``."""
    Ln, A = parse_rational(Ln), parse_rational(A)
    if A <= 0:
        raise PreconditionError(f"log discrepancy must be positive, got {format_rational(A)}")
    if curve.dimension != n:
        raise ConsistencyError(f"curve dimension {curve.dimension} differs from n={n}")
    if curve.total_volume != Ln:
        raise ConsistencyError(
            f"curve total volume {format_rational(curve.total_volume)} "
            f"differs from L^n={format_rational(Ln)}"
        )
    S = expected_vanishing(curve)
    beta = A * Ln - S * Ln
    report = InvariantReport(
        n=n,
        Ln=Ln,
        A=A,
        tau=curve.tau,
        S=S,
        beta=beta,
        betahat=beta / (A * Ln),
        j=(curve.tau - S) * Ln,
    )
    if not (report.S < report.tau and report.j > 0):
        raise ConsistencyError("expected vanishing must stay below tau")
    return report


def quick_positive_bound(A: Fraction, tau: Fraction, n: int) -> Optional[Fraction]:
    """Certified betahat >= 1/(n+1) whenever tau <= A; None otherwise."""
    A, tau = parse_rational(A), parse_rational(tau)
    if A <= 0 or tau <= 0:
        raise PreconditionError("A and tau must be positive")
    if tau <= A:
        return Fraction(1, n + 1)
    return None


def delta_prime(delta: Fraction) -> Fraction:
    delta = parse_rational(delta)
    if not 0 < delta < 1:
        raise PreconditionError(f"delta={format_rational(delta)} not in (0, 1)")
    return delta / (1 - delta)


def delta_from_prime(delta_p: Fraction) -> Fraction:
    delta_p = parse_rational(delta_p)
    if delta_p <= 0:
        raise PreconditionError("delta' must be positive")
    return delta_p / (1 + delta_p)


def epsilon_prime(epsilon: Fraction) -> Fraction:
    epsilon = parse_rational(epsilon)
    if not 0 < epsilon < 1:
        raise PreconditionError(f"epsilon={format_rational(epsilon)} not in (0, 1)")
    return epsilon / (1 - epsilon)


def epsilon_from_prime(epsilon_p: Fraction) -> Fraction:
    epsilon_p = parse_rational(epsilon_p)
    if epsilon_p <= 0:
        raise PreconditionError("epsilon' must be positive")
    return epsilon_p / (1 + epsilon_p)


def delta_from_epsilon(epsilon_p: Fraction, n: int) -> Fraction:
    """delta' = epsilon' / (n+1): the delta-j inequality follows from the betahat one."""
    epsilon_p = parse_rational(epsilon_p)
    if epsilon_p <= 0:
        raise PreconditionError("epsilon' must be positive")
    return epsilon_p / (n + 1)


def epsilon_from_delta(delta_p: Fraction, n: int) -> Tuple[Fraction, Fraction]:
    """(epsilon', theta) for which the betahat inequality follows from the delta-j one.

    theta   = max{2n/(2n+1), 2 delta'/(2 delta' + 1)}
    epsilon' = min{ t / (1 - t), 1/(2n+1) } with t = delta' (1 - theta) / theta
    """
    delta_p = parse_rational(delta_p)
    if delta_p <= 0:
        raise PreconditionError("delta' must be positive")
    theta = max(Fraction(2 * n, 2 * n + 1), 2 * delta_p / (2 * delta_p + 1))
    t = delta_p * (1 - theta) / theta
    epsilon_p = min(t / (1 - t), Fraction(1, 2 * n + 1))
    return epsilon_p, theta


@dataclass(frozen=True)
class ThresholdParams:
    n: int
    delta: Fraction
    deltaPrime: Fraction
    epsilon: Fraction
    epsilonPrime: Fraction
    theta: Optional[Fraction] = None

    def to_dict(self, with_float: bool = False) -> Dict[str, Any]:
        data: Dict[str, Any] = {"n": self.n}
        for name in ("delta", "deltaPrime", "epsilon", "epsilonPrime", "theta"):
            value = getattr(self, name)
            if value is None:
                continue
            data[name] = format_rational(value)
            if with_float:
                data[f"{name}_float"] = format_decimal(value)
        return data


def threshold_table(
    n: int, delta: Optional[Fraction] = None, epsilon: Optional[Fraction] = None
) -> ThresholdParams:
    """Convert one threshold into the other.

    From delta: delta' -> (epsilon', theta) -> epsilon.
    From epsilon: epsilon' -> delta' = epsilon'/(n+1) -> delta (theta unset).
    """
    if (delta is None) == (epsilon is None):
        raise PreconditionError("give exactly one of delta or epsilon")
    if n < 1:
        raise PreconditionError("dimension must be positive")
    if delta is not None:
        delta = parse_rational(delta)
        d_p = delta_prime(delta)
        e_p, theta = epsilon_from_delta(d_p, n)
        return ThresholdParams(n, delta, d_p, epsilon_from_prime(e_p), e_p, theta)
    epsilon = parse_rational(epsilon)
    e_p = epsilon_prime(epsilon)
    d_p = delta_from_epsilon(e_p, n)
    return ThresholdParams(n, delta_from_prime(d_p), d_p, epsilon, e_p, None)


def predicate_one(report: InvariantReport, delta_p: Fraction) -> bool:
    """(1 + delta') A - delta' tau >= S."""
    delta_p = parse_rational(delta_p)
    return (1 + delta_p) * report.A - delta_p * report.tau >= report.S


def predicate_two(report: InvariantReport, epsilon_p: Fraction) -> bool:
    """A >= (1 + epsilon') S."""
    epsilon_p = parse_rational(epsilon_p)
    return report.A >= (1 + epsilon_p) * report.S


def optimal_delta(report: InvariantReport) -> Fraction:
    """beta / j: the largest delta with beta >= delta * j (possibly negative)."""
    return report.beta / report.j


def implication_two_to_one(report: InvariantReport, epsilon_p: Fraction) -> bool:
    """predicate_two(eps') implies predicate_one(eps'/(n+1))."""
    if not predicate_two(report, epsilon_p):
        return True
    return predicate_one(report, delta_from_epsilon(epsilon_p, report.n))


def implication_one_to_two(report: InvariantReport, delta_p: Fraction) -> bool:
    """predicate_one(delta') implies predicate_two(epsilon_from_delta(delta')[0])."""
    if not predicate_one(report, delta_p):
        return True
    epsilon_p, _ = epsilon_from_delta(delta_p, report.n)
    return predicate_two(report, epsilon_p)


def tau_bound_consistent(report: InvariantReport) -> bool:
    """tau <= A forces betahat >= 1/(n+1)."""
    bound = quick_positive_bound(report.A, report.tau, report.n)
    return bound is None or report.betahat >= bound
