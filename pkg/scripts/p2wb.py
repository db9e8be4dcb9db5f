#!/usr/bin/env python3
"""
Plt Blowups over P^2
====================

Closed-form invariants for two families of prime divisors over (P^2, 0),
L = -K = O(3), L^2 = 9:

* a curve F of degree d on P^2: vol(L - xF) = (3 - dx)^2 on [0, 3/d], A = 1;
* the exceptional divisor of the (a, b)-weighted blowup of a smooth point,
  A = a + b and (F^2) = -1/(ab), whose pseudo-effective threshold tau is a
  free parameter in the window [3 sqrt(ab), 3a].

For the weighted blowup the nef threshold is eps = 9ab / tau and

  vol(x) = 9 - x^2/(ab)                          on [0, eps]
  vol(x) = 9 (tau - x)^2 / (tau (tau - eps))     on [eps, tau]

so betahat = 1 - (eps + tau) / (3(a + b)). The window endpoint 3 sqrt(ab) is
irrational unless ab is a perfect square; it is compared through squares and
reported through rational square-root brackets.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from tqdm import tqdm

from scripts.invariants import InvariantReport, make_report
from scripts.toric import projective_space_fan, moment_polytope, toric_beta, toric_volume_curve
from scripts.utils.errors import ConsistencyError, PreconditionError
from scripts.utils.rationals import format_decimal, format_rational, parse_rational, sqrt_bracket
from scripts.volfun import Polynomial, VolumeCurve, integrate

logger = logging.getLogger(__name__)

PLANE_VOLUME = Fraction(9)
DEFAULT_BRACKET_WIDTH = Fraction(1, 10**6)


@dataclass(frozen=True)
class PlaneDivisorCase:
    d: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise PreconditionError(f"degree must be a positive integer, got {self.d}")


def plane_divisor_curve(case: PlaneDivisorCase) -> VolumeCurve:
    """(3 - dx)^2 on [0, 3/d]."""
    d = case.d
    body = Polynomial.from_coefficients([9, -6 * d, d * d])
    return VolumeCurve.from_pieces(2, [Fraction(0), Fraction(3, d)], [body])


def plane_divisor_report(case: PlaneDivisorCase) -> InvariantReport:
    report = make_report(2, PLANE_VOLUME, Fraction(1), plane_divisor_curve(case))
    if report.betahat != Fraction(case.d - 1, case.d):
        raise ConsistencyError(
            f"degree {case.d}: betahat {format_rational(report.betahat)} != (d-1)/d"
        )
    return report


@dataclass(frozen=True)
class WeightedBlowupDescriptor:
    """Weights a >= b >= 1, coprime; ``tau`` optional, inside [3 sqrt(ab), 3a]."""

    a: int
    b: int
    tau: Optional[Fraction] = None

    def __post_init__(self):
        a, b = self.a, self.b
        if not (isinstance(a, int) and isinstance(b, int)) or isinstance(a, bool):
            raise PreconditionError("weights must be integers")
        if not a >= b >= 1:
            raise PreconditionError(f"weights must satisfy a >= b >= 1, got ({a}, {b})")
        if math.gcd(a, b) != 1:
            raise PreconditionError(f"weights ({a}, {b}) are not coprime")
        if self.tau is not None:
            tau = parse_rational(self.tau)
            object.__setattr__(self, "tau", tau)
            if not in_window(a, b, tau):
                raise PreconditionError(
                    f"tau={format_rational(tau)} outside the admissible window "
                    f"[3*sqrt({a * b}), {3 * a}]"
                )

    @property
    def log_discrepancy(self) -> Fraction:
        return Fraction(self.a + self.b)

    @property
    def self_intersection(self) -> Fraction:
        """(F^2) on the weighted blowup."""
        return Fraction(-1, self.a * self.b)

    @property
    def epsilon(self) -> Fraction:
        if self.tau is None:
            raise PreconditionError("nef threshold needs tau")
        return 9 * self.a * self.b / self.tau


def in_window(a: int, b: int, tau: Fraction) -> bool:
    """9ab <= tau^2 and tau <= 3a."""
    return tau > 0 and 9 * a * b <= tau * tau and tau <= 3 * a


def wb_volume_curve(desc: WeightedBlowupDescriptor) -> VolumeCurve:
    if desc.tau is None:
        raise PreconditionError("volume curve needs tau")
    tau, eps, ab = desc.tau, desc.epsilon, desc.a * desc.b
    inner = Polynomial.from_coefficients([9, 0, Fraction(-1, ab)])
    if eps == tau:
        return VolumeCurve.from_pieces(2, [Fraction(0), tau], [inner])
    c = 9 / (tau * (tau - eps))
    outer = Polynomial.from_coefficients([c * tau * tau, -2 * c * tau, c])
    return VolumeCurve.from_pieces(2, [Fraction(0), eps, tau], [inner, outer])


def closed_form_betahat(a: int, b: int, tau: Fraction) -> Fraction:
    """1 - (eps + tau) / (3(a + b))."""
    eps = Fraction(9 * a * b) / tau
    return 1 - (eps + tau) / (3 * (a + b))


def wb_report(
    desc: WeightedBlowupDescriptor,
) -> Tuple[Fraction, VolumeCurve, InvariantReport]:
    """(eps, curve, report), asserting the integral agrees with the closed form."""
    if desc.tau is None:
        raise PreconditionError("wb_report needs tau")
    curve = wb_volume_curve(desc)
    report = make_report(2, PLANE_VOLUME, desc.log_discrepancy, curve)
    expected = closed_form_betahat(desc.a, desc.b, desc.tau)
    if report.betahat != expected:
        raise ConsistencyError(
            f"({desc.a}, {desc.b}, tau={format_rational(desc.tau)}): integral gives "
            f"betahat {format_rational(report.betahat)}, closed form {format_rational(expected)}"
        )
    if integrate(curve.body, 0, curve.tau) / PLANE_VOLUME != report.S:
        raise ConsistencyError("expected vanishing disagrees with the curve integral")
    return desc.epsilon, curve, report


def wb_derivative_match(desc: WeightedBlowupDescriptor) -> bool:
    """Both branches meet at eps with the same value and slope -18/tau."""
    curve = wb_volume_curve(desc)
    eps = desc.epsilon
    left = curve.body.one_sided_derivative(eps, "left")
    if eps == desc.tau:
        return left == -18 / desc.tau
    right = curve.body.one_sided_derivative(eps, "right")
    inner, outer = curve.body.pieces
    return left == right == -18 / desc.tau and inner(eps) == outer(eps)


@dataclass(frozen=True)
class WindowRange:
    a: int
    b: int
    minimum: Fraction
    minimum_at: Fraction
    endpoint_bracket: Tuple[Fraction, Fraction]
    positivity: bool
    samples: Tuple[Tuple[Fraction, Fraction], ...] = ()
    nonincreasing: bool = True

    @property
    def min_at(self) -> str:
        if self.minimum_at == 3 * self.a:
            return f"tau = 3a = {format_rational(self.minimum_at)}"
        return f"tau = {format_rational(self.minimum_at)}"

    def to_dict(self, with_float: bool = False) -> Dict[str, Any]:
        lo, hi = self.endpoint_bracket
        data: Dict[str, Any] = {
            "a": self.a,
            "b": self.b,
            "min_betahat": format_rational(self.minimum),
            "min_at": self.min_at,
            "endpoint_betahat_lo": format_rational(lo),
            "endpoint_betahat_hi": format_rational(hi),
            "positivity": self.positivity,
            "nonincreasing": self.nonincreasing,
            "sampled_taus": len(self.samples),
        }
        if with_float:
            data["endpoint_betahat_lo_float"] = format_decimal(lo)
            data["endpoint_betahat_hi_float"] = format_decimal(hi)
        return data


def wb_betahat_range(
    a: int, b: int, width: Fraction = DEFAULT_BRACKET_WIDTH, count: int = 3
) -> WindowRange:
    """betahat over the whole tau-window.

    The minimum is taken over ``count`` integrated reports spread across the
    window (3a always among them). tau + 9ab/tau increases on
    [3 sqrt(ab), 3a], so the sampled betahat must not increase with tau and
    the minimum should land on 3a. At the lower end betahat equals
    1 - 2 sqrt(ab)/(a+b), which comes back as a rational bracket.
    """
    samples = []
    for tau in wb_window_samples(a, b, count, width):
        _, _, report = wb_report(WeightedBlowupDescriptor(a, b, tau))
        samples.append((tau, report.betahat))
    values = [betahat for _, betahat in samples]
    nonincreasing = all(later <= earlier for earlier, later in zip(values, values[1:]))
    # ties resolve to the largest tau
    minimum_at, minimum = min(reversed(samples), key=lambda item: item[1])
    q_lo, q_hi = sqrt_bracket(Fraction(a * b), parse_rational(width))
    bracket = (1 - 2 * q_hi / (a + b), 1 - 2 * q_lo / (a + b))
    if not nonincreasing:
        logger.warning("betahat increases with tau somewhere on the (%d, %d) window", a, b)
    positivity = minimum >= 0 and bracket[1] >= minimum
    return WindowRange(a, b, minimum, minimum_at, bracket, positivity, tuple(samples), nonincreasing)


def wb_window_samples(
    a: int, b: int, count: int = 5, width: Fraction = DEFAULT_BRACKET_WIDTH
) -> List[Fraction]:
    """``count`` rational taus spread over the admissible window, 3a included."""
    if count < 1:
        raise PreconditionError("sample count must be positive")
    _, hi = sqrt_bracket(Fraction(a * b), parse_rational(width))
    low = min(3 * hi, Fraction(3 * a))
    high = Fraction(3 * a)
    if count == 1 or low == high:
        return [high]
    samples = sorted({low + (high - low) * Fraction(k, count - 1) for k in range(count)})
    return [t for t in samples if in_window(a, b, t)]


def coprime_weights(max_a: int) -> List[Tuple[int, int]]:
    return [(a, b) for a in range(1, max_a + 1) for b in range(1, a + 1) if math.gcd(a, b) == 1]


def wb_consistency_with_toric(a: int, b: int) -> bool:
    """The (a, b) monomial valuation on the P^2 polytope reproduces the tau=3a curve."""
    desc = WeightedBlowupDescriptor(a, b, Fraction(3 * a))
    _, curve, report = wb_report(desc)
    fan = projective_space_fan(2)
    polytope = moment_polytope(fan)
    toric_curve = toric_volume_curve(polytope, (a, b))
    same_curve = toric_curve.body.canonical() == curve.body.canonical()
    beta = toric_beta(fan, (a, b), polytope)
    if not same_curve:
        logger.debug("toric and closed-form curves differ for (%d, %d)", a, b)
    return same_curve and beta == 0 and report.betahat == 0


def wb_nef_threshold_matches_toric(a: int, b: int) -> bool:
    """eps at tau=3a is 3b, the only interior toric breakpoint (none for (1, 1))."""
    desc = WeightedBlowupDescriptor(a, b, Fraction(3 * a))
    eps = desc.epsilon
    polytope = moment_polytope(projective_space_fan(2))
    interior = list(toric_volume_curve(polytope, (a, b)).body.breakpoints[1:-1])
    expected = [eps] if eps < desc.tau else []
    return eps == 3 * b and interior == expected


def wb_sweep(
    max_a: int, width: Fraction = DEFAULT_BRACKET_WIDTH, show_progress: bool = False
) -> List[WindowRange]:
    """Window ranges for every coprime a >= b >= 1 with a <= max_a."""
    if max_a < 1:
        raise PreconditionError("max-a must be >= 1")
    rows = []
    weights = coprime_weights(max_a)
    for a, b in tqdm(weights, disable=not show_progress, desc="weighted blowups"):
        rows.append(wb_betahat_range(a, b, width))
    failures = [r for r in rows if not r.positivity]
    logger.info("swept %d weight pairs, %d with negative betahat", len(rows), len(failures))
    return rows
