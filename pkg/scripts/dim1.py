#!/usr/bin/env python3
"""
One-Dimensional Pairs
=====================

Exact K-stability verdicts for log Fano pairs (P^1, sum c_i [p_i]).

On a smooth curve the prime divisors over X are exactly its closed points,
so betahat only has to be minimized over the marked points plus one generic
(unmarked) point; the verdict is therefore decidable. Cyclic covers
t -> t^m, totally ramified over 0 and infinity, pull a pair back along the
ramification formula.

Point coordinates are exact sympy numbers (``sympy.oo`` for infinity), so
preimages such as +-sqrt(2) stay exact.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import sympy

from scripts.invariants import InvariantReport, make_report, optimal_delta
from scripts.utils.errors import (
    CoverCompatibilityError,
    DomainRangeError,
    PreconditionError,
)
from scripts.utils.rationals import format_decimal, format_rational, parse_rational
from scripts.volfun import Polynomial, VolumeCurve

logger = logging.getLogger(__name__)

INFINITY = sympy.oo
_T = sympy.Symbol("t")


def parse_coordinate(value: Any) -> sympy.Expr:
    """``"inf"``/``"oo"``/``"∞"`` -> oo; anything else must be an exact number."""
    if isinstance(value, sympy.Basic):
        return value
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    text = str(value).strip()
    if text.lower() in ("inf", "infinity", "oo", "∞"):
        return INFINITY
    try:
        expr = sympy.nsimplify(sympy.sympify(text, rational=True))
    except (sympy.SympifyError, TypeError, ValueError) as exc:
        raise PreconditionError(f"not a point of P^1: {value!r}") from exc
    if not expr.is_number or expr.has(sympy.zoo, sympy.nan):
        raise PreconditionError(f"not a point of P^1: {value!r}")
    return expr


def format_coordinate(at: sympy.Expr) -> str:
    if at == INFINITY:
        return "inf"
    return str(at)


def _angle_key(q: sympy.Expr) -> Tuple[float, float]:
    # counter-clockwise from the positive real axis; t^m = 1 lists 1 first
    angle = float(sympy.arg(q) % (2 * sympy.pi))
    return angle, float(sympy.Abs(q))


def _same_point(p: sympy.Expr, q: sympy.Expr) -> bool:
    if p == INFINITY or q == INFINITY:
        return p == q
    return sympy.simplify(p - q) == 0


@dataclass(frozen=True)
class MarkedPoint:
    at: sympy.Expr
    c: Fraction

    def label(self) -> str:
        return f"[{format_coordinate(self.at)}]"


@dataclass(frozen=True)
class P1Pair:
    """(P^1, sum c_i [p_i]) with distinct p_i and every c_i in (0, 1)."""

    marked_points: Tuple[MarkedPoint, ...] = ()

    def __post_init__(self):
        points = tuple(self.marked_points)
        object.__setattr__(self, "marked_points", points)
        for i, point in enumerate(points):
            if not 0 < point.c < 1:
                raise PreconditionError(
                    f"coefficient {format_rational(point.c)} at {point.label()} "
                    "not in (0, 1): pair is not klt"
                )
            for other in points[:i]:
                if _same_point(point.at, other.at):
                    raise PreconditionError(f"point {point.label()} marked twice")
        if sum((p.c for p in points), Fraction(0)) >= 2:
            raise PreconditionError("coefficients sum to >= 2: -(K+Delta) is not ample")

    @classmethod
    def from_points(cls, points: Sequence[Tuple[Any, Any]]) -> "P1Pair":
        return cls(
            tuple(MarkedPoint(parse_coordinate(at), parse_rational(c)) for at, c in points)
        )

    @property
    def degree(self) -> Fraction:
        """deg L = 2 - sum c_i."""
        return 2 - sum((p.c for p in self.marked_points), Fraction(0))

    def coefficient_at(self, at: Optional[sympy.Expr]) -> Fraction:
        if at is None:
            return Fraction(0)
        for point in self.marked_points:
            if _same_point(point.at, at):
                return point.c
        return Fraction(0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "points": [
                {"at": format_coordinate(p.at), "c": format_rational(p.c)}
                for p in self.marked_points
            ]
        }

    def describe(self) -> str:
        if not self.marked_points:
            return "0"
        return " + ".join(f"{format_rational(p.c)}{p.label()}" for p in self.marked_points)


@dataclass(frozen=True)
class P1Valuation:
    """A closed point of P^1, or ``at=None`` for a generic point off the support."""

    at: Optional[sympy.Expr] = None

    @property
    def is_generic(self) -> bool:
        return self.at is None

    def label(self) -> str:
        return "generic" if self.at is None else f"[{format_coordinate(self.at)}]"


GENERIC = P1Valuation(None)


def valuations_of(pair: P1Pair) -> List[P1Valuation]:
    """The finitely many valuations that matter: marked points, then generic."""
    return [P1Valuation(p.at) for p in pair.marked_points] + [GENERIC]


def p1_volume_curve(pair: P1Pair, v: P1Valuation = GENERIC) -> VolumeCurve:
    """vol(L - x[p]) = deg L - x on [0, deg L], for every point p."""
    degree = pair.degree
    body = Polynomial.from_coefficients([degree, -1])
    return VolumeCurve.from_pieces(1, [Fraction(0), degree], [body])


def p1_log_discrepancy(pair: P1Pair, v: P1Valuation) -> Fraction:
    """A = 1 - c_v."""
    return 1 - pair.coefficient_at(v.at)


def p1_report(pair: P1Pair, v: P1Valuation) -> InvariantReport:
    curve = p1_volume_curve(pair, v)
    return make_report(1, curve.total_volume, p1_log_discrepancy(pair, v), curve)


def p1_betahat(pair: P1Pair, v: P1Valuation) -> Fraction:
    """Closed form 1 - deg L / (2A)."""
    return 1 - pair.degree / (2 * p1_log_discrepancy(pair, v))


class VerdictKind(str, enum.Enum):
    UNIFORMLY_K_STABLE = "UniformlyKStable"
    K_SEMISTABLE_ONLY = "KSemistableOnly"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class P1Verdict:
    kind: VerdictKind
    epsilon_star: Fraction
    delta_star: Fraction
    minimizer: P1Valuation
    reports: Tuple[Tuple[P1Valuation, InvariantReport], ...] = field(default=())

    @property
    def witness(self) -> Optional[P1Valuation]:
        """A destabilizing (or non-uniformly stable) point when epsilon* <= 0."""
        if self.kind is VerdictKind.UNIFORMLY_K_STABLE:
            return None
        return self.minimizer

    def to_dict(self, with_float: bool = False) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "verdict": self.kind.value,
            "epsilon_star": format_rational(self.epsilon_star),
            "delta_star": format_rational(self.delta_star),
            "minimizer": self.minimizer.label(),
            "witness": self.witness.label() if self.witness is not None else None,
            "reports": [
                {"valuation": v.label(), **report.to_dict(with_float)}
                for v, report in self.reports
            ],
        }
        if with_float:
            data["epsilon_star_float"] = format_decimal(self.epsilon_star)
        return data


def p1_verdict(pair: P1Pair) -> P1Verdict:
    """Minimize betahat over marked points and the generic point.

    Ties keep the first valuation in :func:`valuations_of` order, so the
    witness is deterministic.
    """
    reports = [(v, p1_report(pair, v)) for v in valuations_of(pair)]
    minimizer, best = min(reports, key=lambda item: item[1].betahat)
    epsilon_star = best.betahat
    delta_star = min(optimal_delta(report) for _, report in reports)
    if epsilon_star > 0:
        kind = VerdictKind.UNIFORMLY_K_STABLE
    elif epsilon_star == 0:
        kind = VerdictKind.K_SEMISTABLE_ONLY
    else:
        kind = VerdictKind.UNSTABLE
    logger.info(
        "P^1 pair %s: %s with epsilon*=%s",
        pair.describe(),
        kind.value,
        format_rational(epsilon_star),
    )
    return P1Verdict(kind, epsilon_star, delta_star, minimizer, tuple(reports))


def p1_delta_threshold(pair: P1Pair) -> Fraction:
    """min over points of beta/j."""
    return p1_verdict(pair).delta_star


def check_minimizer_is_extremal(pair: P1Pair) -> bool:
    """The betahat minimizer is a point of maximal coefficient, or generic.

    Compared against every valuation of the pair, not just the verdict's.
    """
    verdict = p1_verdict(pair)
    lowest = min(p1_betahat(pair, v) for v in valuations_of(pair))
    if verdict.epsilon_star != lowest:
        return False
    if verdict.minimizer.is_generic:
        return not pair.marked_points
    top = max(p.c for p in pair.marked_points)
    return pair.coefficient_at(verdict.minimizer.at) == top


@dataclass(frozen=True)
class CyclicCover:
    """t -> t^m on P^1, totally ramified over 0 and infinity."""

    degree: int

    def __post_init__(self):
        if int(self.degree) < 2:
            raise PreconditionError(f"cover degree must be >= 2, got {self.degree}")

    def ramification_index(self, at: Optional[sympy.Expr]) -> int:
        if at is not None and (at == 0 or at == INFINITY):
            return self.degree
        return 1

    def preimages(self, at: sympy.Expr) -> List[sympy.Expr]:
        if at == 0 or at == INFINITY:
            return [at]
        roots = sympy.roots(sympy.Poly(_T**self.degree - at, _T))
        return sorted(roots, key=_angle_key)

    def lift(self, v: P1Valuation) -> List[Tuple[P1Valuation, int]]:
        """Valuations over ``v`` with their ramification indices."""
        if v.is_generic:
            return [(GENERIC, 1)]
        r = self.ramification_index(v.at)
        return [(P1Valuation(q), r) for q in self.preimages(v.at)]


def cover_pullback(pair: P1Pair, cover: CyclicCover) -> P1Pair:
    """Delta' with phi^*(K + Delta) = K' + Delta'.

    Over 0 and infinity the coefficient becomes m*c - (m-1); over any other
    marked point each of the m preimages keeps c. Zero coefficients drop.
    """
    m = cover.degree
    pulled: List[MarkedPoint] = []
    for at in (sympy.Integer(0), INFINITY):
        c = m * pair.coefficient_at(at) - (m - 1)
        if c < 0:
            raise CoverCompatibilityError(
                f"cover not crepant-compatible: coefficient {format_rational(c)} "
                f"over [{format_coordinate(at)}]"
            )
    for point in pair.marked_points:
        if point.at == 0 or point.at == INFINITY:
            c = m * point.c - (m - 1)
            if c > 0:
                pulled.append(MarkedPoint(point.at, c))
        else:
            pulled.extend(MarkedPoint(q, point.c) for q in cover.preimages(point.at))
    logger.debug("pulled back %s along t^%d: %s", pair.describe(), m, pulled)
    return P1Pair(tuple(pulled))


def check_cover_volume(pair: P1Pair, cover: CyclicCover, v: P1Valuation, x: Any) -> bool:
    """vol'(phi^*(L - x v)) = m * vol(L - x v).

    phi^*[p] has total degree m, so upstairs this is the curve of L' read
    at m*x.
    """
    x = parse_rational(x)
    curve = p1_volume_curve(pair, v)
    if x < 0 or x > curve.tau:
        raise DomainRangeError(f"x={format_rational(x)} outside [0, {format_rational(curve.tau)}]")
    upstairs = cover_pullback(pair, cover)
    lifted, _ = cover.lift(v)[0]
    up_curve = p1_volume_curve(upstairs, lifted)
    return up_curve(cover.degree * x) == cover.degree * curve(x)


def check_cover_monotonicity(pair: P1Pair, cover: CyclicCover) -> bool:
    """epsilon*(X, Delta) >= epsilon*(X', Delta')."""
    upstairs = cover_pullback(pair, cover)
    return p1_verdict(pair).epsilon_star >= p1_verdict(upstairs).epsilon_star


def check_cover_pointwise(pair: P1Pair, cover: CyclicCover) -> bool:
    """A'(v') = r A(v) and betahat(v) >= betahat'(v') for every v' over v."""
    upstairs = cover_pullback(pair, cover)
    ok = True
    for v in valuations_of(pair):
        for w, r in cover.lift(v):
            if p1_log_discrepancy(upstairs, w) != r * p1_log_discrepancy(pair, v):
                logger.debug("discrepancy does not scale by %d over %s", r, v.label())
                ok = False
            if p1_betahat(pair, v) < p1_betahat(upstairs, w):
                logger.debug("betahat grows from %s to %s", v.label(), w.label())
                ok = False
    return ok
