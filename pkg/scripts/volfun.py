#!/usr/bin/env python3
"""
Volume Curves
=============

Exact piecewise-polynomial engine for the volume function x -> vol(L - xF)
and for the inequality checks every geometric curve has to pass.

All scalars are ``fractions.Fraction``; polynomials are sympy ``Poly``
objects over QQ wrapped in :class:`Polynomial`. A :class:`VolumeCurve` is
stored on ``[0, tau]`` only, since the volume vanishes from ``tau`` on.
"""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import sympy
from sympy import Poly, minimal_polynomial
from sympy.polys.domains import QQ
from sympy.polys.polyfuncs import interpolate

from scripts.utils.errors import ConsistencyError, DomainRangeError
from scripts.utils.rationals import (
    exact_nth_root,
    format_decimal,
    format_rational,
    from_sympy,
    nth_root_bracket,
    parse_rational,
    to_sympy,
)

logger = logging.getLogger(__name__)

X = sympy.Symbol("x")

Scalar = Union[Fraction, int, str]


class Polynomial:
    """Univariate polynomial with exact rational coefficients."""

    __slots__ = ("_poly",)

    def __init__(self, poly: Poly):
        if not isinstance(poly, Poly):
            poly = Poly(poly, X, domain=QQ)
        self._poly = poly

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[Scalar]) -> "Polynomial":
        """Build from coefficients in ascending degree order."""
        coeffs = [to_sympy(c) for c in coefficients] or [sympy.Integer(0)]
        return cls(Poly.from_list(list(reversed(coeffs)), X, domain=QQ))

    @classmethod
    def from_expr(cls, expr: Any) -> "Polynomial":
        return cls(Poly(sympy.sympify(expr), X, domain=QQ))

    @classmethod
    def constant(cls, value: Scalar) -> "Polynomial":
        return cls.from_coefficients([value])

    @classmethod
    def interpolate(cls, points: Sequence[Tuple[Fraction, Fraction]]) -> "Polynomial":
        """Exact Lagrange interpolation through ``points`` (distinct abscissae)."""
        data = [(to_sympy(x), to_sympy(y)) for x, y in points]
        if len(data) == 1:
            return cls.constant(points[0][1])
        return cls(Poly(interpolate(data, X), X, domain=QQ))

    @property
    def coefficients(self) -> Tuple[Fraction, ...]:
        """Coefficients in ascending degree order."""
        return tuple(from_sympy(c) for c in reversed(self._poly.all_coeffs()))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        if self._poly.is_zero:
            return -1
        return int(self._poly.degree())

    def __call__(self, x: Scalar) -> Fraction:
        return from_sympy(self._poly.eval(to_sympy(x)))

    def derivative(self) -> "Polynomial":
        return Polynomial(self._poly.diff(X))

    def antiderivative(self) -> "Polynomial":
        return Polynomial(self._poly.integrate())

    def as_expr(self) -> sympy.Expr:
        return self._poly.as_expr()

    def _coerce(self, other: Any) -> Poly:
        if isinstance(other, Polynomial):
            return other._poly
        return Poly(to_sympy(other), X, domain=QQ)

    def __add__(self, other: Any) -> "Polynomial":
        return Polynomial(self._poly + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other: Any) -> "Polynomial":
        return Polynomial(self._poly - self._coerce(other))

    def __rsub__(self, other: Any) -> "Polynomial":
        return Polynomial(self._coerce(other) - self._poly)

    def __mul__(self, other: Any) -> "Polynomial":
        return Polynomial(self._poly * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self._poly)

    def __pow__(self, exponent: int) -> "Polynomial":
        return Polynomial(self._poly**exponent)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __repr__(self) -> str:
        return f"Polynomial({self.as_expr()})"


@dataclass(frozen=True)
class PiecewisePolynomial:
    """Continuous piecewise polynomial on ``[breakpoints[0], breakpoints[-1]]``.

    Piece ``k`` lives on ``[breakpoints[k], breakpoints[k+1]]``.
    """

    breakpoints: Tuple[Fraction, ...]
    pieces: Tuple[Polynomial, ...]

    def __post_init__(self):
        bps = tuple(parse_rational(b) for b in self.breakpoints)
        pieces = tuple(self.pieces)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", pieces)
        if len(bps) < 2:
            raise ConsistencyError("a piecewise polynomial needs at least two breakpoints")
        if len(pieces) != len(bps) - 1:
            raise ConsistencyError(
                f"{len(pieces)} pieces do not match {len(bps)} breakpoints"
            )
        for left, right in zip(bps, bps[1:]):
            if not left < right:
                raise ConsistencyError(f"breakpoints not strictly increasing at {left}")
        for k in range(len(pieces) - 1):
            x = bps[k + 1]
            if pieces[k](x) != pieces[k + 1](x):
                raise ConsistencyError(
                    f"value jump at breakpoint {format_rational(x)}: "
                    f"{pieces[k](x)} != {pieces[k + 1](x)}"
                )

    @property
    def start(self) -> Fraction:
        return self.breakpoints[0]

    @property
    def end(self) -> Fraction:
        return self.breakpoints[-1]

    @property
    def max_degree(self) -> int:
        return max(p.degree for p in self.pieces)

    def intervals(self) -> List[Tuple[Fraction, Fraction]]:
        return list(zip(self.breakpoints, self.breakpoints[1:]))

    def piece_index(self, x: Scalar) -> int:
        x = parse_rational(x)
        if x < self.start or x > self.end:
            raise DomainRangeError(
                f"x={format_rational(x)} outside "
                f"[{format_rational(self.start)}, {format_rational(self.end)}]"
            )
        if x == self.end:
            return len(self.pieces) - 1
        return bisect.bisect_right(self.breakpoints, x) - 1

    def __call__(self, x: Scalar) -> Fraction:
        return self.pieces[self.piece_index(x)](x)

    def one_sided_derivative(self, x: Scalar, side: str) -> Fraction:
        """Derivative of the piece left (``side="left"``) or right of ``x``."""
        x = parse_rational(x)
        index = self.piece_index(x)
        if side == "left" and x == self.breakpoints[index] and index > 0:
            index -= 1
        elif side == "right" and x == self.end:
            raise DomainRangeError("no piece to the right of the last breakpoint")
        elif side == "left" and x == self.start:
            raise DomainRangeError("no piece to the left of the first breakpoint")
        return self.pieces[index].derivative()(x)

    def canonical(self) -> "PiecewisePolynomial":
        """Merge adjacent pieces that are the same polynomial."""
        bps = [self.breakpoints[0]]
        pieces: List[Polynomial] = []
        for piece, right in zip(self.pieces, self.breakpoints[1:]):
            if pieces and pieces[-1] == piece:
                bps[-1] = right
            else:
                pieces.append(piece)
                bps.append(right)
        return PiecewisePolynomial(tuple(bps), tuple(pieces))


def integrate(pp: PiecewisePolynomial, a: Scalar, b: Scalar) -> Fraction:
    """Exact integral of ``pp`` over ``[a, b]``."""
    a, b = parse_rational(a), parse_rational(b)
    if a > b:
        raise DomainRangeError(f"empty interval [{format_rational(a)}, {format_rational(b)}]")
    if a < pp.start or b > pp.end:
        raise DomainRangeError(
            f"[{format_rational(a)}, {format_rational(b)}] not inside "
            f"[{format_rational(pp.start)}, {format_rational(pp.end)}]"
        )
    total = Fraction(0)
    for piece, (left, right) in zip(pp.pieces, pp.intervals()):
        lo, hi = max(left, a), min(right, b)
        if lo >= hi:
            continue
        primitive = piece.antiderivative()
        total += primitive(hi) - primitive(lo)
    return total


def midpoint_riemann(pp: PiecewisePolynomial, a: Scalar, b: Scalar, cells: int = 20000) -> float:
    """Float midpoint-rule estimate of the integral (sanity cross-check only)."""
    a, b = float(parse_rational(a)), float(parse_rational(b))
    edges = np.linspace(a, b, cells + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    bps = np.array([float(x) for x in pp.breakpoints])
    index = np.clip(np.searchsorted(bps, mids, side="right") - 1, 0, len(pp.pieces) - 1)
    values = np.empty_like(mids)
    for k, piece in enumerate(pp.pieces):
        mask = index == k
        if np.any(mask):
            coeffs = [float(c) for c in reversed(piece.coefficients)]
            values[mask] = np.polyval(coeffs, mids[mask])
    return float(np.sum(values) * (b - a) / cells)


@dataclass(frozen=True)
class VolumeCurve:
    """x -> vol(L - xF) on ``[0, tau]`` for an n-dimensional pair."""

    body: PiecewisePolynomial
    dimension: int
    total_volume: Fraction
    tau: Fraction

    def __post_init__(self):
        object.__setattr__(self, "total_volume", parse_rational(self.total_volume))
        object.__setattr__(self, "tau", parse_rational(self.tau))
        self._validate()

    def _validate(self) -> None:
        n, body = self.dimension, self.body
        if n < 1:
            raise ConsistencyError(f"dimension must be positive, got {n}")
        if self.total_volume <= 0 or self.tau <= 0:
            raise ConsistencyError("total volume and tau must be positive")
        if body.start != 0 or body.end != self.tau:
            raise ConsistencyError(
                f"curve must live on [0, tau={format_rational(self.tau)}], "
                f"got [{format_rational(body.start)}, {format_rational(body.end)}]"
            )
        if body(0) != self.total_volume:
            raise ConsistencyError(
                f"vol(0)={format_rational(body(0))} differs from "
                f"L^n={format_rational(self.total_volume)}"
            )
        if body(self.tau) != 0:
            raise ConsistencyError(f"vol(tau)={format_rational(body(self.tau))} is not 0")
        if body.max_degree > n:
            raise ConsistencyError(f"piece of degree {body.max_degree} > dimension {n}")
        previous = self.total_volume
        for piece, (left, right) in zip(body.pieces, body.intervals()):
            slope = piece.derivative()
            for k in range(5):
                x = left + (right - left) * Fraction(k, 4)
                if slope(x) > 0:
                    raise ConsistencyError(f"volume increases at x={format_rational(x)}")
                if piece(x) < 0:
                    raise ConsistencyError(f"negative volume at x={format_rational(x)}")
            if piece(right) > previous:
                raise ConsistencyError(f"volume increases on [{left}, {right}]")
            previous = piece(right)

    @classmethod
    def from_pieces(
        cls,
        dimension: int,
        breakpoints: Sequence[Scalar],
        pieces: Sequence[Polynomial],
    ) -> "VolumeCurve":
        body = PiecewisePolynomial(tuple(breakpoints), tuple(pieces))
        return cls(body=body, dimension=dimension, total_volume=body(0), tau=body.end)

    def __call__(self, x: Scalar) -> Fraction:
        """vol(L - xF); zero beyond tau."""
        x = parse_rational(x)
        if x < 0:
            raise DomainRangeError(f"negative x={format_rational(x)}")
        if x >= self.tau:
            return Fraction(0)
        return self.body(x)


def expected_vanishing(curve: VolumeCurve) -> Fraction:
    """S = (1/L^n) * integral of vol(L - xF) over [0, tau]."""
    return integrate(curve.body, 0, curve.tau) / curve.total_volume


def check_tau_upper(curve: VolumeCurve) -> bool:
    """S <= n/(n+1) * tau."""
    n = curve.dimension
    return expected_vanishing(curve) <= Fraction(n, n + 1) * curve.tau


def fujita_lower_bound(curve: VolumeCurve, x: Scalar) -> Fraction:
    """(1 - x/tau)^n * L^n."""
    x = parse_rational(x)
    return (1 - x / curve.tau) ** curve.dimension * curve.total_volume


def check_fujita_lower(curve: VolumeCurve, samples: Iterable[Scalar]) -> bool:
    """vol(x) >= (1 - x/tau)^n * L^n at every sample in [0, tau]."""
    ok = True
    for x in samples:
        x = parse_rational(x)
        if x < 0 or x > curve.tau:
            raise DomainRangeError(
                f"sample {format_rational(x)} outside [0, {format_rational(curve.tau)}]"
            )
        if curve.body(x) < fujita_lower_bound(curve, x):
            logger.debug("lower volume bound fails at x=%s", format_rational(x))
            ok = False
    return ok


def _root_mean_by_refinement(
    c: Fraction, a: Fraction, b: Fraction, lam: Fraction, n: int
) -> bool:
    """Decide c^(1/n) >= lam*a^(1/n) + (1-lam)*b^(1/n) with shrinking brackets.

    When the brackets keep overlapping, equality is certified through the
    minimal polynomial of the difference; otherwise the difference is
    nonzero and refinement must separate the two sides.
    """
    mu = 1 - lam
    width = Fraction(1, 2**24)
    rounds = 0
    certified_nonzero = False
    while True:
        c_lo, c_hi = nth_root_bracket(c, n, width)
        a_lo, a_hi = nth_root_bracket(a, n, width)
        b_lo, b_hi = nth_root_bracket(b, n, width)
        if c_lo >= lam * a_hi + mu * b_hi:
            return True
        if c_hi < lam * a_lo + mu * b_lo:
            return False
        rounds += 1
        if rounds == 4 and not certified_nonzero:
            q = lambda v: sympy.root(to_sympy(v), n)  # noqa: E731
            difference = q(c) - to_sympy(lam) * q(a) - to_sympy(mu) * q(b)
            if minimal_polynomial(difference, X) == X:
                return True
            certified_nonzero = True
        width *= Fraction(1, 2**32)


def root_mean_holds(c: Fraction, a: Fraction, b: Fraction, lam: Fraction, n: int) -> bool:
    """Exact test of c^(1/n) >= lam*a^(1/n) + (1-lam)*b^(1/n) for c, a, b >= 0.

    Works on n-th powers wherever the roots are rational, isolates and
    squares twice for n = 2, and falls back to certified refinement.
    """
    mu = 1 - lam
    if n == 1:
        return c >= lam * a + mu * b
    ra, rb = exact_nth_root(a, n), exact_nth_root(b, n)
    if ra is not None and rb is not None:
        return c >= (lam * ra + mu * rb) ** n
    if n == 2:
        rest = c - lam * lam * a - mu * mu * b
        if rest < 0:
            return False
        return rest * rest >= 4 * lam * lam * mu * mu * a * b
    return _root_mean_by_refinement(c, a, b, lam, n)


def check_log_concavity(
    curve: VolumeCurve, triples: Iterable[Tuple[Scalar, Scalar, Scalar]]
) -> bool:
    """vol^(1/n) is concave at every supplied (x, y, lambda) triple."""
    n = curve.dimension
    ok = True
    for x, y, lam in triples:
        x, y, lam = parse_rational(x), parse_rational(y), parse_rational(lam)
        if not 0 < lam < 1:
            raise DomainRangeError(f"lambda={format_rational(lam)} not in (0, 1)")
        mid = lam * x + (1 - lam) * y
        if not root_mean_holds(curve.body(mid), curve.body(x), curve.body(y), lam, n):
            logger.debug(
                "concavity of vol^(1/%d) fails at (%s, %s, %s)",
                n,
                format_rational(x),
                format_rational(y),
                format_rational(lam),
            )
            ok = False
    return ok


def default_grid(curve: VolumeCurve, points: int = 21) -> List[Fraction]:
    return [curve.tau * Fraction(k, points - 1) for k in range(points)]


def piecewise_to_dict(pp: PiecewisePolynomial) -> Dict[str, Any]:
    return {
        "breakpoints": [format_rational(b) for b in pp.breakpoints],
        "pieces": [[format_rational(c) for c in p.coefficients] for p in pp.pieces],
    }


def piecewise_from_dict(data: Dict[str, Any]) -> PiecewisePolynomial:
    return PiecewisePolynomial(
        tuple(parse_rational(b) for b in data["breakpoints"]),
        tuple(Polynomial.from_coefficients(p) for p in data["pieces"]),
    )


def curve_to_dict(curve: VolumeCurve, with_float: bool = False) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "dimension": curve.dimension,
        "total_volume": format_rational(curve.total_volume),
        "tau": format_rational(curve.tau),
        "body": piecewise_to_dict(curve.body),
    }
    if with_float:
        data["tau_float"] = format_decimal(curve.tau)
    return data


def curve_from_dict(data: Dict[str, Any]) -> VolumeCurve:
    return VolumeCurve(
        body=piecewise_from_dict(data["body"]),
        dimension=int(data["dimension"]),
        total_volume=parse_rational(data["total_volume"]),
        tau=parse_rational(data["tau"]),
    )


def curve_frame(
    curve: VolumeCurve, grid: Optional[Sequence[Scalar]] = None, label: Optional[str] = None
) -> pd.DataFrame:
    """Table of (x, vol(x)) on ``grid`` for CSV export."""
    xs = [parse_rational(x) for x in (grid if grid is not None else default_grid(curve))]
    values = [curve(x) for x in xs]
    frame = pd.DataFrame(
        {
            "x": [format_rational(x) for x in xs],
            "vol": [format_rational(v) for v in values],
            "x_float": [float(x) for x in xs],
            "vol_float": [float(v) for v in values],
        }
    )
    if label is not None:
        frame.insert(0, "label", label)
    return frame
