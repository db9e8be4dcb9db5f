"""Exact scalar helpers.

``fractions.Fraction`` is the scalar used everywhere; sympy is only touched
at the boundary (polynomials, matrices), so conversions live here.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Any, Optional, Tuple, Union

import sympy
from sympy import integer_nthroot
from sympy.polys.domains import QQ

from scripts.utils.errors import RationalParseError

RationalLike = Union[Fraction, int, str]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(value: Any) -> Fraction:
    """Read ``"p/q"``, ``"p"``, an int or a Fraction as an exact Fraction.

    Floats are refused: a float in a descriptor is almost always a typo for a
    rational and silently converting it would break exactness.
    """
    if isinstance(value, bool):
        raise RationalParseError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, str):
        match = _RATIONAL_RE.match(value)
        if not match:
            raise RationalParseError(f"not a rational 'p/q' string: {value!r}")
        num = int(match.group(1))
        den = int(match.group(2)) if match.group(2) is not None else 1
        if den == 0:
            raise RationalParseError(f"zero denominator in {value!r}")
        return Fraction(num, den)
    raise RationalParseError(f"not a rational: {value!r}")


def format_rational(q: Fraction) -> str:
    """Inverse of :func:`parse_rational` (``"p/q"``, or ``"p"`` for integers)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_decimal(q: Fraction, digits: int = 12) -> str:
    """Decimal approximation for humans (``--float``)."""
    return str(sympy.Rational(q.numerator, q.denominator).evalf(digits))


def to_sympy(q: RationalLike) -> sympy.Rational:
    q = parse_rational(q)
    return sympy.Rational(q.numerator, q.denominator)


def from_sympy(value: Any) -> Fraction:
    """Convert a sympy number or a QQ domain element to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sympy.Basic):
        r = sympy.Rational(value)
        return Fraction(int(r.p), int(r.q))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        # PythonMPQ / gmpy2.mpq domain elements
        return Fraction(int(value.numerator), int(value.denominator))
    r = sympy.Rational(value)
    return Fraction(int(r.p), int(r.q))


def to_domain(q: RationalLike):
    """Fraction -> element of sympy's QQ domain (for DomainMatrix)."""
    q = parse_rational(q)
    return QQ(q.numerator, q.denominator)


def exact_nth_root(q: Fraction, n: int) -> Optional[Fraction]:
    """Return the rational n-th root of ``q >= 0`` when it exists, else None."""
    if q < 0:
        raise ValueError("nth root of a negative rational")
    num_root, num_exact = integer_nthroot(q.numerator, n)
    den_root, den_exact = integer_nthroot(q.denominator, n)
    if num_exact and den_exact:
        return Fraction(num_root, den_root)
    return None


def nth_root_bracket(q: Fraction, n: int, width: Fraction) -> Tuple[Fraction, Fraction]:
    """Rational ``(lo, hi)`` with ``lo <= q**(1/n) <= hi`` and ``hi - lo <= width``.

    Exact roots come back as a degenerate bracket.
    """
    if q < 0:
        raise ValueError("nth root of a negative rational")
    if width <= 0:
        raise ValueError("bracket width must be positive")
    exact = exact_nth_root(q, n)
    if exact is not None:
        return exact, exact
    scale = 1
    while Fraction(1, scale) > width:
        scale *= 2
    # floor((q * scale**n) ** (1/n)) computed on integers
    scaled = (q.numerator * scale**n) // q.denominator
    root, _ = integer_nthroot(scaled, n)
    lo = Fraction(root, scale)
    hi = Fraction(root + 1, scale)
    return lo, hi


def sqrt_bracket(q: Fraction, width: Fraction) -> Tuple[Fraction, Fraction]:
    return nth_root_bracket(q, 2, width)
