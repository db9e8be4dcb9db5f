#!/usr/bin/env python3
"""
Sweep Utilities
===============

Helpers for sweeps and generated fixtures:
- MATLAB-style range parser (start:step:end) over exact rationals
- seeded sampling of rationals, partitions and interpolation triples
- uniform grids
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from scripts.utils.errors import PreconditionError, RationalParseError
from scripts.utils.rationals import parse_rational


def parse_matlab_range(expr: str) -> List[Fraction]:
    """Parse ``"start:step:end"`` into an inclusive list of exact rationals.

    Each part may be an integer or a ``p/q`` string, e.g. ``"0:1/4:3"``.
    """
    parts = [p.strip() for p in str(expr).split(":")]
    if len(parts) != 3:
        raise RationalParseError(f"Invalid range expression: {expr}")
    start, step, end = (parse_rational(p) for p in parts)
    if step == 0:
        raise RationalParseError("step must be non-zero")
    count = (end - start) / step
    if count < 0:
        return []
    return [start + i * step for i in range(int(count) + 1)]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_rational(
    rng: np.random.Generator, low: Fraction, high: Fraction, max_denominator: int = 12
) -> Fraction:
    """A rational in the open interval (low, high) with a small denominator."""
    low, high = Fraction(low), Fraction(high)
    if not low < high:
        raise PreconditionError("empty sampling interval")
    while True:
        den = int(rng.integers(1, max_denominator + 1))
        lo_num = math.floor(low * den) + 1
        hi_num = math.ceil(high * den) - 1
        if lo_num <= hi_num:
            return Fraction(int(rng.integers(lo_num, hi_num + 1)), den)
        max_denominator += 1


def random_partition(
    rng: np.random.Generator,
    total: Fraction,
    parts: int,
    cap: Fraction = Fraction(1),
    max_denominator: int = 12,
) -> List[Fraction]:
    """``parts`` rationals in (0, cap) with sum strictly below ``total``."""
    values = []
    remaining = Fraction(total)
    for k in range(parts):
        bound = min(Fraction(cap), remaining / (parts - k))
        value = random_rational(rng, Fraction(0), bound, max_denominator)
        values.append(value)
        remaining -= value
    return values


def random_triples(
    rng: np.random.Generator, end: Fraction, count: int, max_denominator: int = 24
) -> List[Tuple[Fraction, Fraction, Fraction]]:
    """(x, y, lambda) with x, y in [0, end] and lambda in (0, 1)."""
    triples = []
    for _ in range(count):
        x = end * Fraction(int(rng.integers(0, max_denominator + 1)), max_denominator)
        y = end * Fraction(int(rng.integers(0, max_denominator + 1)), max_denominator)
        lam = random_rational(rng, Fraction(0), Fraction(1), max_denominator)
        triples.append((x, y, lam))
    return triples


def uniform_grid(end: Fraction, points: int) -> List[Fraction]:
    """``points`` equally spaced rationals from 0 to ``end`` inclusive."""
    if points < 2:
        raise PreconditionError("a grid needs at least two points")
    return [Fraction(end) * Fraction(k, points - 1) for k in range(points)]


def clip_to_interval(values: Sequence[Fraction], low: Fraction, high: Fraction) -> List[Fraction]:
    return [v for v in values if low <= v <= high]
