#!/usr/bin/env python3
"""
Tests for the named verification suites (small options keep them quick).
"""
from fractions import Fraction

import pytest

from scripts.sweep_utils import make_rng, parse_matlab_range, random_partition, random_rational
from scripts.utils.errors import PreconditionError
from scripts.verification import (
    SUITES,
    SuiteOptions,
    SuiteResult,
    cliff_curve,
    kinked_curve,
    random_p1_pair,
    run_suites,
)

SMALL = SuiteOptions(seed=3, samples=8, max_a=4, k=30, radius=1)


@pytest.mark.parametrize(
    "name", ["plane-divisors", "finite-covers", "lattice-limit", "toric-vs-p2wb", "weighted-blowup-window"]
)
def test_suite_passes(name):
    (result,) = run_suites(name, SMALL)
    assert result.name == name
    assert result.checks > 0
    assert result.passed, result.failures


def test_inequalities_suite_on_few_samples():
    (result,) = run_suites("inequalities", SuiteOptions(seed=11, samples=4, radius=1))
    assert result.passed, result.failures[:5]
    assert result.details["curves"] > 4


def test_all_runs_every_suite_in_order(monkeypatch):
    calls = []
    for name in SUITES:
        monkeypatch.setitem(SUITES, name, lambda options, name=name: calls.append(name) or SuiteResult(name))
    results = run_suites("all")
    assert [r.name for r in results] == list(SUITES)
    assert calls == list(SUITES)


def test_unknown_suite():
    with pytest.raises(PreconditionError, match="unknown suite"):
        run_suites("nonsense")


def test_suite_result_records_failures():
    result = SuiteResult("demo")
    assert result.check(True, "fine")
    assert not result.check(False, "broken")
    assert result.checks == 2 and not result.passed
    data = result.to_dict(with_timing=True)
    assert data["failures"] == ["broken"] and "seconds" in data


def test_negative_controls_are_valid_curves():
    assert cliff_curve().tau == 3
    assert kinked_curve().total_volume == 9


def test_generated_pairs_are_klt_log_fano():
    rng = make_rng(5)
    for _ in range(50):
        pair = random_p1_pair(rng)
        assert pair.degree > 0
        assert all(0 < p.c < 1 for p in pair.marked_points)


def test_sampling_helpers():
    rng = make_rng(1)
    for _ in range(20):
        value = random_rational(rng, Fraction(1, 3), Fraction(1, 2))
        assert Fraction(1, 3) < value < Fraction(1, 2)
    parts = random_partition(rng, Fraction(2), 4)
    assert len(parts) == 4 and sum(parts) < 2
    assert parse_matlab_range("0:1/2:2") == [0, Fraction(1, 2), 1, Fraction(3, 2), 2]
    assert parse_matlab_range("2:1:1") == []
