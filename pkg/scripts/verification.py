#!/usr/bin/env python3
"""
Verification Suites
===================

Named property suites run by ``kstab verify``. Every suite generates its
fixtures from a seed, runs exact checks and returns a :class:`SuiteResult`
listing the failures (an empty list means the suite passed).

Suites:
  inequalities            expected vanishing bound, volume lower bound,
                          log-concavity, tau<=A bound, j identity and both
                          threshold implications over generated curves
  toric-vs-p2wb           slice curves on the P^2 polytope vs closed forms
  lattice-limit           lattice-point counts vs exact volumes at level k
  weighted-blowup-window  closed-form identities and betahat >= 0 on windows
  plane-divisors          betahat = (d-1)/d for plane curves
  finite-covers           pullbacks, volumes and descent along t -> t^m
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy import integrate as sp_integrate
from scipy.spatial import ConvexHull
from tqdm import tqdm

from scripts.dim1 import (
    GENERIC,
    CyclicCover,
    MarkedPoint,
    P1Pair,
    P1Valuation,
    VerdictKind,
    check_cover_monotonicity,
    check_cover_pointwise,
    check_cover_volume,
    check_minimizer_is_extremal,
    cover_pullback,
    p1_betahat,
    p1_report,
    p1_verdict,
    p1_volume_curve,
    parse_coordinate,
    valuations_of,
)
from scripts.invariants import (
    InvariantReport,
    implication_one_to_two,
    implication_two_to_one,
    tau_bound_consistent,
)
from scripts.p2wb import (
    PlaneDivisorCase,
    WeightedBlowupDescriptor,
    coprime_weights,
    plane_divisor_curve,
    plane_divisor_report,
    wb_betahat_range,
    wb_consistency_with_toric,
    wb_derivative_match,
    wb_nef_threshold_matches_toric,
    wb_report,
    wb_window_samples,
)
from scripts.sweep_utils import make_rng, random_partition, random_rational, random_triples, uniform_grid
from scripts.toric import (
    lattice_volume_estimate,
    moment_polytope,
    product_of_lines_fan,
    projective_space_fan,
    toric_sweep,
    toric_volume_curve,
)
from scripts.utils.errors import KStabError, PreconditionError
from scripts.utils.rationals import format_rational
from scripts.volfun import (
    Polynomial,
    VolumeCurve,
    check_fujita_lower,
    check_log_concavity,
    check_tau_upper,
    expected_vanishing,
)

logger = logging.getLogger(__name__)

FIXED_THRESHOLDS = (Fraction(1, 10), Fraction(1, 3), Fraction(1), Fraction(3))
POINT_POOL = ("0", "inf", "1", "-1", "2", "1/2", "3", "-2")


@dataclass
class SuiteOptions:
    seed: int = 7
    samples: int = 120
    max_a: Optional[int] = None
    k: int = 30
    radius: int = 2
    show_progress: bool = False


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: List[str] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, description: str) -> bool:
        self.checks += 1
        if not ok:
            self.failures.append(description)
            logger.warning("[%s] check failed: %s", self.name, description)
        return ok

    def to_dict(self, with_timing: bool = False) -> Dict[str, Any]:
        data = {
            "suite": self.name,
            "passed": self.passed,
            "checks": self.checks,
            "failures": list(self.failures),
            "details": self.details,
        }
        if with_timing:
            data["seconds"] = round(self.seconds, 3)
        return data


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------


def random_p1_pair(rng: np.random.Generator, max_points: int = 4) -> P1Pair:
    count = int(rng.integers(0, max_points + 1))
    chosen = rng.choice(len(POINT_POOL), size=count, replace=False) if count else []
    coefficients = random_partition(rng, Fraction(2), count)
    return P1Pair(
        tuple(MarkedPoint(parse_coordinate(POINT_POOL[int(i)]), c) for i, c in zip(chosen, coefficients))
    )


def cliff_curve() -> VolumeCurve:
    """9 up to x=2, then 9(3-x)^2: a valid curve whose S breaks the tau bound."""
    flat = Polynomial.constant(9)
    drop = Polynomial.from_coefficients([81, -54, 9])
    return VolumeCurve.from_pieces(2, [Fraction(0), Fraction(2), Fraction(3)], [flat, drop])


def kinked_curve() -> VolumeCurve:
    """(3-2x)^2 then (3-x)^2/4: continuous and decreasing but vol^(1/2) is convex."""
    steep = Polynomial.from_coefficients([9, -12, 4])
    shallow = Polynomial.from_coefficients([Fraction(9, 4), Fraction(-3, 2), Fraction(1, 4)])
    return VolumeCurve.from_pieces(2, [Fraction(0), Fraction(1), Fraction(3)], [steep, shallow])


def geometric_curves(options: SuiteOptions) -> List[Tuple[str, VolumeCurve, InvariantReport]]:
    """Curves with their reports from every regime the package models."""
    rng = make_rng(options.seed)
    fixtures: List[Tuple[str, VolumeCurve, InvariantReport]] = []
    for i in range(options.samples):
        pair = random_p1_pair(rng)
        for v in valuations_of(pair):
            fixtures.append(
                (f"P1 {pair.describe()} at {v.label()}", p1_volume_curve(pair, v), p1_report(pair, v))
            )
    fans = [
        ("P2", projective_space_fan(2), options.radius),
        ("P1xP1", product_of_lines_fan(2), options.radius),
        ("P1xP1 + 1/2 D", product_of_lines_fan(2, ["1/2", 0, 0, 0]), options.radius),
        ("P1xP1xP1", product_of_lines_fan(3), 1),
    ]
    for name, fan, radius in fans:
        for entry in toric_sweep(fan, radius, show_progress=options.show_progress):
            fixtures.append((f"{name} v={list(entry.v)}", entry.curve, entry.report))
    for d in range(1, 6):
        case = PlaneDivisorCase(d)
        fixtures.append((f"plane curve d={d}", plane_divisor_curve(case), plane_divisor_report(case)))
    for a, b in coprime_weights(4):
        for tau in wb_window_samples(a, b, 3):
            _, curve, report = wb_report(WeightedBlowupDescriptor(a, b, tau))
            fixtures.append((f"wb ({a},{b}) tau={format_rational(tau)}", curve, report))
    return fixtures


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def suite_inequalities(options: SuiteOptions) -> SuiteResult:
    result = SuiteResult("inequalities")
    rng = make_rng(options.seed + 1)
    fixtures = geometric_curves(options)
    result.details["curves"] = len(fixtures)
    for label, curve, report in tqdm(fixtures, disable=not options.show_progress, desc="inequalities"):
        result.check(check_tau_upper(curve), f"{label}: S > n/(n+1) tau")
        result.check(check_fujita_lower(curve, uniform_grid(curve.tau, 10)), f"{label}: volume lower bound")
        triples = random_triples(rng, curve.tau, 5 if curve.dimension < 3 else 2)
        result.check(check_log_concavity(curve, triples), f"{label}: vol^(1/n) not concave")
        result.check(tau_bound_consistent(report), f"{label}: tau <= A without betahat >= 1/(n+1)")
        result.check(report.j_identity_holds(), f"{label}: j identity")
        result.check(report.S == expected_vanishing(curve), f"{label}: S differs from the curve")
        thresholds = list(FIXED_THRESHOLDS) + [random_rational(rng, Fraction(0), Fraction(4))]
        for t in thresholds:
            result.check(implication_two_to_one(report, t), f"{label}: eps'={format_rational(t)} implication")
            result.check(implication_one_to_two(report, t), f"{label}: delta'={format_rational(t)} implication")
    # the checks must also be able to fail
    cliff, kinked = cliff_curve(), kinked_curve()
    result.check(not check_tau_upper(cliff), "cliff curve passed the expected vanishing bound")
    result.check(
        not check_log_concavity(kinked, [(Fraction(0), Fraction(3), Fraction(1, 2))]),
        "kinked curve passed log-concavity",
    )
    return result


def suite_toric_vs_p2wb(options: SuiteOptions) -> SuiteResult:
    result = SuiteResult("toric-vs-p2wb")
    max_a = options.max_a or 10
    weights = coprime_weights(max_a)
    result.details["pairs"] = len(weights)
    for a, b in tqdm(weights, disable=not options.show_progress, desc="toric vs closed form"):
        result.check(wb_consistency_with_toric(a, b), f"({a},{b}): toric curve differs from closed form")
        result.check(wb_nef_threshold_matches_toric(a, b), f"({a},{b}): nef threshold is not a toric breakpoint")
    return result


def suite_lattice_limit(options: SuiteOptions) -> SuiteResult:
    result = SuiteResult("lattice-limit")
    polytope = moment_polytope(projective_space_fan(2))
    rows = []
    for v in ((1, 0), (2, 1)):
        curve = toric_volume_curve(polytope, v)
        for x in (Fraction(0), Fraction(1, 2), Fraction(1)):
            exact = curve(x)
            estimate = lattice_volume_estimate(polytope, v, options.k, x)
            error = abs(estimate - exact) / exact
            rows.append({"v": list(v), "x": format_rational(x), "relative_error": float(error)})
            result.check(error < Fraction(1, 10), f"v={list(v)}, x={format_rational(x)}: error {float(error):.3f}")
    for name, fan in (("P2", projective_space_fan(2)), ("P1xP1", product_of_lines_fan(2))):
        exact_polytope = moment_polytope(fan)
        hull = ConvexHull(np.array([[float(c) for c in p] for p in exact_polytope.vertices]))
        result.check(
            abs(hull.volume - float(exact_polytope.volume)) < 1e-9,
            f"{name}: exact volume disagrees with the convex hull",
        )
    result.details["k"] = options.k
    result.details["errors"] = rows
    return result


def suite_weighted_blowup_window(options: SuiteOptions) -> SuiteResult:
    result = SuiteResult("weighted-blowup-window")
    max_a = options.max_a or 50
    identity_pairs = coprime_weights(min(max_a, 20))
    for a, b in tqdm(identity_pairs, disable=not options.show_progress, desc="window identities"):
        window = wb_betahat_range(a, b)
        sampled: List[Tuple[Fraction, Fraction]] = []
        for tau in wb_window_samples(a, b, 5):
            desc = WeightedBlowupDescriptor(a, b, tau)
            tag = f"({a},{b}) tau={format_rational(tau)}"
            try:
                eps, _, report = wb_report(desc)
            except KStabError as exc:
                result.check(False, f"{tag}: {exc}")
                continue
            sampled.append((tau, report.betahat))
            result.check(eps * tau == 9 * a * b, f"{tag}: eps * tau != 9ab")
            result.check(wb_derivative_match(desc), f"{tag}: branches do not match at eps")
            result.check(report.betahat >= 0, f"{tag}: negative betahat")
            result.check(report.betahat >= window.minimum, f"{tag}: betahat below the window minimum")
        for (t0, b0), (t1, b1) in zip(sampled, sampled[1:]):
            result.check(
                b1 <= b0,
                f"({a},{b}): betahat grows from tau={format_rational(t0)} to tau={format_rational(t1)}",
            )
    for a, b in coprime_weights(max_a):
        window = wb_betahat_range(a, b)
        lo, hi = window.endpoint_bracket
        result.check(window.minimum == 0 and window.minimum_at == 3 * a, f"({a},{b}): minimum not 0 at 3a")
        result.check(window.nonincreasing, f"({a},{b}): sampled betahat grows with tau")
        result.check(window.positivity and lo <= hi and hi >= 0, f"({a},{b}): negative betahat on the window")
    result.details["max_a"] = max_a
    return result


def suite_plane_divisors(options: SuiteOptions) -> SuiteResult:
    result = SuiteResult("plane-divisors")
    for d in range(1, 6):
        case = PlaneDivisorCase(d)
        report = plane_divisor_report(case)
        result.check(report.betahat == Fraction(d - 1, d), f"d={d}: betahat != (d-1)/d")
        numeric, _ = sp_integrate.quad(lambda x: (3 - d * x) ** 2, 0, 3 / d)
        result.check(abs(numeric / 9 - float(report.S)) < 1e-9, f"d={d}: S disagrees with quadrature")
    return result


def suite_finite_covers(options: SuiteOptions) -> SuiteResult:
    result = SuiteResult("finite-covers")
    half = Fraction(1, 2)
    pair = P1Pair.from_points([("0", half), ("inf", half), ("1", half)])
    upstairs = cover_pullback(pair, CyclicCover(2))
    expected = P1Pair.from_points([("1", half), ("-1", half)])
    result.check(upstairs == expected, "pullback of the three-point pair is not d[1]+d[-1]")
    down, up = p1_verdict(pair), p1_verdict(upstairs)
    result.check(
        down.kind is VerdictKind.UNIFORMLY_K_STABLE and down.epsilon_star == half,
        "downstairs pair is not uniformly K-stable with epsilon*=1/2",
    )
    result.check(
        up.kind is VerdictKind.K_SEMISTABLE_ONLY and up.witness == P1Valuation(parse_coordinate("1")),
        "upstairs pair is not K-semistable only with witness [1]",
    )
    third = Fraction(2, 3)
    ramified = P1Pair.from_points([("0", third), ("inf", third)])
    result.check(
        cover_pullback(ramified, CyclicCover(3)) == P1Pair(()), "m=3 pullback of 2/3[0]+2/3[inf] is not 0"
    )
    result.check(
        check_cover_volume(ramified, CyclicCover(3), GENERIC, Fraction(1, 3)),
        "m=3 cover volume fails at x=1/3",
    )
    two_points = P1Pair.from_points([("0", half), ("inf", half)])
    result.check(
        check_cover_monotonicity(two_points, CyclicCover(2)), "epsilon* grows along t^2 over 1/2[0]+1/2[inf]"
    )
    rng = make_rng(options.seed)
    cases = 0
    for _ in range(max(10, options.samples // 4)):
        m = int(rng.integers(2, 4))
        floor = Fraction(m - 1, m)
        c0, cinf = (
            floor if rng.integers(0, 2) == 0 else random_rational(rng, floor, Fraction(1))
            for _ in range(2)
        )
        points = [("0", c0), ("inf", cinf)]
        if rng.integers(0, 2):
            points.append(("1", random_rational(rng, Fraction(0), min(2 - c0 - cinf, Fraction(1)))))
        base = P1Pair.from_points(points)
        cover = CyclicCover(m)
        upstairs_base = cover_pullback(base, cover)
        cases += 1
        tag = f"{base.describe()} m={m}"
        result.check(check_cover_monotonicity(base, cover), f"{tag}: epsilon* grows upstairs")
        result.check(check_cover_pointwise(base, cover), f"{tag}: pointwise descent fails")
        result.check(check_minimizer_is_extremal(base), f"{tag}: minimizer is not a point of maximal coefficient")
        result.check(
            check_minimizer_is_extremal(upstairs_base),
            f"{upstairs_base.describe()}: minimizer is not a point of maximal coefficient",
        )
        for v in valuations_of(base):
            for x in uniform_grid(base.degree, 4):
                result.check(check_cover_volume(base, cover, v, x), f"{tag}: volume at {v.label()}")
            for w, _ in cover.lift(v):
                result.check(
                    p1_betahat(base, v) >= p1_betahat(upstairs_base, w), f"{tag}: betahat at {w.label()}"
                )
    result.details["generated_pairs"] = cases
    return result


SUITES: Dict[str, Callable[[SuiteOptions], SuiteResult]] = {
    "inequalities": suite_inequalities,
    "toric-vs-p2wb": suite_toric_vs_p2wb,
    "lattice-limit": suite_lattice_limit,
    "weighted-blowup-window": suite_weighted_blowup_window,
    "plane-divisors": suite_plane_divisors,
    "finite-covers": suite_finite_covers,
}


def run_suites(name: str, options: Optional[SuiteOptions] = None) -> List[SuiteResult]:
    """Run one suite by name, or every suite for ``"all"``."""
    options = options or SuiteOptions()
    if name == "all":
        names: Iterable[str] = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise PreconditionError(f"unknown suite {name!r}; choose from {', '.join(list(SUITES) + ['all'])}")
    results = []
    for suite_name in names:
        started = time.perf_counter()
        result = SUITES[suite_name](options)
        result.seconds = time.perf_counter() - started
        logger.info(
            "suite %s: %s (%d checks, %.2fs)",
            suite_name,
            "pass" if result.passed else f"{len(result.failures)} failures",
            result.checks,
            result.seconds,
        )
        results.append(result)
    return results
