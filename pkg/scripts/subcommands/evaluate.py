#!/usr/bin/env python3
"""
Evaluate Pairs
==============

Bodies of ``kstab eval``, ``kstab p1 eval``, ``kstab toric eval|sweep`` and
``kstab p2wb eval|sweep``. Each function takes a typed pair, computes the
reports of the relevant valuations and assembles a :class:`RunReport`
together with the curve tables used for ``--csv``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from scripts.descriptors import PairDescriptor
from scripts.dim1 import (
    CyclicCover,
    P1Pair,
    check_cover_monotonicity,
    check_cover_pointwise,
    check_cover_volume,
    cover_pullback,
    p1_verdict,
    p1_volume_curve,
    valuations_of,
)
from scripts.invariants import InvariantReport, tau_bound_consistent
from scripts.p2wb import (
    DEFAULT_BRACKET_WIDTH,
    PlaneDivisorCase,
    WeightedBlowupDescriptor,
    closed_form_betahat,
    plane_divisor_curve,
    plane_divisor_report,
    wb_betahat_range,
    wb_consistency_with_toric,
    wb_derivative_match,
    wb_report,
    wb_sweep,
    wb_window_samples,
)
from scripts.sweep_utils import clip_to_interval, uniform_grid
from scripts.toric import FanPair, Polytope, moment_polytope, toric_report, toric_sweep
from scripts.utils.errors import PreconditionError
from scripts.utils.rationals import format_decimal, format_rational
from scripts.utils.reporting import RunReport
from scripts.volfun import VolumeCurve, check_tau_upper, curve_frame, curve_to_dict, default_grid

logger = logging.getLogger(__name__)


@dataclass
class EvalOptions:
    with_float: bool = False
    grid: Optional[Sequence[Fraction]] = None
    radius: Optional[int] = None
    max_workers: Optional[int] = None
    show_progress: bool = False
    width: Fraction = DEFAULT_BRACKET_WIDTH


Evaluation = Tuple[RunReport, List[pd.DataFrame]]


def _grid_for(curve: VolumeCurve, options: EvalOptions) -> List[Fraction]:
    if options.grid is None:
        return default_grid(curve)
    return clip_to_interval(options.grid, Fraction(0), curve.tau)


def _add_curve(
    run: RunReport, frames: List[pd.DataFrame], label: str, curve: VolumeCurve, options: EvalOptions
) -> None:
    run.curves[label] = curve_to_dict(curve, options.with_float)
    frames.append(curve_frame(curve, _grid_for(curve, options), label))


def _standard_checks(run: RunReport, reports: Sequence[InvariantReport], curves: Sequence[VolumeCurve]) -> None:
    run.checks["j = (tau - A) L^n + beta"] = all(r.j_identity_holds() for r in reports)
    run.checks["S <= n/(n+1) tau"] = all(check_tau_upper(c) for c in curves)
    run.checks["tau <= A gives betahat >= 1/(n+1)"] = all(tau_bound_consistent(r) for r in reports)


# ---------------------------------------------------------------------------
# P^1
# ---------------------------------------------------------------------------


def evaluate_p1(
    pair: P1Pair,
    cover: Optional[CyclicCover] = None,
    options: Optional[EvalOptions] = None,
    label: Optional[str] = None,
) -> Evaluation:
    """Verdict over the marked points and the generic point, plus the cover if any."""
    options = options or EvalOptions()
    name = label or pair.describe()
    run = RunReport("p1 eval")
    frames: List[pd.DataFrame] = []

    verdict = p1_verdict(pair)
    run.reports.extend(verdict.to_dict(options.with_float)["reports"])
    run.summary.update(
        {
            "degree": format_rational(pair.degree),
            "verdict": verdict.kind.value,
            "epsilon_star": format_rational(verdict.epsilon_star),
            "delta_star": format_rational(verdict.delta_star),
            "witness": verdict.witness.label() if verdict.witness is not None else None,
        }
    )
    if options.with_float:
        run.summary["epsilon_star_float"] = format_decimal(verdict.epsilon_star)
    curves = [p1_volume_curve(pair, v) for v in valuations_of(pair)]
    for v, curve in zip(valuations_of(pair), curves):
        _add_curve(run, frames, f"{name} {v.label()}", curve, options)
    _standard_checks(run, [r for _, r in verdict.reports], curves)
    run.checks["delta* > 0 iff epsilon* > 0"] = (verdict.delta_star > 0) == (verdict.epsilon_star > 0)

    if cover is not None:
        upstairs = cover_pullback(pair, cover)
        up = p1_verdict(upstairs)
        run.summary.update(
            {
                "cover_degree": cover.degree,
                "upstairs_pair": upstairs.describe(),
                "upstairs_verdict": up.kind.value,
                "upstairs_epsilon_star": format_rational(up.epsilon_star),
                "upstairs_witness": up.witness.label() if up.witness is not None else None,
            }
        )
        for row in up.to_dict(options.with_float)["reports"]:
            run.reports.append({**row, "valuation": f"up {row['valuation']}"})
        samples = uniform_grid(pair.degree, 5)
        run.checks["vol' = m vol along the cover"] = all(
            check_cover_volume(pair, cover, v, x) for v in valuations_of(pair) for x in samples
        )
        run.checks["A' = r A and betahat >= betahat' over every point"] = check_cover_pointwise(pair, cover)
        run.checks["epsilon* >= epsilon*'"] = check_cover_monotonicity(pair, cover)
    return run, frames


# ---------------------------------------------------------------------------
# toric
# ---------------------------------------------------------------------------


def _polytope_summary(fan: FanPair, polytope: Polytope) -> Dict[str, object]:
    return {
        "dimension": fan.dimension,
        "simplicial": fan.is_simplicial,
        "vertices": [[format_rational(c) for c in p] for p in polytope.vertices],
        "volume": format_rational(polytope.volume),
        "L^n": format_rational(polytope.normalized_volume),
        "barycenter": [format_rational(c) for c in polytope.barycenter],
    }


def evaluate_toric(
    fan: FanPair,
    valuations: Sequence[Sequence[int]] = (),
    options: Optional[EvalOptions] = None,
    label: Optional[str] = None,
) -> Evaluation:
    """Reports for the given monomial valuations (the rays when none are given)."""
    options = options or EvalOptions()
    name = label or "toric"
    run = RunReport("toric eval")
    frames: List[pd.DataFrame] = []
    polytope = moment_polytope(fan)
    run.summary.update(_polytope_summary(fan, polytope))
    chosen = [tuple(v) for v in valuations] or list(fan.rays)
    reports, curves = [], []
    for v in chosen:
        curve, report = toric_report(fan, v, polytope)
        reports.append(report)
        curves.append(curve)
        run.reports.append({"v": list(v), **report.to_dict(options.with_float)})
        _add_curve(run, frames, f"{name} v={list(v)}", curve, options)
    lowest = min(range(len(reports)), key=lambda i: (reports[i].betahat, chosen[i]))
    run.summary["min_betahat"] = format_rational(reports[lowest].betahat)
    run.summary["min_at"] = list(chosen[lowest])
    _standard_checks(run, reports, curves)
    return run, frames


def sweep_toric(
    fan: FanPair,
    radius: int,
    options: Optional[EvalOptions] = None,
    label: Optional[str] = None,
) -> Evaluation:
    """Every primitive v with max|v_i| <= radius, ordered by (betahat, v)."""
    options = options or EvalOptions()
    name = label or "toric"
    run = RunReport("toric sweep")
    frames: List[pd.DataFrame] = []
    run.summary.update(_polytope_summary(fan, moment_polytope(fan)))
    entries = toric_sweep(fan, radius, options.max_workers, options.show_progress)
    run.reports.extend(entry.to_dict(options.with_float) for entry in entries)
    minimizers = [list(e.v) for e in entries if e.is_minimum]
    run.summary.update(
        {
            "radius": radius,
            "valuations": len(entries),
            "min_betahat": format_rational(entries[0].report.betahat),
            "minimizers": minimizers,
            "certified_by_tau_bound": sum(1 for e in entries if e.certified_by_tau_bound),
        }
    )
    for entry in entries:
        if entry.is_minimum:
            _add_curve(run, frames, f"{name} v={list(entry.v)}", entry.curve, options)
    _standard_checks(run, [e.report for e in entries], [e.curve for e in entries])
    return run, frames


# ---------------------------------------------------------------------------
# P^2: plane curves and weighted blowups
# ---------------------------------------------------------------------------


def evaluate_plane_divisor(case: PlaneDivisorCase, options: Optional[EvalOptions] = None) -> Evaluation:
    options = options or EvalOptions()
    run = RunReport("p2wb eval")
    frames: List[pd.DataFrame] = []
    curve = plane_divisor_curve(case)
    report = plane_divisor_report(case)
    run.reports.append({"valuation": f"plane curve d={case.d}", **report.to_dict(options.with_float)})
    run.summary.update({"d": case.d, "betahat": format_rational(report.betahat)})
    _add_curve(run, frames, f"plane curve d={case.d}", curve, options)
    run.checks["betahat = (d-1)/d"] = report.betahat == Fraction(case.d - 1, case.d)
    _standard_checks(run, [report], [curve])
    return run, frames


def evaluate_weighted_blowup(
    desc: WeightedBlowupDescriptor, options: Optional[EvalOptions] = None
) -> Evaluation:
    """A single tau when one is given, otherwise samples across the whole window."""
    options = options or EvalOptions()
    a, b = desc.a, desc.b
    run = RunReport("p2wb eval")
    frames: List[pd.DataFrame] = []
    window = wb_betahat_range(a, b, options.width)
    run.summary.update(
        {
            "a": a,
            "b": b,
            "A": format_rational(desc.log_discrepancy),
            "F^2": format_rational(desc.self_intersection),
            "window": window.to_dict(options.with_float),
        }
    )
    taus = [desc.tau] if desc.tau is not None else wb_window_samples(a, b, 5, options.width)
    reports, curves = [], []
    for tau in taus:
        sample = WeightedBlowupDescriptor(a, b, tau)
        eps, curve, report = wb_report(sample)
        reports.append(report)
        curves.append(curve)
        run.reports.append(
            {
                "valuation": f"({a},{b}) tau={format_rational(tau)}",
                "epsilon": format_rational(eps),
                **report.to_dict(options.with_float),
            }
        )
        _add_curve(run, frames, f"wb ({a},{b}) tau={format_rational(tau)}", curve, options)
        run.checks[f"tau={format_rational(tau)}: eps * tau = 9ab"] = eps * tau == 9 * a * b
        run.checks[f"tau={format_rational(tau)}: branches meet with slope -18/tau"] = wb_derivative_match(sample)
        run.checks[f"tau={format_rational(tau)}: closed form betahat"] = report.betahat == closed_form_betahat(
            a, b, tau
        )
    if desc.tau is not None:
        run.summary["tau"] = format_rational(desc.tau)
        run.summary["epsilon"] = format_rational(desc.epsilon)
        run.summary["betahat"] = format_rational(reports[0].betahat)
    run.checks["betahat >= 0 on the window"] = window.positivity and all(
        r.betahat >= window.minimum for r in reports
    )
    run.checks["betahat non-increasing in tau"] = window.nonincreasing
    run.checks["toric curve at tau=3a matches"] = wb_consistency_with_toric(a, b)
    _standard_checks(run, reports, curves)
    return run, frames


def sweep_weighted_blowups(max_a: int, options: Optional[EvalOptions] = None) -> Evaluation:
    options = options or EvalOptions()
    run = RunReport("p2wb sweep")
    rows = wb_sweep(max_a, options.width, options.show_progress)
    run.reports.extend(row.to_dict(options.with_float) for row in rows)
    run.summary.update(
        {
            "max_a": max_a,
            "pairs": len(rows),
            "min_betahat": format_rational(min(r.minimum for r in rows)),
            "negative": [[r.a, r.b] for r in rows if not r.positivity],
        }
    )
    run.checks["betahat >= 0 on every window"] = all(r.positivity for r in rows)
    run.checks["minimum 0 attained at tau = 3a"] = all(r.minimum == 0 and r.minimum_at == 3 * r.a for r in rows)
    run.checks["betahat non-increasing in tau"] = all(r.nonincreasing for r in rows)
    table = pd.DataFrame(run.reports)
    return run, [table]


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def evaluate_descriptor(
    descriptor: PairDescriptor,
    options: Optional[EvalOptions] = None,
    expected_kind: Union[str, Tuple[str, ...], None] = None,
) -> Evaluation:
    """Dispatch on the descriptor variant; ``expected_kind`` guards ``kstab p1 eval`` etc."""
    options = options or EvalOptions()
    kinds = (expected_kind,) if isinstance(expected_kind, str) else expected_kind
    if kinds is not None and descriptor.kind not in kinds:
        raise PreconditionError(
            f"descriptor {descriptor.source or ''} is a {descriptor.kind} pair, expected {' or '.join(kinds)}"
        )
    started = time.perf_counter()
    pair = descriptor.pair
    if descriptor.kind == "p1":
        run, frames = evaluate_p1(pair, descriptor.cover, options, descriptor.label)
    elif descriptor.kind == "toric":
        if options.radius is not None:
            run, frames = sweep_toric(pair, options.radius, options, descriptor.label)
        else:
            run, frames = evaluate_toric(pair, descriptor.valuations, options, descriptor.label)
    elif descriptor.kind == "plane_divisor":
        run, frames = evaluate_plane_divisor(pair, options)
    else:
        run, frames = evaluate_weighted_blowup(pair, options)
    run.input = descriptor.echo()
    if descriptor.notes:
        run.input["notes"] = descriptor.notes
    run.seconds = time.perf_counter() - started
    logger.info("%s evaluated in %.3fs", descriptor.kind, run.seconds)
    return run, frames
