#!/usr/bin/env python3
"""
Run Verification Suites
=======================

``kstab verify <suite>``: run one named property suite (or ``all``) with a
fixed seed and report every check. Any failing check makes the run fail.
"""

from __future__ import annotations

import logging
import time

from scripts.utils.reporting import RunReport
from scripts.verification import SuiteOptions, run_suites

logger = logging.getLogger(__name__)


def verify(name: str, options: SuiteOptions, with_timing: bool = False) -> RunReport:
    run = RunReport("verify")
    run.input = {
        "suite": name,
        "seed": options.seed,
        "samples": options.samples,
        "max_a": options.max_a,
        "k": options.k,
        "radius": options.radius,
    }
    started = time.perf_counter()
    results = run_suites(name, options)
    run.seconds = time.perf_counter() - started
    for result in results:
        run.reports.append(result.to_dict(with_timing))
        run.checks[result.name] = result.passed
    failed = [r.name for r in results if not r.passed]
    run.summary.update(
        {
            "suites": len(results),
            "checks": sum(r.checks for r in results),
            "failed": failed,
        }
    )
    if failed:
        logger.error("failed suites: %s", ", ".join(failed))
    return run
