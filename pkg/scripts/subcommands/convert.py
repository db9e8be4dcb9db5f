#!/usr/bin/env python3
"""
Convert Thresholds
==================

``kstab convert --delta p/q --n N`` or ``kstab convert --epsilon p/q --n N``:
turn one uniform-stability threshold into the other and print delta,
delta', theta, epsilon and epsilon' exactly.
"""

from __future__ import annotations

import logging
from typing import Optional

from scripts.invariants import threshold_table
from scripts.utils.rationals import parse_rational
from scripts.utils.reporting import RunReport

logger = logging.getLogger(__name__)


def convert_thresholds(
    n: int, delta: Optional[str] = None, epsilon: Optional[str] = None, with_float: bool = False
) -> RunReport:
    run = RunReport("convert")
    run.input["n"] = n
    if delta is not None:
        run.input["delta"] = str(delta)
        delta = parse_rational(delta)
    if epsilon is not None:
        run.input["epsilon"] = str(epsilon)
        epsilon = parse_rational(epsilon)
    params = threshold_table(n, delta=delta, epsilon=epsilon)
    run.summary.update(params.to_dict(with_float))
    logger.info("converted thresholds in dimension %d", n)
    return run
