"""Run reports and their renderings (human table, JSON, CSV)."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ("valuation", "v", "A", "tau", "S", "beta", "betahat", "j")
# JSON only
HIDDEN_COLUMNS = ("n", "Ln", "details")


@dataclass
class RunReport:
    """Everything one CLI invocation prints.

    ``seconds`` is only rendered when timing was requested, so identical
    inputs give identical output.
    """

    command: str
    input: Dict[str, Any] = field(default_factory=dict)
    reports: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)
    curves: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    seconds: Optional[float] = None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self, with_timing: bool = False) -> Dict[str, Any]:
        data = {
            "command": self.command,
            "input": self.input,
            "reports": self.reports,
            "summary": self.summary,
            "checks": self.checks,
        }
        if self.curves:
            data["curves"] = self.curves
        if with_timing and self.seconds is not None:
            data["seconds"] = round(self.seconds, 3)
        return data


def render_json(report: RunReport, with_timing: bool = False) -> str:
    return json.dumps(report.to_dict(with_timing), indent=2, sort_keys=True, ensure_ascii=False)


def _scalar(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return "(" + ", ".join(_scalar(v) for v in value) + ")"
    if isinstance(value, dict):
        return ", ".join(f"{k}={_scalar(v)}" for k, v in value.items())
    return str(value)


def render_table(report: RunReport, with_timing: bool = False) -> str:
    lines = [f"kstab {report.command}"]
    label = report.input.get("label")
    if label:
        lines.append(f"  pair: {label}")
    for key, value in report.summary.items():
        lines.append(f"  {key}: {_scalar(value)}")
    if report.reports:
        frame = pd.DataFrame(report.reports)
        columns = [c for c in TABLE_COLUMNS if c in frame.columns]
        extra = [
            c
            for c in frame.columns
            if c not in TABLE_COLUMNS and c not in HIDDEN_COLUMNS and not c.endswith("_float")
        ]
        frame = frame[columns + extra]
        frame = frame.apply(lambda col: col.map(_scalar))
        lines.append("")
        lines.append(frame.to_string(index=False))
    if report.checks:
        lines.append("")
        for name, ok in report.checks.items():
            lines.append(f"  [{'PASS' if ok else 'FAIL'}] {name}")
    if with_timing and report.seconds is not None:
        lines.append(f"  wall time: {report.seconds:.3f}s")
    return "\n".join(lines)


def write_csv(frames: Sequence[pd.DataFrame], path: str) -> Optional[Path]:
    """Concatenate curve tables and write them; returns the path written."""
    if not frames:
        logger.warning("no curves to export")
        return None
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    pd.concat(list(frames), ignore_index=True).to_csv(target, index=False)
    logger.info("wrote %s", target)
    return target
