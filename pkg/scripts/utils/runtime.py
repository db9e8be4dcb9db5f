"""Runtime utilities for the kstab CLI.

Keeps console output resilient across platforms and wires up logging from
the ``KSTAB_LOG`` environment variable.
"""

from __future__ import annotations

import logging
import os
import sys
from typing import Optional

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


def configure_stdio() -> None:
    """Configure stdout/stderr to tolerate wide characters (τ, β̂, ∞)."""

    for stream_name in ("stdout", "stderr"):
        stream = getattr(sys, stream_name, None)
        if hasattr(stream, "reconfigure"):
            try:
                stream.reconfigure(errors="replace")
            except Exception:
                pass


def log_level_from_env(env: Optional[dict] = None, default: int = logging.WARNING) -> int:
    """Resolve ``KSTAB_LOG`` (``DEBUG``/``info``/``10``...) to a logging level."""
    env = os.environ if env is None else env
    raw = str(env.get("KSTAB_LOG", "")).strip()
    if not raw:
        return default
    if raw.isdigit():
        return int(raw)
    level = logging.getLevelName(raw.upper())
    return level if isinstance(level, int) else default


def configure_logging(verbose: bool = False) -> int:
    """Set up root logging on stderr. Returns the effective level."""
    level = log_level_from_env()
    if verbose:
        level = min(level, logging.INFO)
    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )
    return level
