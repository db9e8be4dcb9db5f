#!/usr/bin/env python3
"""kstab launcher.

Run ``python kstab.py <command> ...`` from a checkout to evaluate pair
descriptors, sweep toric valuations and weighted blowups, convert between
the delta and epsilon thresholds, or run the ``verify`` suites, without
activating an environment first. The environment ``install.sh`` creates
(``kstab_env``) is tried first, then ``.venv`` and ``venv``; when one has an
interpreter the launcher re-execs under it, so sympy and the rest of the
stack come from there. ``KSTAB_SKIP_VENV=1`` keeps the current interpreter.

The exit code is the hub's: 0 on success, 1 for a failed check, 2 for
invalid input.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path
from typing import Iterator, Optional

ROOT = Path(__file__).resolve().parent
VENV_NAMES = ("kstab_env", ".venv", "venv")


def _interpreters(root: Path = ROOT) -> Iterator[Path]:
    for name in VENV_NAMES:
        venv = root / name
        for candidate in (venv / "bin" / "python", venv / "Scripts" / "python.exe"):
            if candidate.exists():
                yield candidate
                break


def _running_under(venv: Path) -> bool:
    active = os.environ.get("VIRTUAL_ENV")
    if active and Path(active).resolve() == venv.resolve():
        return True
    try:
        prefix = Path(sys.prefix).resolve()
    except OSError:
        return False
    return prefix == venv.resolve() or venv.resolve() in prefix.parents


def _local_interpreter() -> Optional[Path]:
    """The venv interpreter to re-exec under, or None to stay put."""
    if os.environ.get("KSTAB_SKIP_VENV", "0").lower() in ("1", "true", "yes"):
        return None
    for py in _interpreters():
        venv = py.parent.parent
        if Path(sys.executable).resolve() == py.resolve() or _running_under(venv):
            return None
        return py
    return None


def main() -> int:
    from scripts.kstab_hub import main as hub_main

    return hub_main()


if __name__ == "__main__":
    py = _local_interpreter()
    if py is not None:
        os.execv(str(py), [str(py), __file__, *sys.argv[1:]])
    raise SystemExit(main())
