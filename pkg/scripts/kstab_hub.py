#!/usr/bin/env python3
"""
kstab Hub CLI
=============

Central CLI: evaluate pair descriptors, sweep valuations, convert
thresholds and run the verification suites. Output goes to stdout (a
table by default, ``--json`` for the machine format); logs go to stderr.

Exit codes: 0 success, 1 failed check or suite, 2 input error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional, Sequence

import pandas as pd

from scripts import __version__
from scripts.descriptors import DescriptorValidator, PairDescriptor, load_descriptor, load_document
from scripts.p2wb import DEFAULT_BRACKET_WIDTH, PlaneDivisorCase, WeightedBlowupDescriptor
from scripts.subcommands.convert import convert_thresholds
from scripts.subcommands.evaluate import (
    EvalOptions,
    evaluate_descriptor,
    sweep_weighted_blowups,
)
from scripts.subcommands.verify import verify
from scripts.sweep_utils import parse_matlab_range
from scripts.utils.errors import ConsistencyError, KStabError, PreconditionError
from scripts.utils.rationals import parse_rational
from scripts.utils.reporting import RunReport, render_json, render_table, write_csv
from scripts.utils.runtime import configure_logging, configure_stdio
from scripts.verification import SUITES, SuiteOptions

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


def _output_flags() -> argparse.ArgumentParser:
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument("--json", action="store_true", help="Print the run report as JSON")
    flags.add_argument("--csv", metavar="PATH", help="Write volume curves (or the sweep table) to CSV")
    flags.add_argument("--float", action="store_true", help="Add decimal approximations next to rationals")
    flags.add_argument("--timing", action="store_true", help="Include wall time in the report")
    flags.add_argument("--verbose", "-v", action="store_true", help="Log progress to stderr")
    return flags


def _eval_flags() -> argparse.ArgumentParser:
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument(
        "--grid",
        metavar="START:STEP:END",
        help="Sample points for the CSV curve tables, e.g. 0:1/4:3 (default: 21 points on [0, tau])",
    )
    flags.add_argument(
        "--schema",
        help="Descriptor schema (default: configs/pair_descriptor_schema.json)",
    )
    return flags


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kstab",
        description="kstab - exact K-stability invariants (beta, betahat, delta/epsilon thresholds) of log Fano pairs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Workflows:
  1. kstab eval configs/p1_three_points.json
     -> verdict, epsilon* and per-point invariants of a pair on P^1 (with its cover)

  2. kstab toric sweep configs/toric_p2.json --radius 5
     -> betahat over every primitive monomial valuation in the box

  3. kstab p2wb eval --a 2 --b 1 --tau 5
     -> weighted blowup curve, closed-form identities and the whole tau-window

  4. kstab verify all --seed 7
     -> every property suite; exit code 1 on any failure

Other:
  kstab convert --delta 1/2 --n 2
  kstab validate configs/toric_p1xp1_half.json --suggest-fixes
  kstab eval configs/plane_conic.json --json --float --csv out/conic.csv --grid 0:1/4:3/2
        """,
    )
    parser.add_argument("--version", action="version", version=f"kstab {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    output, evaluation = _output_flags(), _eval_flags()

    # eval
    p_eval = subparsers.add_parser(
        "eval", parents=[output, evaluation], help="Evaluate any pair descriptor (JSON or TOML)"
    )
    p_eval.add_argument("file", help="Pair descriptor")
    p_eval.add_argument("--radius", type=int, help="Toric pairs: sweep the radius box instead")

    # p1
    p_p1 = subparsers.add_parser("p1", help="Pairs (P^1, sum c_i [p_i])")
    p1_sub = p_p1.add_subparsers(dest="action", required=True)
    p1_eval = p1_sub.add_parser("eval", parents=[output, evaluation], help="Verdict and per-point reports")
    p1_eval.add_argument("file", help="P^1 pair descriptor")

    # toric
    p_toric = subparsers.add_parser("toric", help="Toric pairs given by a fan")
    toric_sub = p_toric.add_subparsers(dest="action", required=True)
    toric_eval = toric_sub.add_parser(
        "eval", parents=[output, evaluation], help="Reports for the listed valuations (default: the rays)"
    )
    toric_eval.add_argument("file", help="Fan descriptor")
    toric_sweep = toric_sub.add_parser(
        "sweep", parents=[output, evaluation], help="Sweep primitive monomial valuations"
    )
    toric_sweep.add_argument("file", help="Fan descriptor")
    toric_sweep.add_argument("--radius", type=int, default=3, help="max |v_i| (default: 3)")
    toric_sweep.add_argument(
        "--workers",
        type=int,
        help=(
            "Thread pool size. Reports are pure-Python sympy work under the GIL, "
            "so more workers do not speed up the sweep"
        ),
    )
    toric_sweep.add_argument("--progress", action="store_true", help="Show a progress bar")

    # p2wb
    p_p2wb = subparsers.add_parser("p2wb", help="Divisors over P^2: plane curves and weighted blowups")
    p2wb_sub = p_p2wb.add_subparsers(dest="action", required=True)
    p2wb_eval = p2wb_sub.add_parser(
        "eval", parents=[output, evaluation], help="One weighted blowup (or plane curve) evaluation"
    )
    p2wb_eval.add_argument("file", nargs="?", help="Descriptor (alternative to --a/--b or --d)")
    p2wb_eval.add_argument("--a", type=int, help="Larger weight")
    p2wb_eval.add_argument("--b", type=int, help="Smaller weight")
    p2wb_eval.add_argument("--tau", help="Pseudo-effective threshold p/q in [3 sqrt(ab), 3a]")
    p2wb_eval.add_argument("--d", type=int, help="Degree of a plane curve")
    p2wb_eval.add_argument("--width", default=None, help="Bracket width for sqrt(ab) (default: 1/1000000)")
    p2wb_sweep = p2wb_sub.add_parser("sweep", parents=[output], help="betahat over all tau-windows")
    p2wb_sweep.add_argument("--max-a", type=int, default=20, help="Largest weight a (default: 20)")
    p2wb_sweep.add_argument("--width", default=None, help="Bracket width for sqrt(ab) (default: 1/1000000)")
    p2wb_sweep.add_argument("--progress", action="store_true", help="Show a progress bar")

    # convert
    p_convert = subparsers.add_parser(
        "convert", parents=[output], help="Convert between delta and epsilon thresholds"
    )
    which = p_convert.add_mutually_exclusive_group(required=True)
    which.add_argument("--delta", help="delta in (0, 1), as p/q")
    which.add_argument("--epsilon", help="epsilon in (0, 1), as p/q")
    p_convert.add_argument("--n", type=int, required=True, help="Dimension")

    # verify
    p_verify = subparsers.add_parser("verify", parents=[output], help="Run property suites")
    p_verify.add_argument("suite", choices=list(SUITES) + ["all"], help="Suite name")
    p_verify.add_argument("--seed", type=int, default=7, help="Fixture seed (default: 7)")
    p_verify.add_argument("--samples", type=int, default=120, help="Generated P^1 pairs (default: 120)")
    p_verify.add_argument("--max-a", type=int, help="Largest weight for weighted-blowup suites")
    p_verify.add_argument("--k", type=int, default=30, help="Lattice level for lattice-limit (default: 30)")
    p_verify.add_argument("--radius", type=int, default=2, help="Toric sweep radius (default: 2)")
    p_verify.add_argument("--progress", action="store_true", help="Show progress bars")

    # validate
    p_validate = subparsers.add_parser("validate", help="Validate a pair descriptor against the schema")
    p_validate.add_argument("file", help="Pair descriptor")
    p_validate.add_argument("--schema", help="Schema path (default: configs/pair_descriptor_schema.json)")
    p_validate.add_argument("--suggest-fixes", action="store_true", help="Print hints for common mistakes")
    p_validate.add_argument("--verbose", "-v", action="store_true", help="Log progress to stderr")
    return parser


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _eval_options(args: argparse.Namespace) -> EvalOptions:
    grid = getattr(args, "grid", None)
    width = getattr(args, "width", None)
    return EvalOptions(
        with_float=args.float,
        grid=parse_matlab_range(grid) if grid else None,
        radius=getattr(args, "radius", None),
        max_workers=getattr(args, "workers", None),
        show_progress=getattr(args, "progress", False),
        width=parse_rational(width) if width else DEFAULT_BRACKET_WIDTH,
    )


def _validator(args: argparse.Namespace) -> DescriptorValidator:
    return DescriptorValidator(getattr(args, "schema", None))


def _emit(run: RunReport, frames: Sequence[pd.DataFrame], args: argparse.Namespace) -> int:
    if args.json:
        print(render_json(run, args.timing))
    else:
        print(render_table(run, args.timing))
    if args.csv:
        write_csv(frames, args.csv)
    if run.seconds is not None:
        logger.info("wall time %.3fs", run.seconds)
    if not run.ok:
        failed = [name for name, ok in run.checks.items() if not ok]
        logger.error("failed checks: %s", "; ".join(failed))
        return EXIT_FAILED
    return EXIT_OK


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_eval(args: argparse.Namespace, expected_kind=None) -> int:
    descriptor = load_descriptor(args.file, _validator(args))
    run, frames = evaluate_descriptor(descriptor, _eval_options(args), expected_kind)
    if args.command != "eval":
        run.command = f"{args.command} {args.action}"
    return _emit(run, frames, args)


def cmd_p2wb_eval(args: argparse.Namespace) -> int:
    if args.file:
        return cmd_eval(args, ("weighted_blowup", "plane_divisor"))
    if args.d is not None:
        descriptor = PairDescriptor("plane_divisor", PlaneDivisorCase(args.d))
    elif args.a is not None and args.b is not None:
        tau = parse_rational(args.tau) if args.tau else None
        descriptor = PairDescriptor("weighted_blowup", WeightedBlowupDescriptor(args.a, args.b, tau))
    else:
        raise PreconditionError("p2wb eval needs a descriptor file, --a and --b, or --d")
    run, frames = evaluate_descriptor(descriptor, _eval_options(args))
    return _emit(run, frames, args)


def cmd_p2wb_sweep(args: argparse.Namespace) -> int:
    run, frames = sweep_weighted_blowups(args.max_a, _eval_options(args))
    run.input = {"max_a": args.max_a}
    return _emit(run, frames, args)


def cmd_convert(args: argparse.Namespace) -> int:
    run = convert_thresholds(args.n, delta=args.delta, epsilon=args.epsilon, with_float=args.float)
    return _emit(run, [], args)


def cmd_verify(args: argparse.Namespace) -> int:
    options = SuiteOptions(
        seed=args.seed,
        samples=args.samples,
        max_a=args.max_a,
        k=args.k,
        radius=args.radius,
        show_progress=args.progress,
    )
    run = verify(args.suite, options, args.timing)
    table = pd.DataFrame([{k: v for k, v in r.items() if k != "details"} for r in run.reports])
    return _emit(run, [table], args)


def cmd_validate(args: argparse.Namespace) -> int:
    validator = _validator(args)
    ok, errors = validator.validate_file(args.file)
    if ok:
        print(f"{args.file}: valid")
        return EXIT_OK
    print(f"{args.file}: invalid")
    for error in errors:
        print(f"  - {error}")
    if args.suggest_fixes:
        try:
            data, _ = load_document(args.file)
        except KStabError:
            data = None
        for hint in validator.suggest_fixes(data) if data is not None else []:
            print(f"  hint: {hint}")
    return EXIT_INPUT


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "eval":
        return cmd_eval(args)
    if args.command == "p1":
        return cmd_eval(args, "p1")
    if args.command == "toric":
        if args.action == "eval":
            args.radius = None
        return cmd_eval(args, "toric")
    if args.command == "p2wb":
        return cmd_p2wb_eval(args) if args.action == "eval" else cmd_p2wb_sweep(args)
    if args.command == "convert":
        return cmd_convert(args)
    if args.command == "verify":
        return cmd_verify(args)
    return cmd_validate(args)


def main(argv: Optional[List[str]] = None) -> int:
    configure_stdio()
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    if not argv:
        parser.print_help()
        return EXIT_OK
    args = parser.parse_args(argv)
    configure_logging(getattr(args, "verbose", False))
    try:
        return dispatch(args)
    except ConsistencyError as exc:
        logger.error("consistency error: %s", exc)
        return EXIT_FAILED
    except KStabError as exc:
        logger.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
