"""Command-line entry point: ``calctune {generate,solve,tune,report,study}``."""
import argparse
import logging
import os
import sys

from . import io
from .calculi import CALCULI
from .errors import CalctuneError
from .mce import DEFAULT_GRID
from .sampler import DEFAULT_COUNT
from .study import (
    FILES, StageError, StudyConfig, generate_networks, norm_rows, norms_from_rows,
    report_from_files, run_study, solve_norms, tune_networks, tuned_document,
)
from .tuner import TunerConfig


def _grid(text):
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError("grid must be comma-separated numbers") from None
    if not values or any(not 0.0 <= v <= 1.0 for v in values):
        raise argparse.ArgumentTypeError("grid values must lie in [0, 1]")
    return values


def _methods(text):
    if text.strip().lower() == "all":
        return CALCULI
    names = tuple(m.strip().lower() for m in text.split(",") if m.strip())
    bad = [m for m in names if m not in CALCULI]
    if bad or not names:
        raise argparse.ArgumentTypeError("unknown method(s): %s" % ", ".join(bad or [text]))
    # canonical order keeps report layouts stable
    return tuple(m for m in CALCULI if m in names)


def _flag(text):
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError("expected true or false, got %r" % text)


def _add_tuning_args(p):
    p.add_argument("--methods", type=_methods, default=CALCULI,
                   help="comma-separated calculi or 'all' (default: all)")
    p.add_argument("--restarts", type=int, default=4, help="random starts per fit")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mycin-clamp", type=_flag, nargs="?", const=True, default=False,
                   metavar="BOOL", help="ignore evidence that fell below its base rate")


def build_parser():
    parser = argparse.ArgumentParser(prog="calctune", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample networks uniformly from the simplex")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--networks", type=int, default=DEFAULT_COUNT)
    p.add_argument("--out", required=True)

    p = sub.add_parser("solve", help="cross-entropy norms at every probe")
    p.add_argument("--networks", required=True)
    p.add_argument("--grid", type=_grid, default=DEFAULT_GRID)
    p.add_argument("--out", required=True)

    p = sub.add_parser("tune", help="tune calculi against stored norms")
    p.add_argument("--networks", required=True)
    p.add_argument("--norms", required=True)
    _add_tuning_args(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("report", help="rebuild the report from stored stage files")
    p.add_argument("--networks")
    p.add_argument("--norms")
    p.add_argument("--tuned")
    p.add_argument("--out", required=True, help="directory (also the default input location)")

    p = sub.add_parser("study", help="run every stage end to end")
    p.add_argument("--networks", type=int, default=DEFAULT_COUNT)
    p.add_argument("--networks-file", help="load networks from CSV instead of sampling")
    p.add_argument("--grid", type=_grid, default=DEFAULT_GRID)
    _add_tuning_args(p)
    p.add_argument("--out", required=True)
    return parser


def _grid_from_norms(grouped):
    seen = []
    for rows in grouped.values():
        for p1, *_ in rows:
            if p1 not in seen:
                seen.append(p1)
    return tuple(seen)


def _stage(name, func, *args):
    try:
        return func(*args)
    except StageError:
        raise
    except (CalctuneError, OSError, KeyError, ValueError) as exc:
        raise StageError(name, str(exc)) from exc


def cmd_generate(args):
    if args.networks < 1:
        raise StageError("generate", "--networks must be >= 1")
    ids, tables = generate_networks(args.seed, args.networks)
    _stage("generate", io.write_networks, args.out, ids, tables)


def cmd_solve(args):
    ids, tables = _stage("solve", io.read_networks, args.networks)
    norms = solve_norms(ids, tables, args.grid)
    _stage("solve", io.write_norms, args.out, norm_rows(ids, norms))


def cmd_tune(args):
    ids, tables = _stage("tune", io.read_networks, args.networks)
    grouped = _stage("tune", io.read_norms, args.norms)
    norms = norms_from_rows(grouped)
    config = TunerConfig(restarts=args.restarts, seed=args.seed, mycin_clamp=args.mycin_clamp)
    tuned = tune_networks(ids, tables, norms, args.methods, config)
    doc = tuned_document(ids, tuned, config, _grid_from_norms(grouped), args.methods)
    _stage("tune", io.write_json, args.out, doc)


def cmd_report(args):
    os.makedirs(args.out, exist_ok=True)
    _stage("report", report_from_files, args.out, args.networks, args.norms, args.tuned)


def cmd_study(args):
    config = StudyConfig(
        seed=args.seed, networks=args.networks, grid=args.grid, methods=args.methods,
        restarts=args.restarts, mycin_clamp=args.mycin_clamp,
        networks_path=args.networks_file, out_dir=args.out,
    )
    report = run_study(config)
    print(os.path.join(args.out, FILES["report_md"]))
    for m in report.methods:
        print("%-13s average RMSE %.5f" % (m, report.average[m]))


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "tune": cmd_tune,
    "report": cmd_report,
    "study": cmd_study,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except StageError as exc:
        print("calctune: %s" % exc, file=sys.stderr)
        return 2
    except (CalctuneError, OSError) as exc:
        print("calctune: [%s] %s" % (args.command, exc), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
