"""Command line entry point: ``coeba run|compare|scenarios|report``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import harness


def _cmd_run(args) -> int:
    overrides = harness.read_config_file(args.config) if args.config else None
    solvers = ["coeba", "mfea"] if args.solver == "both" else [args.solver]
    for solver in solvers:
        records = harness.run_experiment(
            args.scenario, solver, harness.parse_seeds(args.seeds), args.budget,
            overrides=overrides, out_dir=args.out, workers=args.workers)
        for r in records:
            print(f"{r.scenario} {r.solver} seed={r.seed} evals={r.evaluations_used} "
                  f"best={r.best_fitness} ({r.wall_clock_seconds:.1f}s)")
    return 0


def _cmd_compare(args) -> int:
    a = harness.load_records(args.in_dir, args.scenario, args.first)
    b = harness.load_records(args.in_dir, args.scenario, args.second)
    report = harness.compare(a, b)
    print(json.dumps(report.to_dict(), indent=1) if args.json else report.to_text())
    return 0


def _cmd_scenarios(args) -> int:
    for s in harness.builtin_scenarios():
        print(f"{s.name:<16} {' '.join(s.instance_names)}")
    return 0


def _cmd_report(args) -> int:
    reports = harness.report_all(args.in_dir, args.out)
    out = Path(args.out or args.in_dir)
    print((out / "report.txt").read_text(encoding="utf-8"), end="")
    if not reports:
        print("no scenario has runs of both solvers", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coeba", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one solver on a scenario for several seeds")
    p.add_argument("--scenario", required=True)
    p.add_argument("--solver", choices=["coeba", "mfea", "both"], required=True)
    p.add_argument("--seeds", default="1-20", help="e.g. 1-20 or 1,2,5 (default 1-20)")
    p.add_argument("--budget", type=int, default=500_000)
    p.add_argument("--config", help="flat key = value file of solver parameters")
    p.add_argument("--out", default="results")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("compare", help="compare two solvers on one scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--in", dest="in_dir", default="results")
    p.add_argument("--first", default="coeba")
    p.add_argument("--second", default="mfea")
    p.add_argument("--json", action="store_true", help="print the JSON report")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("scenarios", help="list the built-in scenarios")
    p.add_argument("--list", action="store_true", default=True)
    p.set_defaults(func=_cmd_scenarios)

    p = sub.add_parser("report", help="verdict and per-instance tables for all scenarios")
    p.add_argument("--all", action="store_true", default=True)
    p.add_argument("--in", dest="in_dir", default="results")
    p.add_argument("--out", default=None, help="directory for report.* (default: --in)")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
