"""Command line front-end: ``homsim {run,scan,decompose,synthesize,verify}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .errors import HomError, InvalidArgument
from .scenario import SCENARIO_SCHEMA, execute, load_scenario

log = logging.getLogger("homsim")

TASK_COMMANDS = ("run", "scan", "decompose", "synthesize", "verify")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homsim",
        description="Simulate two-photon interference at passive and active beam splitters.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in TASK_COMMANDS:
        p = sub.add_parser(name, help=f"run the scenario with task={name}")
        p.add_argument("--config", required=True, metavar="PATH", help="scenario JSON file")
        p.add_argument("--out", metavar="DIR", help="output folder (default: no files written)")
        p.add_argument("--grid-n", type=int, metavar="N",
                       help="override the point count of every grid")
        p.add_argument("--quiet", action="store_true", help="suppress the summary on stdout")
    sub.add_parser("schema", help="print the scenario JSON schema")
    return parser


def _summary(report) -> str:
    lines = [f"task: {report.task}"]
    if report.probabilities is not None:
        p = report.probabilities
        lines.append(f"P_RR={p.p_rr:.12g} P_RB={p.p_rb:.12g} P_BB={p.p_bb:.12g}")
    if report.condition_residual is not None:
        lines.append(f"condition residual: {report.condition_residual:.3g}")
    if report.sigma:
        head = ", ".join(f"{s:.10g}" for s in report.sigma[:8])
        more = " ..." if len(report.sigma) > 8 else ""
        lines.append(f"sigma: [{head}{more}]")
    for name in report.outputs:
        lines.append(f"wrote {name}")
    lines.append(f"config hash: {report.config_hash}")
    return "\n".join(lines)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "schema":
        print(json.dumps(SCENARIO_SCHEMA, indent=2, sort_keys=True))
        return 0
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.grid_n is not None and args.grid_n < 1:
            raise InvalidArgument("--grid-n must be >= 1")
        scenario = load_scenario(args.config, task=args.command)
        if args.grid_n is not None:
            scenario = scenario.with_grid_n(args.grid_n)
        report = execute(scenario, args.out)
    except HomError as exc:
        print(f"homsim: error: {exc}", file=sys.stderr)
        return exc.exit_code
    if not args.quiet:
        print(_summary(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
