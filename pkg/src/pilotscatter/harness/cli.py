"""Command line: ``run``, ``tradeoff`` and ``audit``."""

from __future__ import annotations

import argparse
import contextlib
import dataclasses
import logging
import sys

from ..chipplan import Mode
from ..protocols import ProtocolId
from .audit import audit_transcript
from .report import emit_csv, emit_tradeoff_csv
from .runner import run_scenario, run_tradeoff_report
from .scenario import ScenarioError, load_scenario

log = logging.getLogger("pilotscatter")


def _upper(choices):
    def conv(text: str) -> str:
        value = text.strip().upper()
        if value not in choices:
            raise argparse.ArgumentTypeError(f"expected one of {', '.join(choices)}")
        return value
    return conv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pilotscatter", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a distance sweep and write a CSV")
    run.add_argument("--scenario", required=True)
    run.add_argument("--out", required=True)
    run.add_argument("--seed", type=int)
    run.add_argument("--protocol", type=_upper([p.value for p in ProtocolId]))
    run.add_argument("--mode", type=_upper([m.value for m in Mode]))
    run.add_argument("--count-raw", action="store_true", help="count delivered packets even if they fail the check")
    run.add_argument("--transcript", help="write a JSON-lines packet transcript here")
    run.add_argument("--workers", type=int)

    trade = sub.add_parser("tradeoff", help="tabulate ideal rates for all three modes")
    trade.add_argument("--scenario", required=True)
    trade.add_argument("--out", required=True)

    audit = sub.add_parser("audit", help="recount tag BER from a transcript")
    audit.add_argument("--transcript", required=True)
    return parser


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
        changes["channel"] = dataclasses.replace(scenario.channel, seed=args.seed)
    if args.protocol:
        changes["protocol"] = ProtocolId(args.protocol)
    if args.mode:
        changes["mode"] = Mode(args.mode)
    if args.count_raw:
        changes["count_raw"] = True
    if args.workers:
        changes["workers"] = args.workers
    try:
        scenario = scenario.replace(**changes)
        scenario.plan()
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    with contextlib.ExitStack() as stack:
        transcript = stack.enter_context(open(args.transcript, "w")) if args.transcript else None
        rows = run_scenario(scenario, transcript)
    emit_csv(rows, args.out)
    log.info("wrote %d rows to %s", len(rows), args.out)
    return 0


def _cmd_tradeoff(args) -> int:
    scenario = load_scenario(args.scenario)
    rows = run_tradeoff_report(scenario)
    emit_tradeoff_csv(rows, args.out)
    for row in rows:
        print(f"{row.mode}: tag {row.tag_rate_kbps:.2f} kbps, productive {row.productive_rate_kbps:.2f} kbps")
    return 0


def _cmd_audit(args) -> int:
    lines = audit_transcript(args.transcript)
    bad = 0
    for line in lines:
        status = "OK" if line.ok else "MISMATCH"
        bad += not line.ok
        print(
            f"{status} {line.protocol} {line.mode} d={line.distance_m:g} "
            f"reported_ber={line.reported_ber!r} recounted_ber={line.recounted_ber!r} "
            f"received={line.recounted_received}/{line.reported_received}"
        )
    print(f"{len(lines) - bad}/{len(lines)} points consistent")
    return 1 if bad or not lines else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handler = {"run": _cmd_run, "tradeoff": _cmd_tradeoff, "audit": _cmd_audit}[args.command]
    try:
        return handler(args)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
