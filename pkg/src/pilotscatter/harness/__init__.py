"""Scenario files, sweep runner, CSV output and the command line."""

from .audit import AuditLine, audit_transcript
from .report import CSV_HEADER, emit_csv, emit_tradeoff_csv, read_csv
from .runner import LinkMetrics, TradeoffRow, point_seed, run_scenario, run_tradeoff_report
from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario

__all__ = [
    "AuditLine", "audit_transcript", "CSV_HEADER", "emit_csv", "emit_tradeoff_csv", "read_csv",
    "LinkMetrics", "TradeoffRow", "point_seed", "run_scenario", "run_tradeoff_report",
    "Scenario", "ScenarioError", "load_scenario", "parse_scenario",
]
