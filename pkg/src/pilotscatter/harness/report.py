"""CSV output for sweep results and trade-off tables."""

from __future__ import annotations

import csv
import dataclasses
from pathlib import Path
from typing import Iterable, Sequence

from .runner import LinkMetrics, TradeoffRow

CSV_HEADER = tuple(f.name for f in dataclasses.fields(LinkMetrics))
TRADEOFF_HEADER = tuple(f.name for f in dataclasses.fields(TradeoffRow))


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write(path: str | Path, header: Sequence[str], rows: Iterable) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in dataclasses.astuple(row)])


def emit_csv(rows: Iterable[LinkMetrics], path: str | Path) -> None:
    """Write sweep rows; floats use ``repr`` so reading them back is exact."""
    _write(path, CSV_HEADER, rows)


def emit_tradeoff_csv(rows: Iterable[TradeoffRow], path: str | Path) -> None:
    _write(path, TRADEOFF_HEADER, rows)


def read_csv(path: str | Path) -> list[LinkMetrics]:
    types = {f.name: f.type for f in dataclasses.fields(LinkMetrics)}
    conv = {"str": str, "int": int, "float": float}
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        for rec in reader:
            out.append(LinkMetrics(**{k: conv[types[k]](v) for k, v in rec.items()}))
    return out
