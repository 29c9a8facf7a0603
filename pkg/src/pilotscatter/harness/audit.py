"""Recount tag BER from a JSON-lines packet transcript."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class AuditLine:
    protocol: str
    mode: str
    distance_m: float
    reported_ber: float
    recounted_ber: float
    reported_received: int
    recounted_received: int

    @property
    def ok(self) -> bool:
        return self.reported_received == self.recounted_received and math.isclose(
            self.reported_ber, self.recounted_ber, rel_tol=1e-12, abs_tol=1e-15
        )


def audit_transcript(path: str | Path) -> list[AuditLine]:
    """One :class:`AuditLine` per distance summary in the transcript.

    Packet records are tallied until the next ``point`` record, which closes
    the distance and carries the reported figures.
    """
    errors = total = received = 0
    lines = []
    with open(path) as fh:
        for n, raw in enumerate(fh, 1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{n}: {exc.msg}") from None
            kind = rec.get("kind")
            if kind == "packet":
                if rec["delivered"]:
                    sent, got = rec["tag_sent"], rec["tag_decoded"]
                    if got is None or len(sent) != len(got):
                        raise ValueError(f"{path}:{n}: decoded tag bits missing or of the wrong length")
                    errors += sum(a != b for a, b in zip(sent, got))
                    total += len(sent)
                    received += 1
            elif kind == "point":
                lines.append(AuditLine(
                    rec["protocol"], rec["mode"], float(rec["distance_m"]),
                    float(rec["tag_ber"]), errors / total if total else 0.0,
                    int(rec["packets_received"]), received,
                ))
                errors = total = received = 0
            else:
                raise ValueError(f"{path}:{n}: unknown record kind {kind!r}")
    return lines
