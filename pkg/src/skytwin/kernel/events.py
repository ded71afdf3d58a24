"""The replayable event log.

Records are plain dicts totally ordered by (sim time, sequence). The file
form is JSON Lines with a schema-version header; serialization is canonical
(sorted keys, fixed separators, shortest-roundtrip floats) so identical runs
produce byte-identical files and load/save round-trips exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

LOG_SCHEMA_VERSION = 1


@dataclass
class EventLog:
    records: list[dict] = field(default_factory=list)
    _seq: int = 0

    def append(self, t: float, kind: str, **payload) -> dict:
        rec = {"t": t, "seq": self._seq, "kind": kind, **payload}
        self._seq += 1
        self.records.append(rec)
        return rec

    def of_kind(self, kind: str) -> list[dict]:
        return [r for r in self.records if r["kind"] == kind]

    def snapshots(self) -> list[dict]:
        return self.of_kind("snapshot")

    def canonical_lines(self) -> list[str]:
        head = json.dumps(
            {"schema_version": LOG_SCHEMA_VERSION, "kind": "header"},
            sort_keys=True, separators=(",", ":"),
        )
        return [head] + [
            json.dumps(r, sort_keys=True, separators=(",", ":")) for r in self.records
        ]

    def canonical_bytes(self) -> bytes:
        return ("\n".join(self.canonical_lines()) + "\n").encode()


def save_event_log(log: EventLog, path: str | Path) -> None:
    Path(path).write_bytes(log.canonical_bytes())


def load_event_log(path: str | Path) -> EventLog:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError("empty event log file")
    head = json.loads(lines[0])
    if head.get("schema_version") != LOG_SCHEMA_VERSION:
        raise ValueError(f"unsupported event log schema {head.get('schema_version')}")
    log = EventLog()
    for line in lines[1:]:
        rec = json.loads(line)
        log.records.append(rec)
    log._seq = (log.records[-1]["seq"] + 1) if log.records else 0
    return log
