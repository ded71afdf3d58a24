"""Recorded radar tracks: ingestion, quality flags, interpolation.

Input rows arrive as tabular data at roughly 6 s cadence. Rows are grouped
by callsign and time-sorted; gaps over 60 s and level jumps over 20 FL are
flagged but never dropped.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

GAP_FLAG_S = 60.0
FL_JUMP_FLAG = 20.0

REQUIRED_COLUMNS = ("callsign", "t", "lat", "lon", "fl", "gs", "hdg")


@dataclass
class TrackRow:
    t: float
    lat: float
    lon: float
    fl: float
    gs: float
    hdg: float
    quality: str = "ok"    # "ok" | "gap-after" | "fl-jump"


@dataclass
class RecordedTrack:
    callsign: str
    rows: list[TrackRow]
    transfer_events: list[tuple[float, str]] = field(default_factory=list)
    selected_fl: float | None = None
    flags: list[str] = field(default_factory=list)

    def __post_init__(self):
        ts = [r.t for r in self.rows]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError(f"track {self.callsign}: sample times not strictly increasing")
        self._t = np.array(ts)
        self._lat = np.array([r.lat for r in self.rows])
        self._lon = np.array([r.lon for r in self.rows])
        self._fl = np.array([r.fl for r in self.rows])
        self._gs = np.array([r.gs for r in self.rows])
        # unwrap heading so interpolation crosses north cleanly
        hdg = np.radians([r.hdg for r in self.rows])
        self._hdg_unwrapped = np.degrees(np.unwrap(hdg))

    @property
    def t_start(self) -> float:
        return float(self._t[0])

    @property
    def t_end(self) -> float:
        return float(self._t[-1])

    def sample_at(self, t: float) -> dict:
        """Piecewise-linear state at time t (clamped to the recorded span)."""
        return {
            "lat": float(np.interp(t, self._t, self._lat)),
            "lon": float(np.interp(t, self._t, self._lon)),
            "fl": float(np.interp(t, self._t, self._fl)),
            "gs": float(np.interp(t, self._t, self._gs)),
            "hdg": float(np.interp(t, self._t, self._hdg_unwrapped)) % 360.0,
        }

    def to_dict(self) -> dict:
        return {
            "callsign": self.callsign,
            "samples": [[r.t, r.lat, r.lon, r.fl, r.gs, r.hdg] for r in self.rows],
            "transfer_events": [[t, g] for t, g in self.transfer_events],
            "selected_fl": self.selected_fl,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RecordedTrack":
        rows = [TrackRow(*s) for s in d["samples"]]
        track = cls(
            callsign=d["callsign"],
            rows=rows,
            transfer_events=[(t, g) for t, g in d.get("transfer_events", [])],
            selected_fl=d.get("selected_fl"),
        )
        attach_quality_flags(track)
        return track


def attach_quality_flags(track: RecordedTrack) -> None:
    for a, b in zip(track.rows, track.rows[1:]):
        if b.t - a.t > GAP_FLAG_S:
            a.quality = "gap-after"
            track.flags.append(f"gap {b.t - a.t:.0f}s after t={a.t:.0f}")
        if abs(b.fl - a.fl) > FL_JUMP_FLAG:
            b.quality = "fl-jump"
            track.flags.append(f"FL jump {abs(b.fl - a.fl):.0f} at t={b.t:.0f}")


def import_tracks(raw: str | Path) -> tuple[list[RecordedTrack], list[dict]]:
    """Parse tabular track data (CSV text or a path to it).

    Returns (tracks, row_errors); unparseable rows are reported per row and
    skipped, the import continues.
    """
    text = Path(raw).read_text() if isinstance(raw, Path) else raw
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or any(c not in reader.fieldnames for c in REQUIRED_COLUMNS):
        raise ValueError(f"track data must carry columns {REQUIRED_COLUMNS}")

    grouped: dict[str, list[TrackRow]] = {}
    errors: list[dict] = []
    for line_no, row in enumerate(reader, start=2):
        try:
            cs = row["callsign"].strip()
            if not cs:
                raise ValueError("empty callsign")
            parsed = TrackRow(
                t=float(row["t"]), lat=float(row["lat"]), lon=float(row["lon"]),
                fl=float(row["fl"]), gs=float(row["gs"]), hdg=float(row["hdg"]),
            )
            if not all(map(math.isfinite, (parsed.t, parsed.lat, parsed.lon,
                                           parsed.fl, parsed.gs, parsed.hdg))):
                raise ValueError("non-finite value")
        except (KeyError, ValueError) as e:
            errors.append({"line": line_no, "error": str(e)})
            continue
        grouped.setdefault(cs, []).append(parsed)

    tracks = []
    for cs in sorted(grouped):
        rows = sorted(grouped[cs], key=lambda r: r.t)
        # collapse duplicate timestamps, keeping the first
        dedup = [rows[0]]
        for r in rows[1:]:
            if r.t > dedup[-1].t:
                dedup.append(r)
            else:
                errors.append({"line": None, "error": f"{cs}: duplicate sample at t={r.t}"})
        track = RecordedTrack(callsign=cs, rows=dedup)
        attach_quality_flags(track)
        tracks.append(track)
    return tracks, errors
