"""Aircraft objects: full kinematic and operational state plus pilot intent.

The pilot agent lives here as the pending-clearance queue on the intent:
clearances are enqueued with their execution time (issue latency applied by
the world) and folded into the intent channels when due. Lateral, vertical,
and speed intent supersede independently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..airspace import FlightPlan
from ..atmosphere import SpeedState
from ..perf.model import CorrectionSample
from ..perf.tem import Kinematics


@dataclass
class LateralIntent:
    mode: str                 # "route" | "heading"
    leg_index: int = 0        # next waypoint index when route-following
    heading: float = 0.0      # held heading when heading mode
    direct_waypoint: str | None = None   # off-route direct-to target
    turn_direction: str | None = None    # forced direction for the current turn


@dataclass
class VerticalIntent:
    mode: str                 # "level" | "climbing" | "descending"
    target_fl: float
    constraint: tuple[float, str] | None = None   # (fl, waypoint) level-by
    tod_dist_to_go: float | None = None  # start descent when this close to the abeam point
    pending_target: float | None = None  # cleared level awaiting the top of descent


@dataclass
class SpeedIntent:
    commanded_cas: float | None = None
    commanded_mach: float | None = None
    commanded_rocd: float | None = None
    cruise_cas: float | None = None
    cruise_mach: float | None = None


@dataclass
class PendingClearance:
    execute_at: float
    seq: int
    clearance: object


@dataclass
class Intent:
    lateral: LateralIntent
    vertical: VerticalIntent
    speed: SpeedIntent = field(default_factory=SpeedIntent)
    pending: list[PendingClearance] = field(default_factory=list)

    def enqueue(self, execute_at: float, seq: int, clearance) -> None:
        self.pending.append(PendingClearance(execute_at, seq, clearance))
        self.pending.sort(key=lambda p: (p.execute_at, p.seq))

    def due(self, now: float) -> list[PendingClearance]:
        hit = [p for p in self.pending if p.execute_at <= now]
        self.pending = [p for p in self.pending if p.execute_at > now]
        return hit


@dataclass
class AircraftState:
    callsign: str
    kin: Kinematics
    intent: Intent
    plan: FlightPlan
    source: str                    # "replay" | "simulated"
    controlling_group: str | None = None
    comms_group: str | None = None
    selected_fl: float | None = None
    track: object | None = None    # RecordedTrack when source == replay
    corrections: dict[str, CorrectionSample] = field(default_factory=dict)  # per phase
    planned_tod: dict[tuple, float] = field(default_factory=dict)  # (fl, wp) -> dist-to-go
    pending_conversion: bool = False
    quarantined: bool = False
    fuel_kg: float = 0.0
    cruise_time_s: float = 0.0
    below_requested_s: float = 0.0
    exited: bool = False
    clearance_count: int = 0

    @property
    def position(self) -> tuple[float, float]:
        return (self.kin.lat, self.kin.lon)

    @property
    def fl(self) -> float:
        return self.kin.fl

    @property
    def heading(self) -> float:
        return self.kin.heading

    @property
    def rocd(self) -> float:
        return self.kin.rocd

    def speeds(self, schedule_mach: float) -> SpeedState:
        return SpeedState.from_cas(self.kin.cas, self.kin.fl, schedule_mach)

    def phase(self) -> str:
        if self.intent.vertical.mode == "climbing":
            return "climb"
        if self.intent.vertical.mode == "descending":
            return "descent"
        return "level"

    def snapshot_dict(self) -> dict:
        v = self.intent.vertical
        return {
            "callsign": self.callsign,
            "lat": self.kin.lat,
            "lon": self.kin.lon,
            "fl": self.kin.fl,
            "heading": self.kin.heading,
            "cas": self.kin.cas,
            "rocd": self.kin.rocd,
            "dist_nm": self.kin.dist_nm,
            "source": self.source,
            "controlling_group": self.controlling_group,
            "comms_group": self.comms_group,
            "selected_fl": self.selected_fl,
            "vertical_mode": v.mode,
            "target_fl": v.target_fl,
            "quarantined": self.quarantined,
            "fuel_kg": self.fuel_kg,
        }


def initial_intent(route_leg_index: int, heading: float, fl: float,
                   cruise: tuple[float, float] | None = None) -> Intent:
    speed = SpeedIntent()
    if cruise is not None:
        speed.cruise_cas, speed.cruise_mach = cruise
    return Intent(
        lateral=LateralIntent(mode="route", leg_index=route_leg_index, heading=heading),
        vertical=VerticalIntent(mode="level", target_fl=fl),
        speed=speed,
    )
