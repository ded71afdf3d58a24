"""Observation building and the in-process gym-style environment.

Observations are views of the last committed radar snapshot, filtered to a
session's area of interest (its groups' sector footprints plus a horizon
buffer). They carry forecast-wind access only; the truth grid and other
aircraft's sampled corrections never serialize.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .. import geo
from ..atmosphere import cas_to_tas, ground_vector
from ..kernel.clearances import Clearance, clearance_from_dict
from ..kernel.world import World
from ..scenario.files import ScenarioSpec, load_scenario, world_from_spec

DEFAULT_BUFFER_NM = 30.0


def _lateral_distance_to_sector_nm(lat: float, lon: float, sector) -> float:
    if sector.contains_lateral(lat, lon):
        return 0.0
    best = float("inf")
    poly = sector.lateral_boundary
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        seg = geo.great_circle_nm(a[0], a[1], b[0], b[1])
        if seg < 1e-9:
            best = min(best, geo.great_circle_nm(lat, lon, a[0], a[1]))
            continue
        at = geo.along_track_nm(lat, lon, a[0], a[1], b[0], b[1])
        if 0.0 <= at <= seg:
            best = min(best, abs(geo.cross_track_nm(lat, lon, a[0], a[1], b[0], b[1])))
        else:
            best = min(best,
                       geo.great_circle_nm(lat, lon, a[0], a[1]),
                       geo.great_circle_nm(lat, lon, b[0], b[1]))
    return best


def aircraft_in_area(world: World, groups: set[str] | None,
                     buffer_nm: float = DEFAULT_BUFFER_NM) -> list:
    """Aircraft inside (or within the buffer of) the groups' sectors; all
    aircraft when groups is None."""
    acs = [a for a in world.aircraft.values()]
    if groups is None:
        return acs
    sectors = [
        world.airspace.sector(sid)
        for gid, members in world.bandbox.groups if gid in groups
        for sid in sorted(members)
    ]
    out = []
    for ac in acs:
        for s in sectors:
            if _lateral_distance_to_sector_nm(ac.kin.lat, ac.kin.lon, s) <= buffer_nm:
                out.append(ac)
                break
    return out


def _ground_speed_kt(world: World, ac) -> float:
    if ac.source == "replay":
        return ac.track.sample_at(min(world.sim_time, ac.track.t_end))["gs"]
    tas = cas_to_tas(ac.kin.cas, ac.kin.fl)
    uv = world.truth_grid_now().wind_at(ac.kin.lat, ac.kin.lon, ac.kin.fl)
    return ground_vector(tas, ac.kin.heading, uv)[0]


def build_observation(world: World, groups: set[str] | None = None,
                      buffer_nm: float = DEFAULT_BUFFER_NM,
                      intents: dict | None = None,
                      include_intents: bool = False) -> dict:
    aircraft = []
    for ac in sorted(aircraft_in_area(world, groups, buffer_nm),
                     key=lambda a: a.callsign):
        entry = {
            "callsign": ac.callsign,
            "lat": ac.kin.lat,
            "lon": ac.kin.lon,
            "fl": ac.kin.fl,
            "heading": ac.kin.heading,
            "ground_speed_kt": _ground_speed_kt(world, ac),
            "rocd_fpm": ac.kin.rocd,
            "selected_fl": ac.selected_fl,
            "cleared_fl": ac.intent.vertical.target_fl,
            "vertical_mode": ac.intent.vertical.mode,
            "source": ac.source,
            "controlling_group": ac.controlling_group,
            "comms_group": ac.comms_group,
            "plan": {
                "aircraft_type": ac.plan.aircraft_type,
                "route": list(ac.plan.route),
                "requested_fl": ac.plan.requested_fl,
                "departure": ac.plan.departure,
                "destination": ac.plan.destination,
            },
        }
        if include_intents and intents and ac.callsign in intents:
            entry["published_intent"] = intents[ac.callsign][1]
        aircraft.append(entry)
    coords = [
        {
            "callsign": c.callsign, "from_group": c.from_group,
            "to_group": c.to_group, "transfer_fl": c.transfer_fl,
            "transfer_point": list(c.transfer_point) if c.transfer_point else None,
            "estimate": c.estimate, "status": c.status,
        }
        for c in world.coordinations
        if groups is None or c.from_group in groups or c.to_group in groups
    ]
    snaps = world.log.snapshots()
    last = snaps[-1] if snaps else None
    return {
        "sim_time": world.sim_time,
        "aircraft": aircraft,
        "coordinations": coords,
        "open_los": sorted(list(p) for p in world.open_los),
        "reward_last_tick": last["reward"] if last else 0.0,
        "min_norm_sep": last["min_norm_sep"] if last else None,
        "done": world.done(),
        "wind_access": "forecast",
    }


def forecast_wind_lookup(world: World, points: list) -> list:
    """Forecast-grid wind at the requested (lat, lon, fl) points; this is the
    only wind exposure any session gets."""
    out = []
    for p in points:
        u, v = world.wind_forecast.wind_at(float(p[0]), float(p[1]), float(p[2]),
                                           world.sim_time)
        out.append([u, v])
    return out


@dataclass
class StepResult:
    observation: dict
    reward: float
    done: bool
    info: dict


class TwinEnv:
    """Stepwise environment: reset/step against one scenario spec."""

    def __init__(self, scenario: str | Path | ScenarioSpec, models=None,
                 groups: set[str] | None = None, buffer_nm: float = DEFAULT_BUFFER_NM,
                 latency_override=None):
        if isinstance(scenario, (str, Path)):
            self.spec = load_scenario(scenario)
        else:
            self.spec = scenario
        self.models = models
        self.groups = groups
        self.buffer_nm = buffer_nm
        self.latency_override = latency_override
        self.world: World | None = None

    def reset(self, seed: int | None = None) -> dict:
        doc = dict(self.spec.doc)
        if seed is not None:
            doc = {**doc, "seed": seed}
        self.world = world_from_spec(ScenarioSpec(doc), models=self.models,
                                     latency_override=self.latency_override)
        return build_observation(self.world, self.groups, self.buffer_nm)

    def step(self, actions=(), n_ticks: int = 1) -> StepResult:
        if self.world is None:
            raise RuntimeError("reset() before step()")
        if n_ticks < 1:
            raise ValueError("n_ticks must be >= 1")
        rejected = []
        accepted = []
        for callsign, clearance in actions:
            if isinstance(clearance, dict):
                clearance = clearance_from_dict(clearance)
            ack = self.world.issue_clearance(callsign, clearance, issuer="env")
            (accepted if ack.accepted else rejected).append(
                {"callsign": callsign, **ack.to_dict()})
        reward = 0.0
        events = []
        for _ in range(n_ticks):
            if self.world.done():
                break
            before = len(self.world.log.records)
            self.world.tick()
            for rec in self.world.log.records[before:]:
                if rec["kind"] == "snapshot":
                    reward += rec["reward"]
                elif rec["kind"] in ("separation", "metric", "coordination", "level-off"):
                    events.append(rec)
        obs = build_observation(self.world, self.groups, self.buffer_nm)
        return StepResult(
            observation=obs,
            reward=reward,
            done=self.world.done(),
            info={"accepted": accepted, "rejected": rejected, "events": events},
        )
