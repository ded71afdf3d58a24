"""Scenario file format: schema-versioned JSON, canonical serialization.

Loading validates every cross-reference and invariant and rejects (never
repairs) bad input with a field-path-precise error carrying a machine
readable code. Saving is canonical (sorted keys, fixed indent), so
save -> load -> save is byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..airspace import (
    AirspaceDefinition,
    AirspaceError,
    BandboxConfig,
    FlightPlan,
    Sector,
    Waypoint,
)
from ..atmosphere import WindGrid, WindSequence
from ..kernel.coordination import Coordination
from ..kernel.world import LatencyModel, World
from ..perf.tem import Kinematics
from .tracks import RecordedTrack

SCENARIO_SCHEMA_VERSION = 1

UNITS_NOTE = {
    "fl": "flight level (hundreds of feet)",
    "speed": "knots CAS unless suffixed _mach",
    "distance": "nautical miles",
    "time": "seconds from scenario start",
    "wind": "m/s east (u) and north (v) components",
}


class ScenarioError(ValueError):
    def __init__(self, code: str, path: str, message: str):
        super().__init__(f"[{code}] {path}: {message}")
        self.code = code
        self.path = path


@dataclass
class ScenarioSpec:
    doc: dict

    @property
    def seed(self) -> int:
        return self.doc["seed"]

    @property
    def name(self) -> str:
        return self.doc.get("name", "")

    def canonical_text(self) -> str:
        return json.dumps(self.doc, sort_keys=True, indent=1) + "\n"


def save_scenario(spec: ScenarioSpec, path: str | Path) -> None:
    Path(path).write_text(spec.canonical_text())


def _need(doc: dict, key: str, path: str, kind=None):
    if key not in doc:
        raise ScenarioError("missing-field", f"{path}.{key}", "required field absent")
    val = doc[key]
    if kind is not None and not isinstance(val, kind):
        raise ScenarioError("bad-type", f"{path}.{key}",
                            f"expected {getattr(kind, '__name__', kind)}, got {type(val).__name__}")
    return val


def _parse_wind(section, path: str, role: str):
    """One grid object, or a list of {active_from_s, ...grid} snapshots with
    step-change transitions."""
    if isinstance(section, list):
        if not section:
            raise ScenarioError("invariant", path, "wind sequence must not be empty")
        entries = []
        for i, item in enumerate(section):
            t0 = float(_need(item, "active_from_s", f"{path}[{i}]"))
            entries.append((t0, _wind_grid(item, f"{path}[{i}]", role)))
        return WindSequence(grids=tuple(entries))
    return _wind_grid(section, path, role)


def _wind_grid(doc: dict, path: str, role: str) -> WindGrid:
    lat = _need(doc, "lat_axis", path, list)
    lon = _need(doc, "lon_axis", path, list)
    fl = _need(doc, "fl_axis", path, list)
    u = _need(doc, "u", path, list)
    v = _need(doc, "v", path, list)
    shape = (len(lat), len(lon), len(fl))
    n = shape[0] * shape[1] * shape[2]
    if len(u) != n or len(v) != n:
        raise ScenarioError("invariant", path,
                            f"flattened wind arrays must have {n} entries (row-major lat,lon,fl)")
    try:
        return WindGrid(
            lat_axis=np.array(lat), lon_axis=np.array(lon), fl_axis=np.array(fl),
            u=np.array(u).reshape(shape), v=np.array(v).reshape(shape), role=role,
        )
    except ValueError as e:
        raise ScenarioError("invariant", path, str(e)) from None


def parse_airspace(doc: dict, path: str = "airspace") -> AirspaceDefinition:
    sectors = []
    for i, s in enumerate(_need(doc, "sectors", path, list)):
        sp = f"{path}.sectors[{i}]"
        try:
            sectors.append(Sector(
                id=_need(s, "id", sp, str),
                floor=float(_need(s, "floor_fl", sp)),
                ceiling=float(_need(s, "ceiling_fl", sp)),
                lateral_boundary=tuple((p[0], p[1]) for p in _need(s, "boundary", sp, list)),
            ))
        except AirspaceError as e:
            raise ScenarioError("invariant", sp, str(e)) from None
    waypoints = []
    for i, w in enumerate(_need(doc, "waypoints", path, list)):
        wp = f"{path}.waypoints[{i}]"
        try:
            waypoints.append(Waypoint(
                ident=_need(w, "ident", wp, str),
                lat=float(_need(w, "lat", wp)),
                lon=float(_need(w, "lon", wp)),
            ))
        except AirspaceError as e:
            raise ScenarioError("invariant", wp, str(e)) from None
    groups = tuple(
        (g[0], frozenset(g[1]))
        for g in _need(_need(doc, "bandbox", path, dict), "groups", f"{path}.bandbox", list)
    )
    try:
        return AirspaceDefinition(
            airac_date=_need(doc, "airac_date", path, str),
            sectors=tuple(sectors),
            waypoints=tuple(waypoints),
            default_bandbox=BandboxConfig(groups=groups),
        )
    except AirspaceError as e:
        raise ScenarioError("invariant", path, str(e)) from None


def _parse_plan(d: dict, path: str) -> FlightPlan:
    try:
        return FlightPlan(
            callsign=_need(d, "callsign", path, str),
            aircraft_type=_need(d, "aircraft_type", path, str),
            departure=_need(d, "departure", path, str),
            destination=_need(d, "destination", path, str),
            route=tuple(_need(d, "route", path, list)),
            requested_fl=float(_need(d, "requested_fl", path)),
            requested_cas=float(_need(d, "requested_cas", path)),
            requested_mach=float(_need(d, "requested_mach", path)),
        )
    except AirspaceError as e:
        raise ScenarioError("invariant", path, str(e)) from None


def load_scenario(path: str | Path) -> ScenarioSpec:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ScenarioError("parse", str(path), str(e)) from None
    return validate_scenario(doc)


def validate_scenario(doc: dict) -> ScenarioSpec:
    if doc.get("schema_version") != SCENARIO_SCHEMA_VERSION:
        raise ScenarioError("schema-version", "schema_version",
                            f"expected {SCENARIO_SCHEMA_VERSION}, got {doc.get('schema_version')}")
    _need(doc, "seed", "", int)
    _need(doc, "duration_s", "")
    airspace = parse_airspace(_need(doc, "airspace", "", dict))

    wind = doc.get("wind", {})
    if "forecast" in wind:
        _parse_wind(wind["forecast"], "wind.forecast", "forecast")
    if "truth" in wind:
        _parse_wind(wind["truth"], "wind.truth", "truth")

    group_ids = set(airspace.default_bandbox.group_ids())
    for g in doc.get("simulated_groups", []):
        if g not in group_ids:
            raise ScenarioError("unknown-group", "simulated_groups", f"group {g!r} not in bandbox")

    traffic = _need(doc, "traffic", "", dict)
    for i, fdoc in enumerate(traffic.get("flights", [])):
        fp = f"traffic.flights[{i}]"
        plan = _parse_plan(_need(fdoc, "plan", fp, dict), f"{fp}.plan")
        for j, ident in enumerate(plan.route):
            try:
                airspace.waypoint(ident)
            except AirspaceError:
                raise ScenarioError(
                    "unknown-waypoint", f"{fp}.plan.route[{j}]",
                    f"waypoint {ident!r} not defined (flight {plan.callsign})") from None
        entry = _need(fdoc, "entry", fp, dict)
        for k in ("lat", "lon", "fl", "heading", "cas"):
            _need(entry, k, f"{fp}.entry")
    for i, tdoc in enumerate(traffic.get("tracks", [])):
        tp = f"traffic.tracks[{i}]"
        _need(tdoc, "callsign", tp, str)
        samples = _need(tdoc, "samples", tp, list)
        if len(samples) < 2:
            raise ScenarioError("invariant", tp, "track needs at least 2 samples")
        if "plan" in tdoc:
            _parse_plan(tdoc["plan"], f"{tp}.plan")

    for i, cdoc in enumerate(doc.get("coordinations", [])):
        cp = f"coordinations[{i}]"
        for k in ("callsign", "from_group", "to_group", "transfer_fl"):
            _need(cdoc, k, cp)
        for gk in ("from_group", "to_group"):
            if cdoc[gk] not in group_ids:
                raise ScenarioError("unknown-group", f"{cp}.{gk}", f"group {cdoc[gk]!r} not in bandbox")
    return ScenarioSpec(doc=doc)


def world_from_spec(spec: ScenarioSpec, models=None, coeff_dir=None,
                    latency_override: LatencyModel | None = None) -> World:
    doc = spec.doc
    airspace = parse_airspace(doc["airspace"])
    wind = doc.get("wind", {})
    truth = _parse_wind(wind["truth"], "wind.truth", "truth") if "truth" in wind \
        else WindGrid.calm(role="truth")
    forecast = _parse_wind(wind["forecast"], "wind.forecast", "forecast") if "forecast" in wind \
        else WindGrid.calm(role="forecast")
    lat_doc = doc.get("latency", {})
    latency = latency_override if latency_override is not None else LatencyModel(
        mean_s=float(lat_doc.get("mean_s", 8.0)),
        jitter_s=float(lat_doc.get("jitter_s", 4.0)),
    )
    world = World(
        airspace,
        seed=doc["seed"],
        wind_truth=truth,
        wind_forecast=forecast,
        simulated_groups=set(doc.get("simulated_groups", [])) or None,
        duration_s=float(doc["duration_s"]),
        latency=latency,
        models=models,
        coeff_dir=coeff_dir,
        scenario_name=doc.get("name", ""),
    )
    traffic = doc["traffic"]
    for fdoc in traffic.get("flights", []):
        plan = _parse_plan(fdoc["plan"], "traffic.flights.plan")
        e = fdoc["entry"]
        kin = Kinematics(lat=e["lat"], lon=e["lon"], fl=e["fl"],
                         heading=e["heading"], cas=e["cas"])
        cruise = tuple(fdoc["cruise"]) if fdoc.get("cruise") else None
        ac = world.spawn_simulated(
            plan, kin, cruise=cruise,
            entry_time=float(fdoc.get("entry_time_s", 0.0)),
            selected_fl=fdoc.get("selected_fl"),
        )
        tgt = fdoc.get("initial_target_fl")
        if tgt is not None:
            v = ac.intent.vertical
            v.target_fl = float(tgt)
            if tgt > kin.fl + 0.5:
                v.mode = "climbing"
            elif tgt < kin.fl - 0.5:
                v.mode = "descending"
    for tdoc in traffic.get("tracks", []):
        track = RecordedTrack.from_dict(tdoc)
        plan = _parse_plan(tdoc["plan"], "traffic.tracks.plan") if "plan" in tdoc else FlightPlan(
            callsign=track.callsign, aircraft_type=tdoc.get("aircraft_type", "B738"),
            departure="ZZZZ", destination="ZZZZ",
            route=(doc["airspace"]["waypoints"][0]["ident"],),
            requested_fl=350.0, requested_cas=280.0, requested_mach=0.78,
        )
        world.spawn_replay(plan, track)
    for cdoc in doc.get("coordinations", []):
        world.coordinations.append(Coordination(
            callsign=cdoc["callsign"],
            from_group=cdoc["from_group"],
            to_group=cdoc["to_group"],
            transfer_fl=float(cdoc["transfer_fl"]),
            transfer_point=tuple(cdoc["transfer_point"]) if cdoc.get("transfer_point") else None,
            estimate=cdoc.get("estimate"),
        ))
    return world
