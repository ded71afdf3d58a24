"""Seeded parametric scenario generation.

Traffic volumes follow a Poisson process at the requested density; routes
come from a fixed library of five conflict-geometry templates over a
synthetic square sector. When at least two aircraft exist, the first two
arrivals are retimed so their unflown paths meet near the sector centre,
guaranteeing the template's characteristic conflict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import geo
from ..atmosphere import cas_to_tas
from .files import SCENARIO_SCHEMA_VERSION, UNITS_NOTE, ScenarioSpec, validate_scenario

TEMPLATES = ("crossing", "head-on", "overtaking", "vertical", "mixed")

CENTER = (51.5, 0.0)
GATE_RADIUS_NM = 80.0


class GenerationError(ValueError):
    pass


@dataclass
class GenerationParams:
    density_per_10min: float = 6.0
    duration_s: float = 1800.0
    conflict_geometry: str = "crossing"
    entry_fl_range: tuple[float, float] = (300.0, 380.0)
    type_mix: dict[str, float] = field(default_factory=lambda: {"B738": 0.6, "A320": 0.4})
    name: str = "generated"
    wind_uniform: tuple[float, float] | None = None   # (u, v) m/s for both grids
    latency_mean_s: float = 8.0
    latency_jitter_s: float = 4.0

    def __post_init__(self):
        if self.density_per_10min <= 0:
            raise GenerationError("density must be positive")
        if self.conflict_geometry not in TEMPLATES:
            raise GenerationError(f"unknown conflict geometry {self.conflict_geometry!r}; "
                                  f"templates: {TEMPLATES}")
        total = sum(self.type_mix.values())
        if abs(total - 1.0) > 1e-9:
            raise GenerationError("type_mix masses must sum to 1")


def _gate(bearing_deg: float) -> tuple[float, float]:
    return geo.destination_point(CENTER[0], CENTER[1], bearing_deg, GATE_RADIUS_NM)


def _route_family(bearing_in: float, tag: str) -> dict:
    """A straight route through the centre entering from ``bearing_in``."""
    ent = _gate(bearing_in)
    ext = _gate((bearing_in + 180.0) % 360.0)
    return {
        "enter": ent, "exit": ext, "tag": tag,
        "idents": (f"EN{tag}", f"EX{tag}"),
        "course": geo.initial_bearing_deg(ent[0], ent[1], ext[0], ext[1]),
        "length": geo.great_circle_nm(ent[0], ent[1], ext[0], ext[1]),
    }


def _families(geometry: str, rng: np.random.Generator) -> list[dict]:
    if geometry == "crossing":
        theta = float(rng.uniform(60.0, 120.0))
        return [_route_family(270.0, "A"), _route_family((270.0 + theta) % 360.0, "B")]
    if geometry == "head-on":
        return [_route_family(270.0, "A"), _route_family(90.0, "B")]
    if geometry == "overtaking":
        return [_route_family(270.0, "A")]
    if geometry == "vertical":
        theta = float(rng.uniform(60.0, 120.0))
        return [_route_family(270.0, "A"), _route_family((270.0 + theta) % 360.0, "B")]
    # mixed: three families at spread bearings
    return [_route_family(270.0, "A"), _route_family(0.0, "B"), _route_family(315.0, "C")]


def generate_scenario(params: GenerationParams, seed: int) -> ScenarioSpec:
    rng = np.random.default_rng(seed)
    geometry = params.conflict_geometry
    families = _families(geometry, rng)

    half = 1.8  # degrees, square sector about the centre
    boundary = [
        [CENTER[0] - half, CENTER[1] - half], [CENTER[0] + half, CENTER[1] - half],
        [CENTER[0] + half, CENTER[1] + half], [CENTER[0] - half, CENTER[1] + half],
    ]
    waypoints = []
    for fam in families:
        waypoints.append({"ident": fam["idents"][0], "lat": fam["enter"][0], "lon": fam["enter"][1]})
        waypoints.append({"ident": fam["idents"][1], "lat": fam["exit"][0], "lon": fam["exit"][1]})

    # Poisson arrivals at the requested density
    lam = params.density_per_10min / 600.0 * params.duration_s
    count = int(rng.poisson(lam))
    entry_times = np.sort(rng.uniform(0.0, params.duration_s, size=count))

    types = list(params.type_mix)
    probs = np.array([params.type_mix[t] for t in types])
    fl_lo, fl_hi = params.entry_fl_range
    fl_choices = np.arange(math.ceil(fl_lo / 10.0) * 10, fl_hi + 1e-9, 10.0)
    conflict_fl = float(fl_choices[len(fl_choices) // 2])

    flights = []
    for i, t_entry in enumerate(entry_times):
        fam = families[int(rng.integers(len(families)))]
        atype = types[int(rng.choice(len(types), p=probs))]
        fl = float(rng.choice(fl_choices))
        cas = float(rng.uniform(265.0, 300.0))
        mach = float(rng.uniform(0.74, 0.82))
        flights.append({
            "plan": {
                "callsign": f"SYN{i + 1:03d}",
                "aircraft_type": atype,
                "departure": "ZZZA",
                "destination": "ZZZB",
                "route": list(fam["idents"]),
                "requested_fl": fl,
                "requested_cas": cas,
                "requested_mach": mach,
            },
            "entry_time_s": float(t_entry),
            "entry": {
                "lat": fam["enter"][0], "lon": fam["enter"][1],
                "fl": fl, "heading": fam["course"], "cas": cas,
            },
            "cruise": [cas, mach],
            "family": fam["tag"],
        })

    if len(flights) >= 2:
        _engineer_conflict(flights, families, geometry, conflict_fl, rng)
        flights.sort(key=lambda f: f["entry_time_s"])
        for i, f in enumerate(flights):
            f["plan"]["callsign"] = f"SYN{i + 1:03d}"
    elif geometry != "mixed" and len(flights) < 2:
        # conflict guarantee needs a pair; density too low for this duration
        pass

    doc = {
        "schema_version": SCENARIO_SCHEMA_VERSION,
        "name": params.name,
        "seed": seed,
        "duration_s": params.duration_s,
        "units": UNITS_NOTE,
        "airspace": {
            "airac_date": "2025-01-23",
            "sectors": [{"id": "SYN", "floor_fl": 150.0, "ceiling_fl": 460.0,
                         "boundary": boundary}],
            "waypoints": waypoints,
            "bandbox": {"groups": [["GSYN", ["SYN"]]]},
        },
        "simulated_groups": ["GSYN"],
        "latency": {"mean_s": params.latency_mean_s, "jitter_s": params.latency_jitter_s},
        "traffic": {"mode": "generated", "flights": flights, "tracks": []},
        "coordinations": [],
        "generation": {
            "density_per_10min": params.density_per_10min,
            "conflict_geometry": geometry,
            "entry_fl_range": list(params.entry_fl_range),
            "type_mix": params.type_mix,
        },
    }
    if params.wind_uniform is not None:
        u, v = params.wind_uniform
        grid = {
            "lat_axis": [CENTER[0] - 5.0, CENTER[0] + 5.0],
            "lon_axis": [CENTER[1] - 5.0, CENTER[1] + 5.0],
            "fl_axis": [0.0, 600.0],
            "u": [u] * 8, "v": [v] * 8,
        }
        doc["wind"] = {"forecast": grid, "truth": dict(grid)}
    return validate_scenario(doc)


def _engineer_conflict(flights: list[dict], families: list[dict], geometry: str,
                       conflict_fl: float, rng: np.random.Generator) -> None:
    """Retime (and retarget) the first two arrivals so their unflown paths
    conflict near the centre; the Poisson count is preserved."""
    a, b = flights[0], flights[1]
    if geometry == "overtaking":
        fam = families[0]
        for f, cas in ((a, 255.0), (b, 310.0)):
            f["plan"]["route"] = list(fam["idents"])
            f["entry"].update(lat=fam["enter"][0], lon=fam["enter"][1],
                              heading=fam["course"], fl=conflict_fl, cas=cas)
            f["plan"]["requested_fl"] = conflict_fl
            f["cruise"] = [cas, f["cruise"][1]]
            f["plan"]["requested_cas"] = cas
        # the faster one enters slightly later, catching up mid-sector
        gs_a = cas_to_tas(255.0, conflict_fl)
        gs_b = cas_to_tas(310.0, conflict_fl)
        t_mid_a = a["entry_time_s"] + 0.45 * families[0]["length"] / gs_a * 3600.0
        b["entry_time_s"] = max(0.0, t_mid_a - 0.45 * families[0]["length"] / gs_b * 3600.0)
        b["entry"]["fl"] = conflict_fl
        return

    fam_a, fam_b = families[0], families[1 % len(families)]
    for f, fam in ((a, fam_a), (b, fam_b)):
        f["plan"]["route"] = list(fam["idents"])
        # identical speed schedules and equal gate distances put the pair at
        # the centre simultaneously by symmetry, whatever regime governs
        f["entry"].update(lat=fam["enter"][0], lon=fam["enter"][1],
                          heading=fam["course"], fl=conflict_fl, cas=280.0)
        f["plan"]["requested_fl"] = conflict_fl
        f["plan"]["requested_cas"] = 280.0
        f["plan"]["requested_mach"] = 0.78
        f["cruise"] = [280.0, 0.78]
        f["family"] = fam["tag"]
    b["entry_time_s"] = a["entry_time_s"]
    if geometry == "vertical":
        # B climbs through A's level near the crossing point
        b["entry"]["fl"] = conflict_fl - 40.0
        b["initial_target_fl"] = conflict_fl + 30.0
        b["plan"]["requested_fl"] = conflict_fl + 30.0
