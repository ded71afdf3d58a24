"""Shared fixtures: a two-sector test airspace and spawn helpers."""

import numpy as np
import pytest

from skytwin.airspace import (
    AirspaceDefinition,
    BandboxConfig,
    FlightPlan,
    Sector,
    Waypoint,
)
from skytwin.kernel import LatencyModel, World
from skytwin.perf import Kinematics
from skytwin.scenario.tracks import RecordedTrack, TrackRow


def two_sector_airspace() -> AirspaceDefinition:
    """West and east square sectors sharing the meridian at lon=0."""
    west = Sector(id="SW", floor=100.0, ceiling=460.0,
                  lateral_boundary=((49.0, -4.0), (54.0, -4.0), (54.0, 0.0), (49.0, 0.0)))
    east = Sector(id="SE", floor=100.0, ceiling=460.0,
                  lateral_boundary=((49.0, 0.0), (54.0, 0.0), (54.0, 4.0), (49.0, 4.0)))
    wps = (
        Waypoint("WESTA", 51.5, -3.0),
        Waypoint("MIDLN", 51.5, 0.0),
        Waypoint("EASTB", 51.5, 3.0),
        Waypoint("SOUTH", 49.5, 0.0),
    )
    bandbox = BandboxConfig(groups=(("GW", frozenset({"SW"})), ("GE", frozenset({"SE"}))))
    return AirspaceDefinition("2025-01-23", (west, east), wps, bandbox)


def make_world(seed=7, latency=LatencyModel(0.0, 0.0), duration_s=3600.0,
               simulated_groups=None, **kw) -> World:
    return World(two_sector_airspace(), seed=seed, latency=latency,
                 duration_s=duration_s, simulated_groups=simulated_groups, **kw)


def eastbound_plan(callsign="TST001", actype="B738") -> FlightPlan:
    return FlightPlan(callsign, actype, "EGLL", "EHAM",
                      ("WESTA", "MIDLN", "EASTB"), 350.0, 290.0, 0.78)


def spawn_cruise(world, callsign="TST001", fl=330.0, lat=51.5, lon=-3.0,
                 heading=90.0, cas=280.0, **kw):
    plan = eastbound_plan(callsign)
    kin = Kinematics(lat=lat, lon=lon, fl=fl, heading=heading, cas=cas)
    return world.spawn_simulated(plan, kin, cruise=(cas, 0.78), **kw)


def straight_track(callsign="RPL001", t0=0.0, n=120, dt=6.0, lat0=51.5,
                   lon0=-3.0, fl=330.0, gs=420.0, hdg=90.0,
                   transfer=None) -> RecordedTrack:
    """Due-east constant-speed recorded track."""
    rows = []
    for i in range(n):
        t = t0 + i * dt
        # ground speed in NMI/s along a parallel of latitude
        dlon = gs * (i * dt) / 3600.0 / (60.04 * np.cos(np.radians(lat0)))
        rows.append(TrackRow(t=t, lat=lat0, lon=lon0 + dlon, fl=fl, gs=gs, hdg=hdg))
    return RecordedTrack(callsign=callsign, rows=rows,
                         transfer_events=list(transfer or []))


@pytest.fixture
def world():
    return make_world()
