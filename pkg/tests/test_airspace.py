"""Airspace geometry against ray-casting / haversine oracles."""

import math

import numpy as np
import pytest

from skytwin.airspace import (
    AirspaceDefinition,
    AirspaceError,
    BandboxConfig,
    FlightPlan,
    Sector,
    Waypoint,
    controlling_group,
    point_in_sector,
    route_legs,
)
from skytwin.units import EARTH_RADIUS_NMI


def unit_square_sector(sid="S1", floor=100.0, ceiling=300.0, origin=(50.0, 0.0)):
    la, lo = origin
    return Sector(
        id=sid, floor=floor, ceiling=ceiling,
        lateral_boundary=((la, lo), (la + 1, lo), (la + 1, lo + 1), (la, lo + 1)),
    )


def ray_cast_oracle(lat, lon, poly):
    """Independent even-odd crossing count casting toward -lon."""
    inside = False
    n = len(poly)
    j = n - 1
    for i in range(n):
        yi, xi = poly[i]
        yj, xj = poly[j]
        if (yi > lat) != (yj > lat):
            x_cross = xi + (lat - yi) * (xj - xi) / (yj - yi)
            if lon < x_cross:
                inside = not inside
        j = i
    return inside


def test_centroid_inside():
    s = unit_square_sector()
    assert point_in_sector(50.5, 0.5, 200.0, s)


def test_point_outside_bbox():
    s = unit_square_sector()
    assert not point_in_sector(52.5, 0.5, 200.0, s)


def test_fl_band_half_open():
    s = unit_square_sector()
    assert point_in_sector(50.5, 0.5, 100.0, s)
    assert not point_in_sector(50.5, 0.5, 300.0, s)


def test_boundary_counts_as_inside():
    s = unit_square_sector()
    assert point_in_sector(50.0, 0.5, 200.0, s)
    assert point_in_sector(50.0, 0.0, 200.0, s)


def test_random_points_match_ray_casting_oracle():
    rng = np.random.default_rng(2024)
    poly = ((51.0, -1.0), (52.5, -0.5), (53.0, 1.0), (51.8, 2.0), (50.5, 1.2), (50.2, 0.1))
    s = Sector(id="Z", floor=0.0, ceiling=600.0, lateral_boundary=poly)
    for _ in range(1000):
        lat = rng.uniform(49.5, 53.5)
        lon = rng.uniform(-1.5, 2.5)
        assert point_in_sector(lat, lon, 300.0, s) == ray_cast_oracle(lat, lon, poly)


def test_reversed_polygon_same_classification():
    rng = np.random.default_rng(5)
    poly = ((51.0, -1.0), (52.5, -0.5), (53.0, 1.0), (51.8, 2.0), (50.5, 1.2))
    fwd = Sector(id="F", floor=0, ceiling=600, lateral_boundary=poly)
    rev = Sector(id="R", floor=0, ceiling=600, lateral_boundary=tuple(reversed(poly)))
    for _ in range(300):
        lat, lon = rng.uniform(49.5, 53.5), rng.uniform(-1.5, 2.5)
        assert fwd.contains_lateral(lat, lon) == rev.contains_lateral(lat, lon)


def test_self_intersecting_polygon_rejected_at_load():
    with pytest.raises(AirspaceError):
        Sector(id="X", floor=0, ceiling=100,
               lateral_boundary=((0, 0), (1, 1), (1, 0), (0, 1)))


def three_sector_airspace():
    s1 = unit_square_sector("S1", 0, 300, origin=(50.0, 0.0))
    s2 = unit_square_sector("S2", 0, 300, origin=(50.0, 1.0))
    s3 = Sector(id="S3", floor=300, ceiling=500,
                lateral_boundary=((50.0, 0.0), (51.0, 0.0), (51.0, 2.0), (50.0, 2.0)))
    wps = (Waypoint("ALPHA", 50.5, 0.5), Waypoint("BRAVO", 50.5, 1.5))
    bandbox = BandboxConfig(groups=(("G1", frozenset({"S1", "S2"})), ("G2", frozenset({"S3"}))))
    return AirspaceDefinition("2025-01-23", (s1, s2, s3), wps, bandbox)


def test_controlling_group_basic():
    a = three_sector_airspace()
    cfg = a.default_bandbox
    assert controlling_group(50.5, 0.5, 100.0, cfg, a) == "G1"
    assert controlling_group(50.5, 1.5, 100.0, cfg, a) == "G1"
    assert controlling_group(50.5, 0.5, 400.0, cfg, a) == "G2"
    assert controlling_group(50.5, 0.5, 550.0, cfg, a) is None
    assert controlling_group(55.0, 0.5, 100.0, cfg, a) is None


def test_controlling_group_grid_matches_per_sector_oracle():
    a = three_sector_airspace()
    cfg = a.default_bandbox
    lats = np.linspace(49.8, 51.2, 50)
    lons = np.linspace(-0.2, 2.2, 50)
    fls = np.linspace(10, 490, 10)
    for lat in lats[::7]:
        for lon in lons[::7]:
            for fl in fls:
                hits = [s.id for s in a.sectors if point_in_sector(lat, lon, fl, s)]
                got = controlling_group(lat, lon, fl, cfg, a)
                if not hits:
                    assert got is None
                else:
                    assert got == cfg.group_of(hits[0])


def test_bandbox_must_partition():
    s1, s2 = unit_square_sector("S1"), unit_square_sector("S2", origin=(50.0, 1.0))
    with pytest.raises(AirspaceError):
        BandboxConfig(groups=(("G1", frozenset({"S1"})),)).validate_against({"S1", "S2"})
    with pytest.raises(AirspaceError):
        BandboxConfig(
            groups=(("G1", frozenset({"S1", "S2"})), ("G2", frozenset({"S2"})))
        ).validate_against({"S1", "S2"})


def test_overlapping_sectors_reported_with_both_ids():
    s1 = unit_square_sector("S1", 0, 300)
    s2 = unit_square_sector("S2", 0, 300)  # same footprint, same band
    bandbox = BandboxConfig(groups=(("G", frozenset({"S1", "S2"})),))
    a = AirspaceDefinition("2025-01-23", (s1, s2), (), bandbox)
    with pytest.raises(AirspaceError, match="S1.*S2|S2.*S1"):
        a.covering_sector(50.5, 0.5, 100.0)


def test_stacked_sectors_tie_to_lower_band():
    low = unit_square_sector("LOW", 0, 320)
    hig = unit_square_sector("HIG", 280, 600)  # overlapping band: lower wins
    bandbox = BandboxConfig(groups=(("GL", frozenset({"LOW"})), ("GH", frozenset({"HIG"}))))
    a = AirspaceDefinition("2025-01-23", (low, hig), (), bandbox)
    assert a.covering_sector(50.5, 0.5, 300.0).id == "LOW"


# --- route legs ----------------------------------------------------------

def haversine_oracle(lat1, lon1, lat2, lon2):
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dl = math.radians(lon2 - lon1)
    a = math.sin((p2 - p1) / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    d = 2 * math.atan2(math.sqrt(a), math.sqrt(1 - a))
    y = math.sin(dl) * math.cos(p2)
    x = math.cos(p1) * math.sin(p2) - math.sin(p1) * math.cos(p2) * math.cos(dl)
    return d * EARTH_RADIUS_NMI, math.degrees(math.atan2(y, x)) % 360.0


def airspace_with(*wps):
    s = unit_square_sector()
    return AirspaceDefinition(
        "2025-01-23", (s,), wps, BandboxConfig(groups=(("G1", frozenset({"S1"})),))
    )


def plan(route):
    return FlightPlan("TST123", "B738", "EGLL", "EHAM", route, 350.0, 280.0, 0.78)


def test_meridian_leg():
    a = airspace_with(Waypoint("AA", 50.0, 3.0), Waypoint("BB", 51.0, 3.0))
    legs = route_legs(plan(("AA", "BB")), a)
    assert len(legs) == 1
    assert legs[0].course == pytest.approx(0.0, abs=1e-9)
    assert legs[0].length == pytest.approx(60.0, abs=0.1)


def test_degenerate_leg_inherits_course():
    a = airspace_with(Waypoint("AA", 50.0, 3.0), Waypoint("BB", 51.0, 3.0))
    legs = route_legs(plan(("AA", "BB", "BB")), a)
    assert legs[1].length == 0.0
    assert legs[1].course == legs[0].course
    single = route_legs(plan(("AA", "AA")), a)
    assert single[0].length == 0.0 and single[0].course == 0.0


def test_single_waypoint_route_has_no_legs():
    a = airspace_with(Waypoint("AA", 50.0, 3.0))
    assert route_legs(plan(("AA",)), a) == []


def test_random_legs_match_haversine_oracle():
    rng = np.random.default_rng(99)
    for _ in range(20):
        lat1, lat2 = rng.uniform(-70, 70, 2)
        lon1, lon2 = rng.uniform(-170, 170, 2)
        a = airspace_with(Waypoint("AA", lat1, lon1), Waypoint("BB", lat2, lon2))
        leg = route_legs(plan(("AA", "BB")), a)[0]
        want_d, want_c = haversine_oracle(lat1, lon1, lat2, lon2)
        assert leg.length == pytest.approx(want_d, abs=0.01)
        diff = (leg.course - want_c + 180.0) % 360.0 - 180.0
        assert abs(diff) < 0.01


def test_unresolvable_ident_names_it():
    a = airspace_with(Waypoint("AA", 50.0, 3.0))
    with pytest.raises(AirspaceError, match="NOPE"):
        route_legs(plan(("AA", "NOPE")), a)
