"""Static airspace description: sector volumes, bandbox groupings, waypoints,
routes, and flight plans.

Sector volumes are polygon prisms on the WGS-84 sphere. Stacked volumes are
modelled as multiple sectors sharing an id prefix, with containment ties
between stacked bands broken toward the lower band. All containment tests
use the even-odd rule with boundary points classified inside, so every query
is deterministic.

Definitions are immutable after load and safe to share across sessions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .geo import great_circle_nm, initial_bearing_deg


class AirspaceError(ValueError):
    """Malformed airspace definition, reported at load time."""


_IDENT_RE = re.compile(r"^[A-Z]{2,5}$")


@dataclass(frozen=True)
class Waypoint:
    ident: str
    lat: float
    lon: float

    def __post_init__(self):
        if not _IDENT_RE.match(self.ident):
            raise AirspaceError(f"waypoint ident {self.ident!r} must be 2-5 uppercase letters")
        if not (-90.0 <= self.lat <= 90.0):
            raise AirspaceError(f"waypoint {self.ident}: latitude {self.lat} out of bounds")
        if not (-180.0 <= self.lon < 180.0):
            raise AirspaceError(f"waypoint {self.ident}: longitude {self.lon} out of bounds")


@dataclass(frozen=True)
class Sector:
    """Polygon-prism airspace volume between two flight levels."""

    id: str
    floor: float
    ceiling: float
    lateral_boundary: tuple[tuple[float, float], ...]  # (lat, lon) vertices

    def __post_init__(self):
        if self.floor >= self.ceiling:
            raise AirspaceError(f"sector {self.id}: floor {self.floor} >= ceiling {self.ceiling}")
        poly = tuple((float(a), float(b)) for a, b in self.lateral_boundary)
        if len(poly) < 3:
            raise AirspaceError(f"sector {self.id}: polygon needs >= 3 vertices")
        if _self_intersects(poly):
            raise AirspaceError(f"sector {self.id}: polygon self-intersects")
        object.__setattr__(self, "lateral_boundary", poly)

    def contains_lateral(self, lat: float, lon: float) -> bool:
        return _point_in_polygon(lat, lon, self.lateral_boundary)

    def contains(self, lat: float, lon: float, fl: float) -> bool:
        return self.floor <= fl < self.ceiling and self.contains_lateral(lat, lon)


def point_in_sector(lat: float, lon: float, fl: float, sector: Sector) -> bool:
    """True iff floor <= fl < ceiling and (lat, lon) is inside or on the
    lateral boundary (even-odd rule; boundary counts as inside)."""
    return sector.contains(lat, lon, fl)


def _point_in_polygon(lat: float, lon: float, poly: tuple[tuple[float, float], ...]) -> bool:
    """Even-odd rule in (lat, lon) coordinates; boundary points are inside."""
    n = len(poly)
    inside = False
    for i in range(n):
        a_lat, a_lon = poly[i]
        b_lat, b_lon = poly[(i + 1) % n]
        if _on_segment(lat, lon, a_lat, a_lon, b_lat, b_lon):
            return True
        # horizontal ray toward +lon, crossing test on the lat coordinate
        if (a_lat > lat) != (b_lat > lat):
            x = a_lon + (lat - a_lat) * (b_lon - a_lon) / (b_lat - a_lat)
            if x > lon:
                inside = not inside
    return inside


def _on_segment(lat: float, lon: float, a_lat: float, a_lon: float,
                b_lat: float, b_lon: float, eps: float = 1e-12) -> bool:
    cross = (b_lat - a_lat) * (lon - a_lon) - (b_lon - a_lon) * (lat - a_lat)
    if abs(cross) > eps:
        return False
    dot = (lat - a_lat) * (b_lat - a_lat) + (lon - a_lon) * (b_lon - a_lon)
    sq = (b_lat - a_lat) ** 2 + (b_lon - a_lon) ** 2
    return -eps <= dot <= sq + eps


def _self_intersects(poly: tuple[tuple[float, float], ...]) -> bool:
    """Pairwise proper-intersection check between non-adjacent edges."""
    n = len(poly)
    edges = [(poly[i], poly[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j == (i + 1) % n) or (i == (j + 1) % n):
                continue
            if i == 0 and j == n - 1:
                continue
            if _segments_cross(edges[i], edges[j]):
                return True
    return False


def _segments_cross(e1, e2) -> bool:
    (p1, p2), (p3, p4) = e1, e2

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if abs(v) < 1e-15 else (1 if v > 0 else -1)

    o1, o2 = orient(p1, p2, p3), orient(p1, p2, p4)
    o3, o4 = orient(p3, p4, p1), orient(p3, p4, p2)
    return o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4)


@dataclass(frozen=True)
class BandboxConfig:
    """Partition of the base sectors into controller groups."""

    groups: tuple[tuple[str, frozenset[str]], ...]
    active_from: float = 0.0

    def __post_init__(self):
        norm = tuple((gid, frozenset(members)) for gid, members in self.groups)
        object.__setattr__(self, "groups", norm)

    def validate_against(self, sector_ids: set[str]) -> None:
        seen: dict[str, str] = {}
        for gid, members in self.groups:
            for sid in members:
                if sid not in sector_ids:
                    raise AirspaceError(f"bandbox group {gid}: unknown sector {sid!r}")
                if sid in seen:
                    raise AirspaceError(
                        f"sector {sid} in both groups {seen[sid]} and {gid}: groups must partition"
                    )
                seen[sid] = gid
        missing = sector_ids - set(seen)
        if missing:
            raise AirspaceError(f"sectors not covered by any bandbox group: {sorted(missing)}")
        if not (1 <= len(self.groups) <= len(sector_ids)):
            raise AirspaceError("bandbox group count outside [1, sector count]")

    def group_of(self, sector_id: str) -> str | None:
        for gid, members in self.groups:
            if sector_id in members:
                return gid
        return None

    def group_ids(self) -> list[str]:
        return [gid for gid, _ in self.groups]


@dataclass(frozen=True)
class AirspaceDefinition:
    airac_date: str
    sectors: tuple[Sector, ...]
    waypoints: tuple[Waypoint, ...]
    default_bandbox: BandboxConfig

    def __post_init__(self):
        object.__setattr__(self, "sectors", tuple(self.sectors))
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        ids = [s.id for s in self.sectors]
        if len(set(ids)) != len(ids):
            raise AirspaceError("duplicate sector ids")
        wids = [w.ident for w in self.waypoints]
        if len(set(wids)) != len(wids):
            raise AirspaceError("duplicate waypoint idents")
        self.default_bandbox.validate_against(set(ids))
        object.__setattr__(self, "_wp_index", {w.ident: w for w in self.waypoints})
        object.__setattr__(self, "_sector_index", {s.id: s for s in self.sectors})

    def waypoint(self, ident: str) -> Waypoint:
        try:
            return self._wp_index[ident]
        except KeyError:
            raise AirspaceError(f"unresolvable waypoint ident {ident!r}") from None

    def sector(self, sid: str) -> Sector:
        try:
            return self._sector_index[sid]
        except KeyError:
            raise AirspaceError(f"unknown sector id {sid!r}") from None

    def covering_sector(self, lat: float, lon: float, fl: float) -> Sector | None:
        """Unique base sector covering the point; stacked-band ties break to
        the lower floor. Distinct-id overlaps are a definition error."""
        hits = [s for s in self.sectors if s.contains(lat, lon, fl)]
        if not hits:
            return None
        if len(hits) == 1:
            return hits[0]
        hits.sort(key=lambda s: (s.floor, s.id))
        lowest = hits[0]
        for other in hits[1:]:
            if other.floor != lowest.floor:
                break
            raise AirspaceError(
                f"sectors {lowest.id} and {other.id} overlap at ({lat}, {lon}, FL{fl})"
            )
        return lowest


def controlling_group(lat: float, lon: float, fl: float,
                      config: BandboxConfig, airspace: AirspaceDefinition) -> str | None:
    """Bandbox group controlling the point, or None when no sector covers it."""
    sector = airspace.covering_sector(lat, lon, fl)
    if sector is None:
        return None
    return config.group_of(sector.id)


@dataclass(frozen=True)
class FlightPlan:
    callsign: str
    aircraft_type: str
    departure: str
    destination: str
    route: tuple[str, ...]
    requested_fl: float
    requested_cas: float    # knots, below the transition altitude
    requested_mach: float

    def __post_init__(self):
        object.__setattr__(self, "route", tuple(self.route))
        if len(self.route) < 1:
            raise AirspaceError(f"flight {self.callsign}: route must have >= 1 waypoint")
        if not (0.0 <= self.requested_fl <= 600.0):
            raise AirspaceError(f"flight {self.callsign}: requested FL {self.requested_fl} out of range")


@dataclass(frozen=True)
class RouteLeg:
    frm: Waypoint
    to: Waypoint
    course: float   # degrees true, initial great-circle course
    length: float   # NMI


def route_legs(plan: FlightPlan, airspace: AirspaceDefinition) -> list[RouteLeg]:
    """Great-circle legs of a flight plan; degenerate (repeated) waypoints
    yield zero-length legs that inherit the previous course."""
    points = [airspace.waypoint(ident) for ident in plan.route]
    legs: list[RouteLeg] = []
    prev_course = 0.0
    for a, b in zip(points, points[1:]):
        length = great_circle_nm(a.lat, a.lon, b.lat, b.lon)
        if length == 0.0:
            course = prev_course
        else:
            course = initial_bearing_deg(a.lat, a.lon, b.lat, b.lon)
            prev_course = course
        legs.append(RouteLeg(frm=a, to=b, course=course, length=length))
    return legs
