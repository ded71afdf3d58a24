"""Great-circle geometry on the WGS-84 mean sphere.

Distances are in nautical miles, angles in degrees. All formulas use the
spherical earth with radius ``EARTH_RADIUS_NMI``; at en route separation
scales the ellipsoidal correction is well below the tolerances anywhere
these functions are consumed.
"""

from __future__ import annotations

import math

from .units import EARTH_RADIUS_NMI


def great_circle_nm(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in NMI (haversine form, numerically stable
    for short legs)."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2.0) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2.0) ** 2
    a = min(1.0, a)
    return 2.0 * EARTH_RADIUS_NMI * math.asin(math.sqrt(a))


def initial_bearing_deg(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Initial great-circle course from point 1 to point 2, in [0, 360).

    Degenerate (identical) points return 0.0.
    """
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dl = math.radians(lon2 - lon1)
    x = math.cos(p2) * math.sin(dl)
    y = math.cos(p1) * math.sin(p2) - math.sin(p1) * math.cos(p2) * math.cos(dl)
    if x == 0.0 and y == 0.0:
        return 0.0
    return math.degrees(math.atan2(x, y)) % 360.0


def destination_point(lat: float, lon: float, bearing_deg: float, dist_nm: float) -> tuple[float, float]:
    """Point reached after travelling ``dist_nm`` along the initial bearing."""
    d = dist_nm / EARTH_RADIUS_NMI
    th = math.radians(bearing_deg)
    p1 = math.radians(lat)
    l1 = math.radians(lon)
    sp = math.sin(p1) * math.cos(d) + math.cos(p1) * math.sin(d) * math.cos(th)
    sp = max(-1.0, min(1.0, sp))
    p2 = math.asin(sp)
    l2 = l1 + math.atan2(
        math.sin(th) * math.sin(d) * math.cos(p1),
        math.cos(d) - math.sin(p1) * sp,
    )
    lon2 = math.degrees(l2)
    lon2 = (lon2 + 180.0) % 360.0 - 180.0
    return math.degrees(p2), lon2


def cross_track_nm(lat: float, lon: float, lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Signed cross-track distance of a point from the great circle through
    leg (1 -> 2); positive to the right of track."""
    d13 = great_circle_nm(lat1, lon1, lat, lon) / EARTH_RADIUS_NMI
    th13 = math.radians(initial_bearing_deg(lat1, lon1, lat, lon))
    th12 = math.radians(initial_bearing_deg(lat1, lon1, lat2, lon2))
    xt = math.asin(math.sin(d13) * math.sin(th13 - th12))
    return -xt * EARTH_RADIUS_NMI


def along_track_nm(lat: float, lon: float, lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Along-track distance from leg start (1) to the foot of the
    perpendicular from the point onto the leg's great circle."""
    d13 = great_circle_nm(lat1, lon1, lat, lon) / EARTH_RADIUS_NMI
    xt = cross_track_nm(lat, lon, lat1, lon1, lat2, lon2) / EARTH_RADIUS_NMI
    c = math.cos(d13) / max(1e-15, math.cos(xt))
    c = max(-1.0, min(1.0, c))
    at = math.acos(c)
    # sign: behind the leg start counts negative
    th13 = initial_bearing_deg(lat1, lon1, lat, lon)
    th12 = initial_bearing_deg(lat1, lon1, lat2, lon2)
    dh = (th13 - th12 + 180.0) % 360.0 - 180.0
    sign = -1.0 if abs(dh) > 90.0 else 1.0
    return sign * at * EARTH_RADIUS_NMI


def angle_diff_deg(target: float, current: float) -> float:
    """Shortest signed angular difference target - current in (-180, 180]."""
    d = (target - current) % 360.0
    if d > 180.0:
        d -= 360.0
    return d
