"""Top-of-descent planning for level-by-waypoint clearances.

"Abeam" is the foot of the perpendicular from the constraint waypoint onto
the aircraft's route (or onto its current track when heading-held). The
planner rolls out the deterministic mean-mode descent under forecast wind
and bisects on the descent-start distance until the level-off lands at or
before the abeam point, to 0.1 NMI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .. import geo
from ..perf.model import identity_correction, mean_mode_correction
from ..perf.tem import Guidance, Kinematics, tem_step

TOD_TOLERANCE_NM = 0.1
TRIGGER_MARGIN_NM = 0.3
LEVEL_BY_TOLERANCE_FL = 0.5
ROLLOUT_HORIZON_S = 3600.0
ROLLOUT_DT_S = 1.0


class ConstraintUnachievable(ValueError):
    pass


@dataclass(frozen=True)
class DescentPlan:
    tod_dist_from_now: float    # cruise distance before starting down
    tod_dist_to_go: float       # distance-to-abeam at which descent starts
    abeam_dist: float           # along-path distance to the abeam point
    tod_position: tuple[float, float] | None
    at_risk: bool


def _route_path(world, ac) -> list[tuple[float, float]]:
    """Polyline the aircraft will follow: current position, then the
    remaining route waypoints (or a long ray along the held heading)."""
    points = [(ac.kin.lat, ac.kin.lon)]
    la = ac.intent.lateral
    if la.mode == "route":
        if la.direct_waypoint is not None:
            wp = world.airspace.waypoint(la.direct_waypoint)
            points.append((wp.lat, wp.lon))
        for ident in ac.plan.route[la.leg_index:]:
            wp = world.airspace.waypoint(ident)
            points.append((wp.lat, wp.lon))
    if len(points) == 1:
        far = geo.destination_point(ac.kin.lat, ac.kin.lon, ac.kin.heading, 500.0)
        points.append(far)
    return points


def abeam_distance_nm(world, ac, waypoint) -> float:
    """Along-path distance from the aircraft to the abeam point of the
    waypoint; negative when the abeam point is behind."""
    path = _route_path(world, ac)
    best = None
    cum = 0.0
    for (alat, alon), (blat, blon) in zip(path, path[1:]):
        seg = geo.great_circle_nm(alat, alon, blat, blon)
        if seg <= 1e-9:
            continue
        at = geo.along_track_nm(waypoint.lat, waypoint.lon, alat, alon, blat, blon)
        xt = abs(geo.cross_track_nm(waypoint.lat, waypoint.lon, alat, alon, blat, blon))
        if -seg * 0.05 <= at <= seg * 1.05 or (cum == 0.0 and at < 0.0):
            cand = cum + at
            if best is None or xt < best[1]:
                best = (cand, xt)
        cum += seg
    if best is None:
        # beyond the end of the path: project onto the last leg's extension
        alat, alon = path[-2]
        blat, blon = path[-1]
        at = geo.along_track_nm(waypoint.lat, waypoint.lon, alat, alon, blat, blon)
        best = (cum - geo.great_circle_nm(alat, alon, blat, blon) + at, 0.0)
    return best[0]


def _position_along_path(world, ac, dist_nm: float) -> tuple[float, float]:
    path = _route_path(world, ac)
    remaining = dist_nm
    for (alat, alon), (blat, blon) in zip(path, path[1:]):
        seg = geo.great_circle_nm(alat, alon, blat, blon)
        if remaining <= seg or seg <= 1e-9:
            brg = geo.initial_bearing_deg(alat, alon, blat, blon)
            return geo.destination_point(alat, alon, brg, max(0.0, remaining))
        remaining -= seg
    return path[-1]


def _rollout_level_distance(world, ac, target_fl: float, start_dist: float,
                            correction, wind) -> tuple[float, object]:
    """Distance from the aircraft at which a descent starting after
    ``start_dist`` of cruise captures the target level; also the final state."""
    base = ac.kin
    kin = Kinematics(lat=base.lat, lon=base.lon, fl=base.fl, heading=base.heading,
                     cas=base.cas, rocd=base.rocd, dist_nm=0.0)
    sp = ac.intent.speed
    cruise = Guidance(target_fl=base.fl, cruise_cas=sp.cruise_cas,
                      cruise_mach=sp.cruise_mach, commanded_cas=sp.commanded_cas,
                      commanded_mach=sp.commanded_mach)
    descend = Guidance(target_fl=target_fl, cruise_cas=sp.cruise_cas,
                       cruise_mach=sp.cruise_mach, commanded_cas=sp.commanded_cas,
                       commanded_mach=sp.commanded_mach)
    t = 0.0
    while kin.dist_nm < start_dist and t < ROLLOUT_HORIZON_S:
        kin = tem_step(kin, cruise, correction, world.coeffs_for(ac.plan.aircraft_type),
                       wind, ROLLOUT_DT_S)
        t += ROLLOUT_DT_S
    while not (kin.fl == target_fl and kin.rocd == 0.0) and t < ROLLOUT_HORIZON_S:
        kin = tem_step(kin, descend, correction, world.coeffs_for(ac.plan.aircraft_type),
                       wind, ROLLOUT_DT_S)
        t += ROLLOUT_DT_S
    return kin.dist_nm, kin


def _altitude_at_distance(world, ac, target_fl: float, dist_nm: float,
                          correction, wind) -> float:
    """Altitude of an immediate mean-mode descent when it crosses dist_nm."""
    base = ac.kin
    kin = Kinematics(lat=base.lat, lon=base.lon, fl=base.fl, heading=base.heading,
                     cas=base.cas, rocd=base.rocd, dist_nm=0.0)
    sp = ac.intent.speed
    descend = Guidance(target_fl=target_fl, cruise_cas=sp.cruise_cas,
                       cruise_mach=sp.cruise_mach, commanded_cas=sp.commanded_cas,
                       commanded_mach=sp.commanded_mach)
    t = 0.0
    coeffs = world.coeffs_for(ac.plan.aircraft_type)
    while kin.dist_nm < dist_nm and t < ROLLOUT_HORIZON_S:
        kin = tem_step(kin, descend, correction, coeffs, wind, ROLLOUT_DT_S)
        t += ROLLOUT_DT_S
        if kin.fl == target_fl and kin.rocd == 0.0:
            return target_fl
    return kin.fl


def compute_top_of_descent(world, ac, target_fl: float, waypoint, model,
                           wind, immediate: bool = False) -> DescentPlan:
    """Latest descent start meeting the level-by constraint, or raise
    :class:`ConstraintUnachievable`."""
    if target_fl >= ac.kin.fl - 0.5:
        raise ConstraintUnachievable("target level not below current level")
    correction = (mean_mode_correction(model) if model is not None
                  else identity_correction()).curves()
    d_abeam = abeam_distance_nm(world, ac, waypoint)
    if d_abeam <= 0.0:
        raise ConstraintUnachievable("constraint waypoint is behind the aircraft")

    alt_at_abeam = _altitude_at_distance(world, ac, target_fl, d_abeam, correction, wind)
    if alt_at_abeam > target_fl + LEVEL_BY_TOLERANCE_FL:
        raise ConstraintUnachievable(
            f"immediate descent reaches FL{alt_at_abeam:.1f} at the abeam point, "
            f"target FL{target_fl:.0f}"
        )

    if immediate:
        return DescentPlan(0.0, d_abeam, d_abeam, (ac.kin.lat, ac.kin.lon), at_risk=False)

    level0, _ = _rollout_level_distance(world, ac, target_fl, 0.0, correction, wind)
    if level0 >= d_abeam - TOD_TOLERANCE_NM:
        # only an immediate descent can make it
        return DescentPlan(0.0, d_abeam, d_abeam, (ac.kin.lat, ac.kin.lon), at_risk=True)

    lo, hi = 0.0, d_abeam
    while hi - lo > TOD_TOLERANCE_NM:
        mid = 0.5 * (lo + hi)
        level_at, _ = _rollout_level_distance(world, ac, target_fl, mid, correction, wind)
        if level_at <= d_abeam:
            lo = mid
        else:
            hi = mid
    # one sub-step of trigger quantization is absorbed by starting early
    tod_dist = max(0.0, lo - TRIGGER_MARGIN_NM)
    return DescentPlan(
        tod_dist_from_now=tod_dist,
        tod_dist_to_go=d_abeam - tod_dist,
        abeam_dist=d_abeam,
        tod_position=_position_along_path(world, ac, tod_dist),
        at_risk=False,
    )
