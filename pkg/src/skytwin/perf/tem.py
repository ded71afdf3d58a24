"""Total-energy point-mass integration.

One explicit-Euler step advances a kinematic state under climb/idle thrust,
parabolic-polar drag, an energy share factor splitting excess power between
climb and acceleration, and truth wind. Level-offs are captured exactly by
sub-stepping to the cleared flight level, so altitude never overshoots.

Corrections enter as an additive CAS delta and multiplicative thrust/drag
factors evaluated at the current flight level.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .. import geo
from ..atmosphere import (
    H_TROP,
    KAPPA,
    LAPSE,
    R_GAS,
    WindGrid,
    cas_to_tas,
    crossover_fl,
    ground_vector,
    isa_density,
    mach_to_tas,
    speed_of_sound,
    tas_to_cas,
)
from ..units import FL_TO_M, FPM_TO_MS, G0, KT_TO_MS, MS_TO_FPM, MS_TO_KT
from .coefficients import PerfCoefficients
from .profiles import FlightProfile

MAX_DT = 10.0
ACCEL_LIMIT = 0.6           # m/s^2 longitudinal
SPEED_TOL_KT = 0.5          # reporting threshold for off-schedule speed
STANDARD_TURN_RATE = 3.0    # deg/s
MAX_BANK_RAD = math.radians(25.0)
LEVEL_CAPTURE_FL = 0.005    # treat |fl - target| below this as level
ESF_ACCEL = 0.3             # energy share while changing speed in climb/descent
CAS_FLOOR, CAS_CEIL = 120.0, 370.0


class IntegrationFault(RuntimeError):
    """Non-finite state component; carries the pre-step state."""

    def __init__(self, state: "Kinematics", detail: str):
        super().__init__(f"integration fault: {detail}")
        self.state = state


@dataclass(frozen=True)
class Kinematics:
    """Dynamical sub-state of one aircraft."""

    lat: float
    lon: float
    fl: float            # continuous flight level
    heading: float       # degrees true
    cas: float           # knots
    rocd: float = 0.0    # ft/min
    dist_nm: float = 0.0 # accumulated ground distance

    def finite(self) -> bool:
        return all(map(math.isfinite, (self.lat, self.lon, self.fl, self.heading, self.cas, self.rocd)))


@dataclass(frozen=True)
class Guidance:
    """Per-step targets resolved from pilot intent."""

    target_fl: float
    cruise_cas: float | None = None    # level-segment speed when no command
    cruise_mach: float | None = None
    commanded_cas: float | None = None
    commanded_mach: float | None = None
    commanded_rocd: float | None = None  # magnitude, ft/min
    target_heading: float | None = None  # None: hold current heading
    turn_direction: str | None = None    # "left" | "right" | None shortest


def esf(mach: float, above_tropopause: bool, mach_governed: bool, accelerating: bool) -> float:
    """Energy share factor for the current speed regime."""
    if accelerating:
        return ESF_ACCEL
    m2 = mach * mach
    if mach_governed:
        if above_tropopause:
            return 1.0
        return 1.0 / (1.0 - KAPPA * R_GAS * LAPSE * m2 / (2.0 * G0))
    g = 1.0 + 0.2 * m2     # (1 + (kappa-1)/2 M^2)
    x = g ** (-1.0 / (KAPPA - 1.0)) * (g ** (KAPPA / (KAPPA - 1.0)) - 1.0)
    if above_tropopause:
        return 1.0 / (1.0 + x)
    return 1.0 / (1.0 - KAPPA * R_GAS * LAPSE * m2 / (2.0 * G0) + x)


@lru_cache(maxsize=16384)
def _crossover_cached(cas_centi_kt: int, mach_milli: int) -> float:
    return crossover_fl(cas_centi_kt / 100.0, mach_milli / 1000.0)


def _target_tas_kt(fl: float, cas_kt: float, mach: float) -> tuple[float, bool]:
    """Schedule TAS at fl and whether the mach leg governs."""
    xfl = _crossover_cached(int(round(cas_kt * 100)), int(round(mach * 1000)))
    if fl >= xfl:
        return mach_to_tas(mach, fl), True
    return cas_to_tas(cas_kt, fl), False


def _resolve_speed_targets(kin: Kinematics, guidance: Guidance,
                           correction: "CorrectionCurves", coeffs: PerfCoefficients,
                           level: bool) -> tuple[float, float, bool]:
    """(target cas below crossover, target mach, mach_governed at current fl)."""
    if guidance.commanded_cas is not None or guidance.commanded_mach is not None:
        cas = guidance.commanded_cas if guidance.commanded_cas is not None else coeffs.base_cas(kin.fl)
        mach = guidance.commanded_mach if guidance.commanded_mach is not None else coeffs.base_mach
    elif level and guidance.cruise_cas is not None:
        cas = guidance.cruise_cas
        mach = guidance.cruise_mach if guidance.cruise_mach is not None else coeffs.base_mach
    else:
        cas = coeffs.base_cas(kin.fl) + correction.delta_cas(kin.fl)
        mach = coeffs.base_mach
    cas = min(max(cas, CAS_FLOOR), CAS_CEIL)
    _, mach_governed = _target_tas_kt(kin.fl, cas, mach)
    return cas, mach, mach_governed


def _interp_scalar(xs: list, ys: list, x: float) -> float:
    """Clamped piecewise-linear interpolation; bisect beats np.interp for
    the small grids on the per-step hot path."""
    if x <= xs[0]:
        return ys[0]
    if x >= xs[-1]:
        return ys[-1]
    i = bisect_right(xs, x) - 1
    x0, x1 = xs[i], xs[i + 1]
    y0, y1 = ys[i], ys[i + 1]
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


class CorrectionCurves:
    """Pointwise access to a correction sample's three curves."""

    __slots__ = ("_fl", "_dcas", "_tm", "_dm")

    def __init__(self, fl_grid, delta_cas, thrust_mult, drag_mult):
        self._fl = [float(x) for x in fl_grid]
        self._dcas = [float(x) for x in delta_cas]
        self._tm = [float(x) for x in thrust_mult]
        self._dm = [float(x) for x in drag_mult]

    def delta_cas(self, fl: float) -> float:
        return _interp_scalar(self._fl, self._dcas, fl)

    def thrust_mult(self, fl: float) -> float:
        return _interp_scalar(self._fl, self._tm, fl)

    def drag_mult(self, fl: float) -> float:
        return _interp_scalar(self._fl, self._dm, fl)


IDENTITY_CURVES = CorrectionCurves([0.0, 600.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0])


def tem_step(kin: Kinematics, guidance: Guidance, correction: CorrectionCurves,
             coeffs: PerfCoefficients, wind_truth: WindGrid, dt: float,
             events: list | None = None) -> Kinematics:
    """One explicit-Euler total-energy step of at most MAX_DT seconds.

    ``events`` (when given) collects flag strings such as
    "performance-limit" raised during the step.
    """
    if not (0.0 < dt <= MAX_DT):
        raise ValueError(f"dt {dt} outside (0, {MAX_DT}]")
    if not kin.finite():
        raise IntegrationFault(kin, "non-finite input state")

    out = _step_inner(kin, guidance, correction, coeffs, wind_truth, dt, events)
    if not out.finite():
        raise IntegrationFault(kin, "non-finite result")
    return out


def _step_inner(kin: Kinematics, guidance: Guidance, correction: CorrectionCurves,
                coeffs: PerfCoefficients, wind: WindGrid, dt: float,
                events: list | None) -> Kinematics:
    h = kin.fl * FL_TO_M
    dfl = guidance.target_fl - kin.fl
    level = abs(dfl) <= LEVEL_CAPTURE_FL
    climbing = dfl > LEVEL_CAPTURE_FL

    target_cas, target_mach, mach_governed = _resolve_speed_targets(
        kin, guidance, correction, coeffs, level)

    v = cas_to_tas(kin.cas, kin.fl) * KT_TO_MS
    target_tas = (_target_tas_kt(kin.fl, target_cas, target_mach)[0]) * KT_TO_MS
    dv_gap = target_tas - v
    # catch band of one acceleration quantum: the schedule is followed
    # exactly once within reach, so mode switches happen at physical times
    # independent of the step size
    accelerating = abs(dv_gap) > ACCEL_LIMIT * dt

    rho = isa_density(h)
    mach_now = v / speed_of_sound(h)
    mass = coeffs.mass_ref
    tm = correction.thrust_mult(kin.fl)
    dm = correction.drag_mult(kin.fl)
    drag = coeffs.drag(rho, v, mass) * dm

    if level:
        # altitude hold; speed tracked kinematically
        new_v = v + max(-ACCEL_LIMIT * dt, min(ACCEL_LIMIT * dt, dv_gap))
        new_fl = guidance.target_fl
        rocd_fpm = 0.0
        new_heading = _turn(kin, guidance, v, dt)
        pos = _advance(kin, new_heading, v, wind, dt)
        return Kinematics(
            lat=pos[0], lon=pos[1], fl=new_fl, heading=new_heading,
            cas=tas_to_cas(max(new_v, 1.0) * MS_TO_KT, new_fl),
            rocd=rocd_fpm, dist_nm=kin.dist_nm + pos[2],
        )

    if climbing:
        thrust = coeffs.climb_thrust(h) * tm
    else:
        thrust = coeffs.descent_thrust(h) * tm

    share = esf(mach_now, h >= H_TROP, mach_governed, accelerating)
    excess = (thrust - drag) * v / (mass * G0)   # m/s of specific excess power
    rocd_ms = excess * share
    if climbing and rocd_ms <= 0.0:
        if events is not None:
            events.append("performance-limit")
    if not climbing and rocd_ms >= 0.0:
        # idle descent with too much thrust correction: force a drift-down
        if events is not None:
            events.append("performance-limit")

    if guidance.commanded_rocd is not None:
        cmd_ms = abs(guidance.commanded_rocd) * FPM_TO_MS
        if climbing:
            capped = min(cmd_ms, rocd_ms) if rocd_ms > 0 else rocd_ms
            if cmd_ms > max(rocd_ms, 0.0) and events is not None:
                events.append("rocd-limit")
            rocd_ms = capped
        else:
            perf_down = -abs(rocd_ms) if rocd_ms < 0 else 0.0
            capped = -cmd_ms if -cmd_ms >= perf_down else perf_down
            if -cmd_ms < perf_down and events is not None:
                events.append("rocd-limit")
            rocd_ms = capped
    elif not climbing:
        rocd_ms = min(rocd_ms, 0.0)   # never climb while cleared down

    # sub-step at the cleared level so capture never overshoots
    dfl_step = rocd_ms * dt / FL_TO_M
    crosses = (climbing and kin.fl + dfl_step >= guidance.target_fl) or \
              (not climbing and kin.fl + dfl_step <= guidance.target_fl)
    if crosses and abs(rocd_ms) > 1e-9:
        t_hit = (guidance.target_fl - kin.fl) * FL_TO_M / rocd_ms
        t_hit = max(1e-6, min(dt, t_hit))
        part = _integrate_segment(kin, guidance, correction, coeffs, wind, t_hit,
                                  rocd_ms, target_cas, target_mach, accelerating, v, dv_gap)
        part = replace(part, fl=guidance.target_fl, rocd=0.0)
        rest = dt - t_hit
        if rest > 1e-6:
            return _step_inner(part, guidance, correction, coeffs, wind, rest, events)
        return part

    return _integrate_segment(kin, guidance, correction, coeffs, wind, dt,
                              rocd_ms, target_cas, target_mach, accelerating, v, dv_gap)


def _integrate_segment(kin: Kinematics, guidance: Guidance, correction: CorrectionCurves,
                       coeffs: PerfCoefficients, wind: WindGrid, dt: float,
                       rocd_ms: float, target_cas: float, target_mach: float,
                       accelerating: bool, v: float, dv_gap: float) -> Kinematics:
    new_fl = kin.fl + rocd_ms * dt / FL_TO_M
    if accelerating:
        new_v = v + max(-ACCEL_LIMIT * dt, min(ACCEL_LIMIT * dt, dv_gap))
        new_cas = tas_to_cas(max(new_v, 1.0) * MS_TO_KT, new_fl)
    else:
        # on schedule: follow it exactly at the new level
        new_tas, _ = _target_tas_kt(new_fl, target_cas, target_mach)
        new_cas = tas_to_cas(new_tas, new_fl)
    new_heading = _turn(kin, guidance, v, dt)
    pos = _advance(kin, new_heading, v, wind, dt)
    return Kinematics(
        lat=pos[0], lon=pos[1], fl=new_fl, heading=new_heading,
        cas=new_cas, rocd=rocd_ms * MS_TO_FPM, dist_nm=kin.dist_nm + pos[2],
    )


def _turn(kin: Kinematics, guidance: Guidance, v_ms: float, dt: float) -> float:
    if guidance.target_heading is None:
        return kin.heading
    bank_rate = math.degrees(G0 * math.tan(MAX_BANK_RAD) / max(v_ms, 50.0))
    rate = min(STANDARD_TURN_RATE, bank_rate)
    diff = geo.angle_diff_deg(guidance.target_heading, kin.heading)
    if guidance.turn_direction == "left" and diff > 0:
        diff -= 360.0
    elif guidance.turn_direction == "right" and diff < 0:
        diff += 360.0
    step = max(-rate * dt, min(rate * dt, diff))
    if abs(diff) <= rate * dt:
        return guidance.target_heading % 360.0
    return (kin.heading + step) % 360.0


def _advance(kin: Kinematics, heading: float, v_ms: float, wind: WindGrid,
             dt: float) -> tuple[float, float, float]:
    uv = wind.wind_at(kin.lat, kin.lon, kin.fl)
    gs_kt, track = ground_vector(max(v_ms, 1.0) * MS_TO_KT, heading, uv)
    dist = gs_kt * dt / 3600.0
    lat, lon = geo.destination_point(kin.lat, kin.lon, track, dist)
    return lat, lon, dist


def thrust_for(kin: Kinematics, phase: str, correction: CorrectionCurves,
               coeffs: PerfCoefficients) -> float:
    """Thrust consistent with the integrator's regime choice, for fuel
    bookkeeping: climb thrust when climbing, idle when descending, drag
    balance when level (clamped between the two)."""
    h = kin.fl * FL_TO_M
    tm = correction.thrust_mult(kin.fl)
    if phase == "climb":
        return coeffs.climb_thrust(h) * tm
    if phase == "descent":
        return coeffs.descent_thrust(h) * tm
    v = cas_to_tas(kin.cas, kin.fl) * KT_TO_MS
    balance = coeffs.drag(isa_density(h), v, coeffs.mass_ref) * correction.drag_mult(kin.fl)
    return min(max(balance, coeffs.descent_thrust(h)), coeffs.climb_thrust(h)) * tm


def predict_profile(initial: Kinematics, guidance: Guidance, correction: CorrectionCurves,
                    coeffs: PerfCoefficients, wind: WindGrid,
                    horizon_s: float = 3600.0, dt: float = 1.0,
                    stop_after_level_s: float = 0.0) -> FlightProfile:
    """Closed-loop integration until level-off at the cleared level (plus an
    optional level tail) or the horizon, sampled every ``dt`` seconds."""
    if horizon_s > 3600.0:
        raise ValueError("horizon above 3600 s")
    kin = initial
    t = [0.0]
    fls = [kin.fl]
    cass = [kin.cas]
    rocds = [kin.rocd]
    dists = [kin.dist_nm]
    lats = [kin.lat]
    lons = [kin.lon]
    now = 0.0
    level_since: float | None = None if abs(kin.fl - guidance.target_fl) > LEVEL_CAPTURE_FL else 0.0
    while now < horizon_s:
        kin = tem_step(kin, guidance, correction, coeffs, wind, dt)
        now += dt
        t.append(now)
        fls.append(kin.fl)
        cass.append(kin.cas)
        rocds.append(kin.rocd)
        dists.append(kin.dist_nm)
        lats.append(kin.lat)
        lons.append(kin.lon)
        if abs(kin.fl - guidance.target_fl) <= LEVEL_CAPTURE_FL:
            if level_since is None:
                level_since = now
            if now - level_since >= stop_after_level_s:
                break
        else:
            level_since = None
    return FlightProfile(
        t=np.array(t), fl=np.array(fls), cas=np.array(cass),
        rocd=np.array(rocds), dist_nm=np.array(dists),
        lat=np.array(lats), lon=np.array(lons),
    )
