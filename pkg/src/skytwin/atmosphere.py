"""International Standard Atmosphere, airspeed conversions, and 3-D wind grids.

The ISA here is the plain standard: linear lapse to the 11 km tropopause,
isothermal above, no temperature deviations. Speeds are converted with the
full compressible relations so that CAS<->TAS round trips are exact to well
below 1e-6 kt across the operating envelope.

Wind lives on rectilinear (lat, lon, FL) lattices. Each grid carries a
``role`` tag ("forecast" or "truth"); the simulation kernel integrates
aircraft against truth grids only, while observations expose forecast grids
only. That segregation is enforced where the grids are consumed and tested
via the role tags.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .units import FL_TO_M, KT_TO_MS, MS_TO_KT, G0

# ISA constants
T0 = 288.15          # K, sea level
P0 = 101325.0        # Pa
RHO0 = 1.225         # kg/m^3
R_GAS = 287.05287    # J/(kg K)
KAPPA = 1.4
LAPSE = 0.0065       # K/m below the tropopause
H_TROP = 11000.0     # m
T_TROP = T0 - LAPSE * H_TROP     # 216.65 K
P_TROP = P0 * (T_TROP / T0) ** (G0 / (LAPSE * R_GAS))

_MU = (KAPPA - 1.0) / KAPPA

FL_MAX = 600.0


class DomainError(ValueError):
    """Input outside the stated operating envelope."""


def isa_temperature(h_m: float) -> float:
    if h_m < H_TROP:
        return T0 - LAPSE * h_m
    return T_TROP


def isa_pressure(h_m: float) -> float:
    if h_m < H_TROP:
        return P0 * ((T0 - LAPSE * h_m) / T0) ** (G0 / (LAPSE * R_GAS))
    return P_TROP * math.exp(-G0 * (h_m - H_TROP) / (R_GAS * T_TROP))


def isa_density(h_m: float) -> float:
    return isa_pressure(h_m) / (R_GAS * isa_temperature(h_m))


def speed_of_sound(h_m: float) -> float:
    return math.sqrt(KAPPA * R_GAS * isa_temperature(h_m))


@dataclass(frozen=True)
class AtmosphereState:
    """ISA state at one geopotential altitude."""

    pressure: float      # Pa
    density: float       # kg/m^3
    temperature: float   # K
    speed_of_sound: float  # m/s

    @classmethod
    def at(cls, h_m: float) -> "AtmosphereState":
        return cls(
            pressure=isa_pressure(h_m),
            density=isa_density(h_m),
            temperature=isa_temperature(h_m),
            speed_of_sound=speed_of_sound(h_m),
        )


def _check_cas_fl(cas_kt: float, fl: float) -> None:
    if not (0.0 < cas_kt < 400.0):
        raise DomainError(f"CAS {cas_kt} kt outside (0, 400)")
    if not (0.0 <= fl <= FL_MAX):
        raise DomainError(f"FL {fl} outside [0, {FL_MAX:.0f}]")


def cas_to_tas(cas_kt: float, fl: float) -> float:
    """Compressible CAS -> TAS conversion at ISA, both in knots."""
    _check_cas_fl(cas_kt, fl)
    vc = cas_kt * KT_TO_MS
    h = fl * FL_TO_M
    p = isa_pressure(h)
    rho = isa_density(h)
    q = P0 * ((1.0 + _MU * RHO0 * vc * vc / (2.0 * P0)) ** (1.0 / _MU) - 1.0)
    tas = math.sqrt(
        (2.0 * p / (_MU * rho)) * ((1.0 + q / p) ** _MU - 1.0)
    )
    return tas * MS_TO_KT


def tas_to_cas(tas_kt: float, fl: float) -> float:
    """Inverse of :func:`cas_to_tas`; exact round trip by construction."""
    if tas_kt <= 0.0:
        raise DomainError(f"TAS {tas_kt} kt must be positive")
    if not (0.0 <= fl <= FL_MAX):
        raise DomainError(f"FL {fl} outside [0, {FL_MAX:.0f}]")
    vt = tas_kt * KT_TO_MS
    h = fl * FL_TO_M
    p = isa_pressure(h)
    rho = isa_density(h)
    q = p * ((1.0 + _MU * rho * vt * vt / (2.0 * p)) ** (1.0 / _MU) - 1.0)
    cas = math.sqrt(
        (2.0 * P0 / (_MU * RHO0)) * ((1.0 + q / P0) ** _MU - 1.0)
    )
    return cas * MS_TO_KT


def cas_to_tas_array(cas_kt: np.ndarray, fl: np.ndarray) -> np.ndarray:
    """Vectorized :func:`cas_to_tas` (same constants, same relation)."""
    vc = np.asarray(cas_kt, dtype=float) * KT_TO_MS
    h = np.asarray(fl, dtype=float) * FL_TO_M
    t = np.where(h < H_TROP, T0 - LAPSE * h, T_TROP)
    p = np.where(
        h < H_TROP,
        P0 * (t / T0) ** (G0 / (LAPSE * R_GAS)),
        P_TROP * np.exp(-G0 * (h - H_TROP) / (R_GAS * T_TROP)),
    )
    rho = p / (R_GAS * t)
    q = P0 * ((1.0 + _MU * RHO0 * vc * vc / (2.0 * P0)) ** (1.0 / _MU) - 1.0)
    tas = np.sqrt((2.0 * p / (_MU * rho)) * ((1.0 + q / p) ** _MU - 1.0))
    return tas * MS_TO_KT


def mach_to_tas(mach: float, fl: float) -> float:
    return mach * speed_of_sound(fl * FL_TO_M) * MS_TO_KT


def tas_to_mach(tas_kt: float, fl: float) -> float:
    return tas_kt * KT_TO_MS / speed_of_sound(fl * FL_TO_M)


def crossover_fl(cas_kt: float, mach: float) -> float:
    """Flight level where the CAS schedule and the Mach schedule give the
    same TAS, found by bisection to 0.01 FL.

    Below the crossover the aircraft flies constant CAS, above it constant
    Mach. Returns the FL600 ceiling sentinel when the Mach TAS is never
    reached below FL600.
    """
    _check_cas_fl(cas_kt, 0.0)
    if not (0.0 < mach < 1.0):
        raise DomainError(f"Mach {mach} outside (0, 1)")

    def gap(fl: float) -> float:
        return cas_to_tas(cas_kt, fl) - mach_to_tas(mach, fl)

    lo, hi = 0.0, FL_MAX
    if gap(lo) >= 0.0:
        # mach TAS never reached from below: no crossover in the climb
        return FL_MAX
    if gap(hi) < 0.0:
        return FL_MAX
    while hi - lo > 0.01:
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SpeedState:
    """Current speed of one aircraft in all three conventions."""

    cas: float           # knots
    mach: float
    tas: float           # knots
    regime: str          # "cas-governed" | "mach-governed"

    @classmethod
    def from_cas(cls, cas_kt: float, fl: float, schedule_mach: float) -> "SpeedState":
        tas = cas_to_tas(cas_kt, fl)
        mach = tas_to_mach(tas, fl)
        xfl = crossover_fl(cas_kt, schedule_mach)
        regime = "mach-governed" if fl >= xfl else "cas-governed"
        return cls(cas=cas_kt, mach=mach, tas=tas, regime=regime)


@dataclass(frozen=True)
class WindGrid:
    """3-D wind lattice with trilinear interpolation.

    Axes must be strictly ascending; queries outside the hull clamp to the
    nearest face. ``u`` is the eastward and ``v`` the northward component,
    both m/s, indexed [lat, lon, fl].
    """

    lat_axis: np.ndarray
    lon_axis: np.ndarray
    fl_axis: np.ndarray
    u: np.ndarray
    v: np.ndarray
    role: str = "forecast"

    def __post_init__(self):
        for name in ("lat_axis", "lon_axis", "fl_axis", "u", "v"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        shape = (len(self.lat_axis), len(self.lon_axis), len(self.fl_axis))
        if self.u.shape != shape or self.v.shape != shape:
            raise ValueError(f"wind lattice shape {self.u.shape} != axes {shape}")
        for ax_name in ("lat_axis", "lon_axis", "fl_axis"):
            ax = getattr(self, ax_name)
            if len(ax) == 0:
                raise ValueError(f"empty {ax_name}")
            if len(ax) > 1 and not np.all(np.diff(ax) > 0):
                raise ValueError(f"{ax_name} not strictly ascending")
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.v))):
            raise ValueError("non-finite wind component")
        if self.role not in ("forecast", "truth"):
            raise ValueError(f"bad wind grid role {self.role!r}")
        # constant fields short-circuit the interpolation (hot path)
        if self.u.min() == self.u.max() and self.v.min() == self.v.max():
            object.__setattr__(self, "_constant", (float(self.u.flat[0]), float(self.v.flat[0])))
        else:
            object.__setattr__(self, "_constant", None)

    @classmethod
    def uniform(cls, u: float, v: float, role: str = "forecast") -> "WindGrid":
        one = np.full((2, 2, 2), float(u))
        two = np.full((2, 2, 2), float(v))
        return cls(
            lat_axis=np.array([-90.0, 90.0]),
            lon_axis=np.array([-180.0, 180.0]),
            fl_axis=np.array([0.0, 600.0]),
            u=one,
            v=two,
            role=role,
        )

    @classmethod
    def calm(cls, role: str = "truth") -> "WindGrid":
        return cls.uniform(0.0, 0.0, role=role)

    def wind_at(self, lat: float, lon: float, fl: float, t: float = 0.0) -> tuple[float, float]:
        """Trilinear interpolation; time-invariant per grid snapshot."""
        if self._constant is not None:
            return self._constant
        iy, wy = _bracket(self.lat_axis, lat)
        ix, wx = _bracket(self.lon_axis, lon)
        iz, wz = _bracket(self.fl_axis, fl)
        u = _tri(self.u, iy, ix, iz, wy, wx, wz)
        v = _tri(self.v, iy, ix, iz, wy, wx, wz)
        return u, v


def _bracket(axis: np.ndarray, x: float) -> tuple[int, float]:
    """Lower index and fractional weight of x within the axis, clamped."""
    n = len(axis)
    if n == 1 or x <= axis[0]:
        return 0, 0.0
    if x >= axis[-1]:
        return n - 2, 1.0
    i = int(np.searchsorted(axis, x, side="right")) - 1
    w = (x - axis[i]) / (axis[i + 1] - axis[i])
    return i, float(w)


def _tri(a: np.ndarray, iy: int, ix: int, iz: int, wy: float, wx: float, wz: float) -> float:
    iy1 = min(iy + 1, a.shape[0] - 1)
    ix1 = min(ix + 1, a.shape[1] - 1)
    iz1 = min(iz + 1, a.shape[2] - 1)
    c00 = a[iy, ix, iz] * (1 - wy) + a[iy1, ix, iz] * wy
    c01 = a[iy, ix, iz1] * (1 - wy) + a[iy1, ix, iz1] * wy
    c10 = a[iy, ix1, iz] * (1 - wy) + a[iy1, ix1, iz] * wy
    c11 = a[iy, ix1, iz1] * (1 - wy) + a[iy1, ix1, iz1] * wy
    c0 = c00 * (1 - wx) + c10 * wx
    c1 = c01 * (1 - wx) + c11 * wx
    return float(c0 * (1 - wz) + c1 * wz)


@dataclass(frozen=True)
class WindSequence:
    """Timestamped grid snapshots with step-change transitions: the snapshot
    whose ``active_from`` most recently passed serves all queries."""

    grids: tuple[tuple[float, WindGrid], ...]   # (active_from, grid), ascending

    def __post_init__(self):
        entries = tuple(sorted(((float(t), g) for t, g in self.grids), key=lambda e: e[0]))
        if not entries:
            raise ValueError("wind sequence needs at least one grid")
        roles = {g.role for _, g in entries}
        if len(roles) != 1:
            raise ValueError("wind sequence mixes forecast and truth grids")
        object.__setattr__(self, "grids", entries)

    @property
    def role(self) -> str:
        return self.grids[0][1].role

    def at_time(self, t: float) -> WindGrid:
        active = self.grids[0][1]
        for t0, grid in self.grids:
            if t0 <= t:
                active = grid
            else:
                break
        return active

    def wind_at(self, lat: float, lon: float, fl: float, t: float = 0.0) -> tuple[float, float]:
        return self.at_time(t).wind_at(lat, lon, fl, t)


def ground_vector(tas_kt: float, heading_deg: float, wind_uv: tuple[float, float]) -> tuple[float, float]:
    """Ground speed (kt) and track (deg, [0,360)) from TAS along heading
    plus the wind vector (m/s components)."""
    if tas_kt <= 0.0:
        raise DomainError(f"TAS {tas_kt} must be positive")
    h = math.radians(heading_deg)
    ve = tas_kt * math.sin(h) + wind_uv[0] * MS_TO_KT
    vn = tas_kt * math.cos(h) + wind_uv[1] * MS_TO_KT
    gs = math.hypot(ve, vn)
    track = math.degrees(math.atan2(ve, vn)) % 360.0 if gs > 0 else heading_deg
    return gs, track
