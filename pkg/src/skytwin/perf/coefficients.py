"""Per-type performance coefficients and the bundled synthetic tables.

The parametric forms are the conventional total-energy family: climb thrust
``ct1 * (1 - h_ft/ct2 + ct3*h_ft^2)``, idle descent thrust as a constant
fraction of climb thrust, and parabolic polar drag. The bundled tables are
synthetic values with plausible magnitudes for six representative types;
they are NOT any licensed coefficient set. Operators holding a licence can
drop replacement JSON files into a directory and point the loader at it.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from ..units import FT_TO_M, FL_TO_FT


class CoefficientError(ValueError):
    pass


@dataclass(frozen=True)
class PerfCoefficients:
    aircraft_type: str
    mass_ref: float          # kg
    wing_area: float         # m^2
    c_t1: float              # N
    c_t2: float              # ft
    c_t3: float              # 1/ft^2
    c_d0: float
    c_d2: float
    base_cas_knots: tuple[tuple[float, float], ...]  # (FL, CAS kt) knots, piecewise linear
    base_mach: float
    descent_thrust_factor: float
    sfc_proxy: float = 1.7e-5   # kg/(N s), fuel-burn proxy constant

    def __post_init__(self):
        knots = tuple((float(a), float(b)) for a, b in self.base_cas_knots)
        object.__setattr__(self, "base_cas_knots", knots)
        for name in ("mass_ref", "wing_area", "c_t1", "c_t2", "c_d0", "c_d2",
                     "base_mach", "sfc_proxy"):
            if getattr(self, name) <= 0:
                raise CoefficientError(f"{self.aircraft_type}: {name} must be positive")
        if self.c_t3 < 0:
            raise CoefficientError(f"{self.aircraft_type}: c_t3 must be non-negative")
        if not (0.0 < self.descent_thrust_factor < 1.0):
            raise CoefficientError(f"{self.aircraft_type}: descent_thrust_factor outside (0, 1)")
        fls = [k[0] for k in knots]
        if fls[0] > 0.0 or fls[-1] < 600.0 or any(b <= a for a, b in zip(fls, fls[1:])):
            raise CoefficientError(
                f"{self.aircraft_type}: base CAS schedule must cover [0, 600] with ascending FL knots"
            )
        # thrust must stay positive over the operational envelope (<= FL450)
        h = np.linspace(0.0, 450.0 * FL_TO_FT, 91)
        if np.any(self.c_t1 * (1.0 - h / self.c_t2 + self.c_t3 * h * h) <= 0.0):
            raise CoefficientError(f"{self.aircraft_type}: climb thrust non-positive inside envelope")
        object.__setattr__(self, "_sched_fl", [float(f) for f in fls])
        object.__setattr__(self, "_sched_cas", [float(k[1]) for k in knots])

    def base_cas(self, fl: float) -> float:
        """Schedule CAS (kt) at a flight level, piecewise linear."""
        xs, ys = self._sched_fl, self._sched_cas
        if fl <= xs[0]:
            return ys[0]
        if fl >= xs[-1]:
            return ys[-1]
        i = bisect_right(xs, fl) - 1
        return ys[i] + (ys[i + 1] - ys[i]) * (fl - xs[i]) / (xs[i + 1] - xs[i])

    def climb_thrust(self, h_m: float) -> float:
        h_ft = h_m / FT_TO_M
        t = self.c_t1 * (1.0 - h_ft / self.c_t2 + self.c_t3 * h_ft * h_ft)
        return max(t, 0.01 * self.c_t1)   # floor above the envelope

    def descent_thrust(self, h_m: float) -> float:
        return self.descent_thrust_factor * self.climb_thrust(h_m)

    def drag(self, rho: float, v_ms: float, mass_kg: float, g: float = 9.80665) -> float:
        q = 0.5 * rho * v_ms * v_ms * self.wing_area
        cl = mass_kg * g / q
        return q * (self.c_d0 + self.c_d2 * cl * cl)


def _from_dict(d: dict) -> PerfCoefficients:
    try:
        return PerfCoefficients(
            aircraft_type=d["aircraft_type"],
            mass_ref=d["mass_ref_kg"],
            wing_area=d["wing_area_m2"],
            c_t1=d["thrust_coeffs"]["c_t1_n"],
            c_t2=d["thrust_coeffs"]["c_t2_ft"],
            c_t3=d["thrust_coeffs"]["c_t3_per_ft2"],
            c_d0=d["drag_coeffs"]["c_d0"],
            c_d2=d["drag_coeffs"]["c_d2"],
            base_cas_knots=tuple((p["fl"], p["cas_kt"]) for p in d["base_cas_schedule"]),
            base_mach=d["base_mach"],
            descent_thrust_factor=d["descent_thrust_factor"],
            sfc_proxy=d.get("sfc_proxy_kg_per_ns", 1.7e-5),
        )
    except KeyError as e:
        raise CoefficientError(f"coefficient file missing field {e}") from None


def load_coefficients(aircraft_type: str, table_dir: str | Path | None = None) -> PerfCoefficients:
    """Load coefficients for one type, from ``table_dir`` when given, else
    from the bundled synthetic tables."""
    name = f"{aircraft_type.upper()}.json"
    if table_dir is not None:
        path = Path(table_dir) / name
        if not path.exists():
            raise CoefficientError(f"no coefficient file for {aircraft_type} in {table_dir}")
        return _from_dict(json.loads(path.read_text()))
    ref = resources.files("skytwin.data").joinpath("perf").joinpath(name)
    if not ref.is_file():
        raise CoefficientError(f"no bundled coefficients for type {aircraft_type!r}")
    return _from_dict(json.loads(ref.read_text()))


def bundled_types() -> list[str]:
    base = resources.files("skytwin.data").joinpath("perf")
    return sorted(p.name.removesuffix(".json") for p in base.iterdir() if p.name.endswith(".json"))
