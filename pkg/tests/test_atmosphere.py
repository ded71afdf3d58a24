"""Atmosphere and airspeed tests against an independent ISA oracle.

The oracle computes CAS<->TAS by root-finding on the Mach number from the
impact-pressure ratio rather than the closed-form inversion used by the
implementation, so the two only agree if both encode the same physics.
"""

import math

import numpy as np
import pytest

from skytwin.atmosphere import (
    DomainError,
    WindGrid,
    cas_to_tas,
    cas_to_tas_array,
    crossover_fl,
    ground_vector,
    isa_density,
    isa_pressure,
    isa_temperature,
    mach_to_tas,
    speed_of_sound,
    tas_to_cas,
)
from skytwin.units import FL_TO_M, KT_TO_MS, MS_TO_KT

# --- independent oracle -------------------------------------------------

G = 9.80665
R = 287.05287
T0, P0 = 288.15, 101325.0
A0 = math.sqrt(1.4 * R * T0)


def oracle_atmo(h_m):
    if h_m < 11000.0:
        t = T0 - 0.0065 * h_m
        p = P0 * (t / T0) ** (G / (0.0065 * R))
    else:
        t = T0 - 0.0065 * 11000.0
        p_trop = P0 * (t / T0) ** (G / (0.0065 * R))
        p = p_trop * math.exp(-G * (h_m - 11000.0) / (R * t))
    return t, p, p / (R * t)


def oracle_impact_pressure(mach, p):
    return p * ((1.0 + 0.2 * mach * mach) ** 3.5 - 1.0)


def oracle_cas_from_qc(qc):
    # CAS is the sea-level TAS producing the same impact pressure
    m0 = math.sqrt(5.0 * ((qc / P0 + 1.0) ** (1.0 / 3.5) - 1.0))
    return m0 * A0 * MS_TO_KT


def oracle_cas_to_tas(cas_kt, fl):
    t, p, _ = oracle_atmo(fl * FL_TO_M)
    a = math.sqrt(1.4 * R * t)
    lo, hi = 1e-6, 0.999
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if oracle_cas_from_qc(oracle_impact_pressure(mid, p)) < cas_kt:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi) * a * MS_TO_KT


def oracle_crossover(cas_kt, mach):
    lo, hi = 0.0, 600.0
    def gap(fl):
        t, p, _ = oracle_atmo(fl * FL_TO_M)
        return oracle_cas_to_tas(cas_kt, fl) - mach * math.sqrt(1.4 * R * t) * MS_TO_KT
    if gap(hi) < 0:
        return 600.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- tests ---------------------------------------------------------------

def test_sea_level_cas_equals_tas():
    assert cas_to_tas(250.0, 0.0) == pytest.approx(250.0, abs=0.01)


def test_cas_to_tas_matches_oracle():
    assert cas_to_tas(280.0, 350.0) == pytest.approx(oracle_cas_to_tas(280.0, 350.0), abs=0.1)
    for cas, fl in [(150, 50), (200, 150), (300, 250), (340, 100), (250, 400)]:
        assert cas_to_tas(cas, fl) == pytest.approx(oracle_cas_to_tas(cas, fl), abs=0.1)


def test_round_trip_grid():
    worst = 0.0
    for cas in range(150, 351, 10):
        for fl in range(0, 451, 50):
            err = abs(tas_to_cas(cas_to_tas(cas, fl), fl) - cas)
            worst = max(worst, err)
    assert worst < 1e-6


def test_vectorized_matches_scalar():
    cas = np.linspace(150, 350, 37)
    fl = np.linspace(0, 450, 37)
    vec = cas_to_tas_array(cas, fl)
    ref = np.array([cas_to_tas(c, f) for c, f in zip(cas, fl)])
    assert np.max(np.abs(vec - ref)) < 1e-9


def test_tas_increases_with_fl():
    prev = 0.0
    for fl in range(0, 451, 25):
        cur = cas_to_tas(280.0, fl)
        assert cur > prev
        prev = cur


def test_domain_errors():
    with pytest.raises(DomainError):
        cas_to_tas(0.0, 100.0)
    with pytest.raises(DomainError):
        cas_to_tas(250.0, 700.0)


def test_crossover_matches_oracle():
    assert crossover_fl(300.0, 0.78) == pytest.approx(oracle_crossover(300.0, 0.78), abs=0.5)


def test_crossover_monotonicity():
    assert crossover_fl(150.0, 0.95) > crossover_fl(300.0, 0.78)


def test_crossover_ceiling_sentinel():
    assert crossover_fl(300.0, 0.40) == 600.0


def test_wind_node_identity_and_constant_field():
    rng = np.random.default_rng(7)
    grid = WindGrid(
        lat_axis=[50.0, 51.0, 52.0],
        lon_axis=[-1.0, 0.0, 1.0],
        fl_axis=[100.0, 200.0, 300.0],
        u=rng.normal(size=(3, 3, 3)),
        v=rng.normal(size=(3, 3, 3)),
        role="truth",
    )
    u, v = grid.wind_at(51.0, 0.0, 200.0)
    assert u == pytest.approx(grid.u[1, 1, 1], abs=1e-12)
    assert v == pytest.approx(grid.v[1, 1, 1], abs=1e-12)

    const = WindGrid.uniform(20.0, 0.0)
    assert const.wind_at(12.3, 45.6, 234.0) == (20.0, 0.0)


def brute_trilinear(grid, lat, lon, fl):
    def frac(axis, x):
        x = min(max(x, axis[0]), axis[-1])
        i = int(np.clip(np.searchsorted(axis, x, side="right") - 1, 0, len(axis) - 2))
        return i, (x - axis[i]) / (axis[i + 1] - axis[i])
    iy, fy = frac(grid.lat_axis, lat)
    ix, fx = frac(grid.lon_axis, lon)
    iz, fz = frac(grid.fl_axis, fl)
    out = []
    for a in (grid.u, grid.v):
        s = 0.0
        for dy in (0, 1):
            for dx in (0, 1):
                for dz in (0, 1):
                    w = ((fy if dy else 1 - fy) * (fx if dx else 1 - fx) * (fz if dz else 1 - fz))
                    s += w * a[iy + dy, ix + dx, iz + dz]
        out.append(s)
    return tuple(out)


def test_wind_random_queries_match_brute_force():
    rng = np.random.default_rng(42)
    grid = WindGrid(
        lat_axis=np.sort(rng.uniform(40, 60, 5)),
        lon_axis=np.sort(rng.uniform(-10, 10, 5)),
        fl_axis=np.sort(rng.uniform(0, 450, 5)),
        u=rng.normal(0, 30, size=(5, 5, 5)),
        v=rng.normal(0, 30, size=(5, 5, 5)),
    )
    for _ in range(100):
        lat = rng.uniform(38, 62)
        lon = rng.uniform(-12, 12)
        fl = rng.uniform(-20, 470)
        got = grid.wind_at(lat, lon, fl)
        want = brute_trilinear(grid, lat, lon, fl)
        assert got[0] == pytest.approx(want[0], abs=1e-9)
        assert got[1] == pytest.approx(want[1], abs=1e-9)


def test_wind_continuity_across_faces():
    rng = np.random.default_rng(3)
    grid = WindGrid(
        lat_axis=[50.0, 51.0, 52.0],
        lon_axis=[0.0, 1.0, 2.0],
        fl_axis=[100.0, 200.0, 300.0],
        u=rng.normal(size=(3, 3, 3)),
        v=rng.normal(size=(3, 3, 3)),
    )
    for eps in (1e-10, -1e-10):
        a = grid.wind_at(51.0 + eps, 0.5, 150.0)
        b = grid.wind_at(51.0, 0.5, 150.0)
        assert a[0] == pytest.approx(b[0], abs=1e-6)


def test_ground_vector_calm_and_tailwind():
    gs, track = ground_vector(400.0, 0.0, (0.0, 0.0))
    assert gs == pytest.approx(400.0)
    assert track == pytest.approx(0.0)
    gs, track = ground_vector(400.0, 0.0, (0.0, 20.0))
    assert gs == pytest.approx(400.0 + 20.0 * MS_TO_KT, abs=1e-9)
    assert track == pytest.approx(0.0)


def test_ground_vector_random_vs_vector_sum():
    rng = np.random.default_rng(11)
    for _ in range(50):
        tas = rng.uniform(100, 500)
        hdg = rng.uniform(0, 360)
        u, v = rng.normal(0, 30, 2)
        gs, track = ground_vector(tas, hdg, (u, v))
        ve = tas * math.sin(math.radians(hdg)) + u * MS_TO_KT
        vn = tas * math.cos(math.radians(hdg)) + v * MS_TO_KT
        assert gs == pytest.approx(math.hypot(ve, vn), abs=1e-6)
        want = math.degrees(math.atan2(ve, vn)) % 360.0
        diff = (track - want + 180.0) % 360.0 - 180.0
        assert abs(diff) < 1e-6
