"""Runtime safety, efficiency, and procedural metrics, and reward shaping.

Separation minima are 5 NMI lateral / 10 FL vertical (configurable at the
scanner). The 3Di-style inefficiency figure is an explicitly non-certified
proxy: equal-weight blend of track extension over the planned great-circle
distance and the fraction of cruise time spent below the requested level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geo import great_circle_nm

LATERAL_MIN_NM = 5.0
VERTICAL_MIN_FL = 10.0
PROXIMITY_RANGE_NM = 10.0

# one degree of latitude is never shorter than this many NMI on the sphere
_NM_PER_DEG_LAT = math.pi / 180.0 * 3440.065


@dataclass
class SeparationEvent:
    pair: tuple[str, str]          # sorted callsigns
    start: float
    end: float | None = None
    min_lateral: float = float("inf")
    min_vertical: float = float("inf")
    severity: float = 1.0          # min over event of max(lat/5, vert/10)

    def update(self, lateral: float, vertical: float) -> None:
        self.min_lateral = min(self.min_lateral, lateral)
        self.min_vertical = min(self.min_vertical, vertical)
        ratio = max(lateral / LATERAL_MIN_NM, vertical / VERTICAL_MIN_FL)
        self.severity = min(self.severity, ratio)

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "start": self.start,
            "end": self.end,
            "min_lateral_nm": self.min_lateral,
            "min_vertical_fl": self.min_vertical,
            "severity": self.severity,
        }


def pairwise_conflicts(states: list, lateral_nm: float = LATERAL_MIN_NM,
                       vertical_fl: float = VERTICAL_MIN_FL) -> dict[tuple[str, str], tuple[float, float]]:
    """All pairs simultaneously inside both minima -> (lateral, vertical).

    A latitude-sorted sweep skips only pairs whose latitude difference alone
    already proves more than ``lateral_nm`` of separation, so the result is
    identical to the brute-force scan.
    """
    rows = sorted(
        ((s.kin.lat, s.kin.lon, s.kin.fl, s.callsign) for s in states),
        key=lambda r: (r[0], r[3]),
    )
    out: dict[tuple[str, str], tuple[float, float]] = {}
    n = len(rows)
    for i in range(n):
        lat_i, lon_i, fl_i, cs_i = rows[i]
        for j in range(i + 1, n):
            lat_j, lon_j, fl_j, cs_j = rows[j]
            if (lat_j - lat_i) * _NM_PER_DEG_LAT > lateral_nm:
                break
            vertical = abs(fl_j - fl_i)
            if vertical >= vertical_fl:
                continue
            lateral = great_circle_nm(lat_i, lon_i, lat_j, lon_j)
            if lateral < lateral_nm:
                pair = (cs_i, cs_j) if cs_i < cs_j else (cs_j, cs_i)
                out[pair] = (lateral, vertical)
    return out


def scan_separation(states: list, open_events: dict[tuple[str, str], SeparationEvent],
                    t: float) -> list[dict]:
    """Advance the open-event set by one snapshot; returns transition records."""
    conflicts = pairwise_conflicts(states)
    transitions: list[dict] = []
    for pair, (lateral, vertical) in conflicts.items():
        ev = open_events.get(pair)
        if ev is None:
            ev = SeparationEvent(pair=pair, start=t)
            open_events[pair] = ev
            transitions.append({"event": "los-open", "pair": list(pair), "start": t})
        ev.update(lateral, vertical)
    for pair in list(open_events):
        if pair not in conflicts:
            ev = open_events.pop(pair)
            ev.end = t
            transitions.append({"event": "los-close", **ev.to_dict()})
    return transitions


def min_normalized_separation(states: list) -> float:
    """Per-snapshot assured-safety indicator: the smallest pairwise
    max(lateral/5NMI, vertical/10FL) ratio; inf when fewer than two aircraft."""
    best = float("inf")
    n = len(states)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = states[i], states[j]
            lateral = great_circle_nm(a.kin.lat, a.kin.lon, b.kin.lat, b.kin.lon)
            vertical = abs(a.kin.fl - b.kin.fl)
            best = min(best, max(lateral / LATERAL_MIN_NM, vertical / VERTICAL_MIN_FL))
    return best


# ------------------------------------------------------------- efficiency

def efficiency_metrics(flown_dist_nm: float, fl_history: list[tuple[float, float]],
                       plan_dist_nm: float | None, requested_fl: float | None,
                       fuel_kg: float) -> dict:
    """Fuel proxy plus the (non-certified) 3Di-style inefficiency proxy.

    ``fl_history`` carries (duration_s, fl) cruise samples. Without a plan the
    track-extension term is the whole figure.
    """
    track_term = 0.0
    if plan_dist_nm and plan_dist_nm > 0.0:
        track_term = max(0.0, flown_dist_nm / plan_dist_nm - 1.0)
    level_term = 0.0
    if requested_fl is not None and fl_history:
        total = sum(d for d, _ in fl_history)
        below = sum(d for d, fl in fl_history if fl < requested_fl - 0.5)
        level_term = below / total if total > 0 else 0.0
    if plan_dist_nm:
        proxy = 0.5 * track_term + 0.5 * level_term
    else:
        proxy = track_term
    return {
        "fuel_proxy_kg": fuel_kg,
        "inefficiency_3di_proxy": proxy,
        "track_extension": track_term,
        "below_requested_fraction": level_term,
    }


# ----------------------------------------------------------------- reward

DEFAULT_REWARD_WEIGHTS = {
    "los_penalty": 5.0,
    "proximity": 2.0,
    "clearance_cost": 0.1,
    "progress": 0.02,      # per NMI of along-route progress
    "coordination_bonus": 1.0,
    "coordination_penalty": 1.0,
}


def proximity_penalty(distance_nm: float, rng_nm: float = PROXIMITY_RANGE_NM) -> float:
    """Smooth shaping term: ((range - d)/range)^2 inside range, zero beyond."""
    if distance_nm >= rng_nm:
        return 0.0
    x = (rng_nm - distance_nm) / rng_nm
    return x * x


def proximity_penalty_grad(distance_nm: float, rng_nm: float = PROXIMITY_RANGE_NM) -> float:
    if distance_nm >= rng_nm:
        return 0.0
    return -2.0 * (rng_nm - distance_nm) / (rng_nm * rng_nm)


@dataclass
class TickInfo:
    clearances_issued: int = 0
    progress_nm: float = 0.0
    coordinations_satisfied: int = 0
    coordinations_violated: int = 0


@dataclass
class MetricsReport:
    """Per-run rollup, serialized into the event log at completion."""

    los_count: int
    assured_safety_margin: float | None   # min over run of per-tick min ratio
    fuel_proxy_kg: float
    inefficiency_3di_proxy: float | None  # mean over aircraft with plans
    clearance_count: dict[str, int]
    coordination_compliance: float
    reward_trace: list[float]

    def to_dict(self) -> dict:
        return {
            "los_count": self.los_count,
            "assured_safety_margin": self.assured_safety_margin,
            "fuel_proxy_kg": self.fuel_proxy_kg,
            "inefficiency_3di_proxy": self.inefficiency_3di_proxy,
            "clearance_count": self.clearance_count,
            "coordination_compliance": self.coordination_compliance,
            "reward_trace": self.reward_trace,
        }


def metrics_table(log_records: list[dict]) -> str:
    """Flat tabular export: one row per tick plus one summary row."""
    lines = ["t_s,n_aircraft,open_los,reward,min_norm_sep,clearances_issued"]
    rewards = []
    min_margin = None
    for rec in log_records:
        if rec["kind"] != "snapshot":
            continue
        sep = rec.get("min_norm_sep")
        if sep is not None:
            min_margin = sep if min_margin is None else min(min_margin, sep)
        rewards.append(rec["reward"])
        lines.append(
            f"{rec['t']},{len(rec['aircraft'])},{len(rec['open_los'])},"
            f"{rec['reward']},{'' if sep is None else sep},{rec['clearances_issued']}"
        )
    report = next((r for r in log_records if r["kind"] == "metrics-report"), None)
    los = report["report"]["los_count"] if report else \
        sum(1 for r in log_records if r["kind"] == "separation" and r["event"] == "los-close")
    total_reward = sum(rewards)
    lines.append(
        f"summary,ticks={len(rewards)},los_count={los},total_reward={total_reward},"
        f"min_margin={'' if min_margin is None else min_margin},"
    )
    return "\n".join(lines) + "\n"


def compose_reward(states: list, open_los: dict, tick_info: TickInfo,
                   weights: dict | None = None) -> float:
    """Per-tick scalar reward, clipped into [-10, 10]."""
    w = dict(DEFAULT_REWARD_WEIGHTS)
    if weights:
        w.update(weights)
    for v in w.values():
        if not math.isfinite(v):
            raise ValueError("reward weights must be finite")

    reward = 0.0
    reward -= w["los_penalty"] * len(open_los)
    n = len(states)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = states[i], states[j]
            d = great_circle_nm(a.kin.lat, a.kin.lon, b.kin.lat, b.kin.lon)
            vert = abs(a.kin.fl - b.kin.fl)
            if vert < VERTICAL_MIN_FL:
                reward -= w["proximity"] * proximity_penalty(d)
    reward -= w["clearance_cost"] * tick_info.clearances_issued
    reward += w["progress"] * tick_info.progress_nm
    reward += w["coordination_bonus"] * tick_info.coordinations_satisfied
    reward -= w["coordination_penalty"] * tick_info.coordinations_violated
    return max(-10.0, min(10.0, reward))
