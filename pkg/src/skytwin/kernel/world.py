"""The world: one simulation instance.

A single logical writer (the tick loop) advances hybrid replay/simulated
traffic at the 6 s radar cadence with 1 s dynamics sub-steps. All stochastic
draws are pure functions of the scenario seed, so the event log is a pure
function of (scenario, seeds, timestamped action stream) and pacing mode
never changes it.
"""

from __future__ import annotations

import math
import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from .. import geo, metrics
from ..airspace import AirspaceDefinition, BandboxConfig, FlightPlan, controlling_group
from ..atmosphere import WindGrid, WindSequence, ground_vector, tas_to_cas
from ..perf.coefficients import PerfCoefficients, load_coefficients
from ..perf.model import (
    CorrectionSample,
    TrajectoryModel,
    identity_correction,
    sample_correction,
    sample_cruise_speed,
)
from ..perf.tem import Guidance, IntegrationFault, Kinematics, tem_step, thrust_for
from ..units import MS_TO_KT
from .aircraft import (
    AircraftState,
    Intent,
    LateralIntent,
    PendingClearance,
    SpeedIntent,
    VerticalIntent,
    initial_intent,
)
from .clearances import (
    ChangeCAS,
    ChangeMach,
    ChangeROCD,
    Clearance,
    ClimbDescendNow,
    ContactFrequency,
    DescendNowLevelBy,
    DescendWhenReadyLevelBy,
    DirectTo,
    FlyHeading,
    MaintainPresentHeading,
    TurnBy,
    clearance_to_dict,
)
from .coordination import Coordination, check_coordination
from .descent import ConstraintUnachievable, abeam_distance_nm, compute_top_of_descent
from .events import EventLog

WAYPOINT_CAPTURE_NM = 2.0


@dataclass(frozen=True)
class LatencyModel:
    """Pilot response delay: mean plus uniform jitter, per-aircraft seeded."""

    mean_s: float = 8.0
    jitter_s: float = 4.0

    def draw(self, rng: np.random.Generator) -> float:
        j = self.jitter_s * (2.0 * rng.random() - 1.0) if self.jitter_s > 0 else 0.0
        return max(0.0, self.mean_s + j)


def _stable_id(name: str) -> int:
    return zlib.crc32(name.encode())


@dataclass
class Ack:
    accepted: bool
    reason: str = ""
    execute_at: float | None = None

    def to_dict(self) -> dict:
        return {"accepted": self.accepted, "reason": self.reason, "execute_at": self.execute_at}


class World:
    def __init__(self, airspace: AirspaceDefinition, *, seed: int,
                 wind_truth: WindGrid | None = None,
                 wind_forecast: WindGrid | None = None,
                 bandbox: BandboxConfig | None = None,
                 simulated_groups: set[str] | None = None,
                 duration_s: float = 1800.0,
                 latency: LatencyModel = LatencyModel(),
                 tick_interval: float = 6.0,
                 sub_dt: float = 1.0,
                 models: dict[tuple[str, str], TrajectoryModel] | None = None,
                 coeff_dir=None,
                 scenario_name: str = ""):
        self.airspace = airspace
        self.bandbox = bandbox or airspace.default_bandbox
        self.wind_truth = wind_truth or WindGrid.calm(role="truth")
        self.wind_forecast = wind_forecast or WindGrid.calm(role="forecast")
        if self.wind_truth.role != "truth":
            raise ValueError("dynamics wind grid must carry role=truth")
        if self.wind_forecast.role != "forecast":
            raise ValueError("observation wind grid must carry role=forecast")
        self.seed = seed
        self.simulated_groups = set(simulated_groups or self.bandbox.group_ids())
        self.duration_s = duration_s
        self.latency = latency
        self.tick_interval = tick_interval
        self.sub_dt = sub_dt
        self.models = models or {}
        self.coeff_dir = coeff_dir
        self.scenario_name = scenario_name

        self.sim_time = 0.0
        self.aircraft: dict[str, AircraftState] = {}
        self.pending_spawns: list[tuple[float, AircraftState]] = []
        self.coordinations: list[Coordination] = []
        self.log = EventLog()
        self.open_los: dict[tuple[str, str], metrics.SeparationEvent] = {}
        self.closed_los: list[metrics.SeparationEvent] = []
        self.tick_info = metrics.TickInfo()
        self.lag_s = 0.0           # pacing diagnostics, never logged
        self._retired: dict[str, AircraftState] = {}
        self._finalized = False
        self._coeff_cache: dict[str, PerfCoefficients] = {}
        self._latency_rngs: dict[str, np.random.Generator] = {}
        self._cmd_seq = 0
        self.log.append(0.0, "scenario-meta", name=scenario_name, seed=seed,
                        duration_s=duration_s, tick_interval=tick_interval)

    # ------------------------------------------------------------ helpers

    def truth_grid_now(self) -> WindGrid:
        if isinstance(self.wind_truth, WindSequence):
            return self.wind_truth.at_time(self.sim_time)
        return self.wind_truth

    def coeffs_for(self, aircraft_type: str) -> PerfCoefficients:
        if aircraft_type not in self._coeff_cache:
            self._coeff_cache[aircraft_type] = load_coefficients(aircraft_type, self.coeff_dir)
        return self._coeff_cache[aircraft_type]

    def model_for(self, aircraft_type: str, phase: str) -> TrajectoryModel | None:
        return self.models.get((aircraft_type, phase))

    def _latency_rng(self, callsign: str) -> np.random.Generator:
        if callsign not in self._latency_rngs:
            self._latency_rngs[callsign] = np.random.default_rng(
                np.random.SeedSequence([self.seed, _stable_id(callsign), 1])
            )
        return self._latency_rngs[callsign]

    def correction_for(self, ac: AircraftState, phase: str) -> CorrectionSample:
        """Per-aircraft per-phase correction, sampled once, seeded."""
        if phase not in ac.corrections:
            model = self.model_for(ac.plan.aircraft_type, phase)
            if model is None:
                ac.corrections[phase] = identity_correction()
            else:
                seed = int(np.random.SeedSequence(
                    [self.seed, _stable_id(ac.callsign), _stable_id(phase), 2]
                ).generate_state(1)[0])
                ac.corrections[phase] = sample_correction(model, seed)
        return ac.corrections[phase]

    # ----------------------------------------------------------- aircraft

    def add_aircraft(self, ac: AircraftState, entry_time: float | None = None) -> None:
        if entry_time is not None and entry_time > self.sim_time:
            self.pending_spawns.append((entry_time, ac))
            self.pending_spawns.sort(key=lambda p: (p[0], p[1].callsign))
            return
        self._activate(ac)

    def _activate(self, ac: AircraftState) -> None:
        if ac.callsign in self.aircraft:
            raise ValueError(f"duplicate callsign {ac.callsign}")
        ac.controlling_group = controlling_group(
            ac.kin.lat, ac.kin.lon, ac.kin.fl, self.bandbox, self.airspace)
        if ac.comms_group is None:
            ac.comms_group = ac.controlling_group
        self.aircraft[ac.callsign] = ac
        self.log.append(self.sim_time, "aircraft-enter", callsign=ac.callsign,
                        source=ac.source, fl=ac.kin.fl, lat=ac.kin.lat, lon=ac.kin.lon)

    def spawn_simulated(self, plan: FlightPlan, kin: Kinematics,
                        cruise: tuple[float, float] | None = None,
                        entry_time: float | None = None,
                        selected_fl: float | None = None,
                        sample_cruise: bool = False) -> AircraftState:
        if cruise is None and sample_cruise:
            model = self.model_for(plan.aircraft_type, "descent") or \
                self.model_for(plan.aircraft_type, "climb")
            if model is not None:
                seed = int(np.random.SeedSequence(
                    [self.seed, _stable_id(plan.callsign), 3]).generate_state(1)[0])
                cruise = sample_cruise_speed(model, seed)
        if cruise is None:
            coeffs = self.coeffs_for(plan.aircraft_type)
            cruise = (kin.cas, coeffs.base_mach)
        intent = initial_intent(self._leg_index_for(plan, kin), kin.heading, kin.fl, cruise)
        ac = AircraftState(callsign=plan.callsign, kin=kin, intent=intent,
                           plan=plan, source="simulated", selected_fl=selected_fl)
        self.add_aircraft(ac, entry_time)
        return ac

    def spawn_replay(self, plan: FlightPlan, track, entry_time: float | None = None) -> AircraftState:
        s = track.sample_at(track.t_start)
        kin = Kinematics(lat=s["lat"], lon=s["lon"], fl=s["fl"], heading=s["hdg"],
                         cas=max(120.0, min(370.0, s["gs"] * 0.8)))
        intent = initial_intent(0, s["hdg"], s["fl"])
        ac = AircraftState(callsign=plan.callsign, kin=kin, intent=intent, plan=plan,
                           source="replay", track=track, selected_fl=track.selected_fl)
        self.add_aircraft(ac, entry_time if entry_time is not None else track.t_start)
        return ac

    def _leg_index_for(self, plan: FlightPlan, kin: Kinematics) -> int:
        """Index of the first route waypoint still ahead of the aircraft."""
        for i, ident in enumerate(plan.route):
            wp = self.airspace.waypoint(ident)
            brg = geo.initial_bearing_deg(kin.lat, kin.lon, wp.lat, wp.lon)
            if abs(geo.angle_diff_deg(brg, kin.heading)) < 90.0:
                return i
        return max(0, len(plan.route) - 1)

    # --------------------------------------------------------- clearances

    def issue_clearance(self, callsign: str, clearance: Clearance, issuer: str = "",
                        latency: LatencyModel | None = None) -> Ack:
        ac = self.aircraft.get(callsign)
        if ac is None:
            return Ack(False, f"unknown callsign {callsign}")
        if ac.quarantined:
            return Ack(False, "aircraft quarantined after integration fault")
        if ac.source == "replay" and not isinstance(clearance, ContactFrequency):
            return Ack(False, "aircraft not under simulation control")

        err = self._validate_references(ac, clearance)
        if err:
            return Ack(False, err)

        if isinstance(clearance, (DescendWhenReadyLevelBy, DescendNowLevelBy)):
            try:
                self._plan_constrained_descent(ac, clearance)
            except ConstraintUnachievable as e:
                self.log.append(self.sim_time, "clearance-rejected", callsign=callsign,
                                clearance=clearance_to_dict(clearance), reason=str(e))
                return Ack(False, f"constraint unachievable: {e}")

        lat_model = latency or self.latency
        delay = lat_model.draw(self._latency_rng(callsign))
        execute_at = self.sim_time + delay
        self._cmd_seq += 1
        ac.intent.enqueue(execute_at, self._cmd_seq, clearance)
        ac.clearance_count += 1
        self.tick_info.clearances_issued += 1
        self.log.append(self.sim_time, "clearance", callsign=callsign, issuer=issuer,
                        clearance=clearance_to_dict(clearance), execute_at=execute_at)
        return Ack(True, execute_at=execute_at)

    def _validate_references(self, ac: AircraftState, c: Clearance) -> str:
        if isinstance(c, (DirectTo, DescendWhenReadyLevelBy, DescendNowLevelBy)):
            try:
                self.airspace.waypoint(c.waypoint)
            except Exception:
                return f"unknown waypoint {c.waypoint}"
        if isinstance(c, ContactFrequency):
            if c.group not in self.bandbox.group_ids():
                return f"unknown group {c.group}"
        if isinstance(c, ChangeROCD) and ac.intent.vertical.mode == "level":
            return "not climbing or descending"
        if isinstance(c, (DescendWhenReadyLevelBy, DescendNowLevelBy)) and \
                c.fl >= ac.kin.fl - 0.5:
            return "target level not below current level"
        return ""

    def _plan_constrained_descent(self, ac: AircraftState, c) -> None:
        """Resolve the descent geometry at issue time (may raise); the result
        is stashed and folded into intent when the clearance executes."""
        wp = self.airspace.waypoint(c.waypoint)
        model = self.model_for(ac.plan.aircraft_type, "descent")
        plan = compute_top_of_descent(
            self, ac, c.fl, wp, model, self.wind_forecast,
            immediate=isinstance(c, DescendNowLevelBy),
        )
        if plan.at_risk:
            self.log.append(self.sim_time, "metric", event="constraint-at-risk",
                            callsign=ac.callsign, waypoint=c.waypoint, fl=c.fl)
        ac.planned_tod[(c.fl, c.waypoint)] = plan.tod_dist_to_go

    # execution-time folding of one clearance into intent
    def _execute_clearance(self, ac: AircraftState, c: Clearance) -> None:
        v = ac.intent.vertical
        la = ac.intent.lateral
        sp = ac.intent.speed
        if isinstance(c, DirectTo):
            if c.waypoint in ac.plan.route:
                la.mode = "route"
                la.leg_index = ac.plan.route.index(c.waypoint)
                la.direct_waypoint = None
            else:
                la.mode = "route"
                la.direct_waypoint = c.waypoint
            la.turn_direction = None
        elif isinstance(c, FlyHeading):
            la.mode = "heading"
            la.heading = c.heading
            la.turn_direction = None
        elif isinstance(c, TurnBy):
            delta = c.degrees if c.direction == "right" else -c.degrees
            la.mode = "heading"
            la.heading = (ac.kin.heading + delta) % 360.0
            la.turn_direction = c.direction
        elif isinstance(c, MaintainPresentHeading):
            la.mode = "heading"
            la.heading = ac.kin.heading
            la.turn_direction = None
        elif isinstance(c, ClimbDescendNow):
            v.constraint = None
            v.pending_target = None
            v.tod_dist_to_go = None
            if c.fl > ac.kin.fl + 0.5:
                v.mode = "climbing"
            elif c.fl < ac.kin.fl - 0.5:
                v.mode = "descending"
            else:
                v.mode = "level"
            v.target_fl = c.fl
            sp.commanded_rocd = None
        elif isinstance(c, DescendNowLevelBy):
            v.mode = "descending"
            v.target_fl = c.fl
            v.pending_target = None
            v.constraint = (c.fl, c.waypoint)
            sp.commanded_rocd = None
        elif isinstance(c, DescendWhenReadyLevelBy):
            v.mode = "level"
            v.target_fl = ac.kin.fl
            v.pending_target = c.fl
            v.constraint = (c.fl, c.waypoint)
            v.tod_dist_to_go = ac.planned_tod.pop((c.fl, c.waypoint), 0.0)
            sp.commanded_rocd = None
        elif isinstance(c, ChangeCAS):
            sp.commanded_cas = c.cas
        elif isinstance(c, ChangeMach):
            sp.commanded_mach = c.mach
        elif isinstance(c, ChangeROCD):
            if v.mode in ("climbing", "descending"):
                sp.commanded_rocd = abs(c.rocd)
            else:
                self.log.append(self.sim_time, "clearance-dropped", callsign=ac.callsign,
                                clearance=clearance_to_dict(c), reason="no longer climbing or descending")
                return
        elif isinstance(c, ContactFrequency):
            self.handover(ac.callsign, c.group, reason="instruction")
            return
        self.log.append(self.sim_time, "clearance-executed", callsign=ac.callsign,
                        clearance=clearance_to_dict(c))

    # ----------------------------------------------------------- handover

    def handover(self, callsign: str, to_group: str, reason: str = "instruction") -> Ack:
        ac = self.aircraft.get(callsign)
        if ac is None:
            return Ack(False, f"unknown callsign {callsign}")
        if to_group not in self.bandbox.group_ids():
            return Ack(False, f"unknown group {to_group}")
        if ac.comms_group == to_group:
            return Ack(True, "no-op handover")
        from_group = ac.comms_group
        ac.comms_group = to_group
        self.log.append(self.sim_time, "handover", callsign=callsign,
                        from_group=from_group, to_group=to_group, reason=reason)
        if ac.source == "replay" and to_group in self.simulated_groups:
            # conversion lands on the next tick-boundary radar state
            ac.pending_conversion = True
        return Ack(True)

    def _convert_to_simulated(self, ac: AircraftState) -> None:
        """One-way replay -> simulated conversion at the current replayed state."""
        s = ac.track.sample_at(self.sim_time)
        uv = self.truth_grid_now().wind_at(s["lat"], s["lon"], s["fl"])
        h = math.radians(s["hdg"])
        tas_e = s["gs"] * math.sin(h) - uv[0] * MS_TO_KT
        tas_n = s["gs"] * math.cos(h) - uv[1] * MS_TO_KT
        tas = max(140.0, math.hypot(tas_e, tas_n))
        cas = max(120.0, min(370.0, tas_to_cas(tas, s["fl"])))
        ac.kin = Kinematics(lat=s["lat"], lon=s["lon"], fl=s["fl"], heading=s["hdg"],
                            cas=cas, rocd=0.0, dist_nm=ac.kin.dist_nm)
        ac.source = "simulated"
        target = ac.selected_fl if ac.selected_fl is not None else s["fl"]
        if target > s["fl"] + 1.0:
            mode = "climbing"
        elif target < s["fl"] - 1.0:
            mode = "descending"
        else:
            mode, target = "level", s["fl"]
        coeffs = self.coeffs_for(ac.plan.aircraft_type)
        ac.intent = Intent(
            lateral=LateralIntent(mode="route",
                                  leg_index=self._leg_index_for(ac.plan, ac.kin),
                                  heading=s["hdg"]),
            vertical=VerticalIntent(mode=mode, target_fl=target),
            speed=SpeedIntent(cruise_cas=cas, cruise_mach=coeffs.base_mach),
        )
        # prime phase corrections from the generative model
        self.correction_for(ac, "descent")
        self.correction_for(ac, "climb")
        self.log.append(self.sim_time, "conversion", callsign=ac.callsign,
                        fl=s["fl"], lat=s["lat"], lon=s["lon"])

    # ----------------------------------------------------------- guidance

    def _resolve_guidance(self, ac: AircraftState) -> Guidance:
        v = ac.intent.vertical
        la = ac.intent.lateral
        sp = ac.intent.speed
        target_heading = None
        turn_dir = None
        if la.mode == "heading":
            target_heading = la.heading
            turn_dir = la.turn_direction
        else:
            wp = self._next_waypoint(ac)
            if wp is not None:
                target_heading = geo.initial_bearing_deg(ac.kin.lat, ac.kin.lon, wp.lat, wp.lon)
        return Guidance(
            target_fl=v.target_fl,
            cruise_cas=sp.cruise_cas,
            cruise_mach=sp.cruise_mach,
            commanded_cas=sp.commanded_cas,
            commanded_mach=sp.commanded_mach,
            commanded_rocd=sp.commanded_rocd,
            target_heading=target_heading,
            turn_direction=turn_dir,
        )

    def _next_waypoint(self, ac: AircraftState):
        la = ac.intent.lateral
        if la.direct_waypoint is not None:
            return self.airspace.waypoint(la.direct_waypoint)
        if la.leg_index < len(ac.plan.route):
            return self.airspace.waypoint(ac.plan.route[la.leg_index])
        return None

    def _sequence_waypoints(self, ac: AircraftState) -> None:
        la = ac.intent.lateral
        if la.mode != "route":
            return
        wp = self._next_waypoint(ac)
        if wp is None:
            return
        d = geo.great_circle_nm(ac.kin.lat, ac.kin.lon, wp.lat, wp.lon)
        brg = geo.initial_bearing_deg(ac.kin.lat, ac.kin.lon, wp.lat, wp.lon)
        behind = abs(geo.angle_diff_deg(brg, ac.kin.heading)) > 100.0
        if d <= WAYPOINT_CAPTURE_NM or (behind and d < 6.0):
            if la.direct_waypoint is not None:
                la.direct_waypoint = None
                la.mode = "heading"
                la.heading = ac.kin.heading
            else:
                la.leg_index += 1
                if la.leg_index >= len(ac.plan.route):
                    la.mode = "heading"
                    la.heading = ac.kin.heading

    # ---------------------------------------------------------------- tick

    def tick(self) -> None:
        t0 = self.sim_time
        t1 = t0 + self.tick_interval
        self.tick_info = metrics.TickInfo()

        # activate due spawns
        while self.pending_spawns and self.pending_spawns[0][0] <= t1:
            _, ac = self.pending_spawns.pop(0)
            self._activate(ac)

        # sub-stepped dynamics with due-clearance folding at sub-step starts
        n_sub = max(1, int(round(self.tick_interval / self.sub_dt)))
        for k in range(n_sub):
            sub_start = t0 + k * self.sub_dt
            self.sim_time = sub_start
            for ac in self.aircraft.values():
                if ac.exited or ac.quarantined:
                    continue
                for pending in ac.intent.due(sub_start):
                    self._execute_clearance(ac, pending.clearance)
                if ac.source != "simulated":
                    continue
                self._check_tod_trigger(ac)
                self._step_one(ac)
        self.sim_time = t1

        # replay aircraft: interpolate the recorded track to the tick boundary
        for ac in self.aircraft.values():
            if ac.source != "replay":
                continue
            if t1 > ac.track.t_end:
                ac.exited = True
                continue
            s = ac.track.sample_at(t1)
            prev = ac.kin
            ac.kin = Kinematics(
                lat=s["lat"], lon=s["lon"], fl=s["fl"], heading=s["hdg"],
                cas=ac.kin.cas,
                rocd=(s["fl"] - prev.fl) * 100.0 * 60.0 / self.tick_interval,
                dist_nm=prev.dist_nm + geo.great_circle_nm(prev.lat, prev.lon, s["lat"], s["lon"]),
            )

        # data-driven frequency transfers due this tick
        for ac in list(self.aircraft.values()):
            if ac.source != "replay" or ac.exited:
                continue
            due = [ev for ev in ac.track.transfer_events if ev[0] <= t1]
            for ev in due:
                ac.track.transfer_events.remove(ev)
                self.handover(ac.callsign, ev[1], reason="data-driven")

        # conversions pinned to the tick-boundary radar state
        for ac in self.aircraft.values():
            if ac.pending_conversion and not ac.exited:
                ac.pending_conversion = False
                self._convert_to_simulated(ac)

        # boundary crossings and coordinations
        for ac in self.aircraft.values():
            if ac.exited:
                continue
            new_group = controlling_group(ac.kin.lat, ac.kin.lon, ac.kin.fl,
                                          self.bandbox, self.airspace)
            if new_group != ac.controlling_group:
                old = ac.controlling_group
                ac.controlling_group = new_group
                self.log.append(t1, "boundary-crossing", callsign=ac.callsign,
                                from_group=old, to_group=new_group, fl=ac.kin.fl)
                for coord in self.coordinations:
                    if coord.active() and coord.callsign == ac.callsign and \
                            coord.from_group == old and coord.to_group == new_group:
                        payload = check_coordination(coord, ac.kin.fl, ac.kin.lat, ac.kin.lon)
                        if coord.status == "satisfied":
                            self.tick_info.coordinations_satisfied += 1
                        else:
                            self.tick_info.coordinations_violated += 1
                        self.log.append(t1, "coordination", **payload)
                if old is not None and new_group is None and ac.source == "simulated":
                    ac.exited = True

        # retire exited aircraft, keeping their run aggregates
        for cs in [cs for cs, ac in self.aircraft.items() if ac.exited]:
            ac = self.aircraft.pop(cs)
            self._retired[cs] = ac
            self.log.append(t1, "aircraft-exit", callsign=cs, source=ac.source)

        # separation scan and snapshot
        states = [ac for ac in self.aircraft.values() if not ac.quarantined]
        for transition in metrics.scan_separation(states, self.open_los, t1):
            if transition["event"] == "los-close":
                self.closed_los.append(metrics.SeparationEvent(
                    pair=tuple(transition["pair"]), start=transition["start"],
                    end=transition["end"], min_lateral=transition["min_lateral_nm"],
                    min_vertical=transition["min_vertical_fl"],
                    severity=transition["severity"]))
            self.log.append(t1, "separation", **transition)
        reward = metrics.compose_reward(states, self.open_los, self.tick_info)
        min_sep = metrics.min_normalized_separation(states)
        self.log.append(t1, "snapshot",
                        aircraft=sorted((a.snapshot_dict() for a in self.aircraft.values()),
                                        key=lambda d: d["callsign"]),
                        open_los=sorted(list(p) for p in self.open_los),
                        reward=reward,
                        min_norm_sep=min_sep if math.isfinite(min_sep) else None,
                        clearances_issued=self.tick_info.clearances_issued)

    def _check_tod_trigger(self, ac: AircraftState) -> None:
        v = ac.intent.vertical
        if v.pending_target is None or v.tod_dist_to_go is None or v.constraint is None:
            return
        wp = self.airspace.waypoint(v.constraint[1])
        d_abeam = abeam_distance_nm(self, ac, wp)
        if d_abeam <= v.tod_dist_to_go:
            v.mode = "descending"
            v.target_fl = v.pending_target
            v.pending_target = None
            self.log.append(self.sim_time, "tod-reached", callsign=ac.callsign,
                            target_fl=v.target_fl, dist_to_abeam=d_abeam)

    def _step_one(self, ac: AircraftState) -> None:
        self._sequence_waypoints(ac)
        guidance = self._resolve_guidance(ac)
        phase = ac.phase()
        corr = self.correction_for(ac, phase) if phase in ("climb", "descent") \
            else identity_correction()
        coeffs = self.coeffs_for(ac.plan.aircraft_type)
        events: list[str] = []
        dist_before = ac.kin.dist_nm
        try:
            new_kin = tem_step(ac.kin, guidance, corr.curves(), coeffs,
                               self.truth_grid_now(), self.sub_dt, events=events)
        except IntegrationFault as fault:
            ac.quarantined = True
            self.log.append(self.sim_time, "integration-fault", callsign=ac.callsign,
                            detail=str(fault), state=ac.snapshot_dict())
            return
        ac.fuel_kg += coeffs.sfc_proxy * thrust_for(
            ac.kin, phase, corr.curves(), coeffs) * self.sub_dt
        ac.kin = new_kin
        self.tick_info.progress_nm += new_kin.dist_nm - dist_before
        if ac.intent.vertical.mode == "level":
            ac.cruise_time_s += self.sub_dt
            if ac.kin.fl < ac.plan.requested_fl - 0.5:
                ac.below_requested_s += self.sub_dt
        for ev in events:
            self.log.append(self.sim_time, "metric", event=ev, callsign=ac.callsign)
        v = ac.intent.vertical
        if v.mode in ("climbing", "descending") and ac.kin.fl == v.target_fl and ac.kin.rocd == 0.0:
            v.mode = "level"
            ac.intent.speed.commanded_rocd = None
            payload = {"callsign": ac.callsign, "fl": v.target_fl}
            if v.constraint is not None:
                wp = self.airspace.waypoint(v.constraint[1])
                d_abeam = abeam_distance_nm(self, ac, wp)
                payload["constraint_met"] = bool(d_abeam >= -0.5)
                payload["dist_to_abeam_nm"] = d_abeam
                v.constraint = None
            self.log.append(self.sim_time, "level-off", **payload)

    # ----------------------------------------------------------------- run

    def done(self) -> bool:
        return self.sim_time >= self.duration_s or \
            (not self.aircraft and not self.pending_spawns)

    def finalize(self) -> metrics.MetricsReport:
        """Close open events and serialize the run rollup into the log."""
        if self._finalized:
            raise RuntimeError("world already finalized")
        self._finalized = True
        for pair in list(self.open_los):
            ev = self.open_los.pop(pair)
            ev.end = self.sim_time
            self.closed_los.append(ev)
            self.log.append(self.sim_time, "separation", event="los-close", **ev.to_dict())

        everyone = list(self._retired.values()) + list(self.aircraft.values())
        fuel_total = sum(ac.fuel_kg for ac in everyone)
        clearance_count = {ac.callsign: ac.clearance_count for ac in everyone
                           if ac.clearance_count}
        proxies = []
        for ac in everyone:
            try:
                from ..airspace import route_legs
                plan_dist = sum(leg.length for leg in route_legs(ac.plan, self.airspace))
            except Exception:
                plan_dist = None
            if not plan_dist:
                continue
            hist = []
            if ac.cruise_time_s > 0:
                hist = [(ac.below_requested_s, ac.plan.requested_fl - 10.0),
                        (ac.cruise_time_s - ac.below_requested_s, ac.plan.requested_fl)]
            proxies.append(metrics.efficiency_metrics(
                ac.kin.dist_nm, hist, plan_dist, ac.plan.requested_fl,
                ac.fuel_kg)["inefficiency_3di_proxy"])

        sat = vio = 0
        rewards = []
        margin = None
        for rec in self.log.records:
            if rec["kind"] == "coordination":
                if rec["status"] == "satisfied":
                    sat += 1
                else:
                    vio += 1
            elif rec["kind"] == "snapshot":
                rewards.append(rec["reward"])
                if rec["min_norm_sep"] is not None:
                    margin = rec["min_norm_sep"] if margin is None else \
                        min(margin, rec["min_norm_sep"])
        report = metrics.MetricsReport(
            los_count=len(self.closed_los),
            assured_safety_margin=margin,
            fuel_proxy_kg=fuel_total,
            inefficiency_3di_proxy=(sum(proxies) / len(proxies)) if proxies else None,
            clearance_count=clearance_count,
            coordination_compliance=sat / (sat + vio) if (sat + vio) else 1.0,
            reward_trace=rewards,
        )
        self.log.append(self.sim_time, "metrics-report", report=report.to_dict())
        return report

    def run(self, speed_factor: float | None = None) -> dict:
        """Advance to scenario end; pacing affects wall time only."""
        t_wall0 = time.monotonic()
        budget = None if speed_factor is None else self.tick_interval / speed_factor
        while not self.done():
            before = time.monotonic()
            self.tick()
            if budget is not None:
                elapsed = time.monotonic() - before
                if elapsed < budget:
                    time.sleep(budget - elapsed)
                else:
                    self.lag_s += elapsed - budget
        report = self.finalize()
        wall = time.monotonic() - t_wall0
        return {"sim_time": self.sim_time, "wall_s": wall, "lag_s": self.lag_s,
                "report": report}
