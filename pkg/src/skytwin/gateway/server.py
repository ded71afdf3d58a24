"""Asyncio TCP gateway: concurrent sessions over the length-delimited
protocol, lockstep or free-running clock, per-session filtered broadcasts.

All world mutations happen in the single event loop, so command application
is tick-boundary atomic by construction. A dropped connection never stalls
the tick loop; its session is simply retired.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

from ..kernel.clearances import ClearanceError, clearance_from_dict
from ..scenario.files import ScenarioError, ScenarioSpec, load_scenario, world_from_spec
from .env import build_observation, forecast_wind_lookup
from .protocol import (
    PROTOCOL_VERSION,
    FrameDecoder,
    ProtocolError,
    encode_message,
    make_msg,
    validate_envelope,
)
from .sessions import SessionManager


class GatewayServer:
    def __init__(self, scenario: str | Path | ScenarioSpec, *, models=None,
                 mode: str = "lockstep", speed_factor: float | None = None,
                 host: str = "127.0.0.1", port: int = 0, latency_override=None):
        if mode not in ("lockstep", "free-running"):
            raise ValueError(f"unknown pacing mode {mode!r}")
        self.spec = load_scenario(scenario) if isinstance(scenario, (str, Path)) else scenario
        self.models = models
        self.mode = mode
        self.speed_factor = speed_factor
        self.host, self.port = host, port
        self.latency_override = latency_override
        self.world = world_from_spec(self.spec, models=models,
                                     latency_override=latency_override)
        self.sessions = SessionManager()
        self._writers: dict[str, asyncio.StreamWriter] = {}
        self._send_seq: dict[str, int] = {}
        self._server: asyncio.AbstractServer | None = None
        self._free_task: asyncio.Task | None = None
        self._step_lock = asyncio.Lock()

    # ------------------------------------------------------------ lifecycle

    async def start(self) -> int:
        self._server = await asyncio.start_server(self._handle, self.host, self.port)
        self.port = self._server.sockets[0].getsockname()[1]
        if self.mode == "free-running":
            self._free_task = asyncio.ensure_future(self._free_run())
        return self.port

    async def stop(self) -> None:
        if self._free_task:
            self._free_task.cancel()
        if self._server:
            self._server.close()
            await self._server.wait_closed()
        for w in list(self._writers.values()):
            w.close()

    async def serve_forever(self) -> None:
        assert self._server is not None
        async with self._server:
            await self._server.serve_forever()

    # ------------------------------------------------------------ messaging

    def _send(self, sid: str, mtype: str, payload: dict) -> None:
        writer = self._writers.get(sid)
        if writer is None:
            return
        seq = self._send_seq.get(sid, 0)
        self._send_seq[sid] = seq + 1
        try:
            writer.write(encode_message(make_msg(sid, seq, mtype, payload)))
        except (ConnectionError, RuntimeError):
            self._drop(sid)

    def _drop(self, sid: str) -> None:
        self.sessions.remove(sid)
        self._writers.pop(sid, None)
        self._send_seq.pop(sid, None)

    def _broadcast_snapshot(self) -> None:
        for sid, session in list(self.sessions.sessions.items()):
            groups = session.groups or None
            include = session.role in ("controller", "observer")
            obs = build_observation(self.world, groups, intents=self.sessions.intents,
                                    include_intents=include)
            self._send(sid, "snapshot", {"observation": obs})

    # ------------------------------------------------------------- handlers

    async def _handle(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        decoder = FrameDecoder()
        queue: list[dict] = []

        async def next_msg():
            while not queue:
                data = await reader.read(65536)
                if not data:
                    return None
                queue.extend(decoder.feed(data))
            return queue.pop(0)

        sid: str | None = None
        try:
            hello = await next_msg()
            if hello is None:
                return
            err = validate_envelope(hello)
            if not err and hello["type"] != "hello":
                err = "first message must be hello"
            if not err and hello["payload"].get("protocol_version") != PROTOCOL_VERSION:
                err = (f"protocol version mismatch: server "
                       f"{PROTOCOL_VERSION}, client {hello['payload'].get('protocol_version')}")
            role = hello["payload"].get("role") if not err else None
            if not err and role not in ("agent", "controller", "observer"):
                err = f"unknown role {role!r}"
            if err:
                writer.write(encode_message(make_msg("", 0, "error",
                                                     {"code": "handshake", "message": err})))
                await writer.drain()
                writer.close()
                return
            session = self.sessions.add(
                role=role,
                groups=set(hello["payload"].get("groups", [])),
                name=hello["payload"].get("name", ""),
            )
            sid = session.id
            self._writers[sid] = writer
            self._send(sid, "hello-ack", {
                "session": sid, "role": role,
                "protocol_version": PROTOCOL_VERSION,
                "mode": self.mode,
                "groups": sorted(session.groups),
                "scenario": self.spec.name,
            })
            await writer.drain()

            while True:
                msg = await next_msg()
                if msg is None:
                    return
                await self._dispatch(sid, msg)
                await writer.drain()
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        except ProtocolError as e:
            if sid:
                self._send(sid, "error", {"code": "protocol", "message": str(e)})
        finally:
            if sid:
                self._drop(sid)
            try:
                writer.close()
            except RuntimeError:
                pass

    async def _dispatch(self, sid: str, msg: dict) -> None:
        err = validate_envelope(msg)
        if err:
            self._send(sid, "error", {"code": "envelope", "message": err,
                                      "re_seq": msg.get("seq")})
            return
        mtype = msg["type"]
        payload = msg["payload"]
        re_seq = msg["seq"]
        try:
            if mtype == "reset":
                await self._on_reset(sid, payload)
            elif mtype == "step":
                await self._on_step(sid, payload)
            elif mtype == "action":
                self._on_action(sid, payload)
            elif mtype == "takeover":
                self._on_takeover(sid, payload)
            elif mtype == "intent":
                self._on_intent(sid, payload)
            elif mtype == "wind":
                self._send(sid, "wind-result",
                           {"values": forecast_wind_lookup(self.world, payload.get("points", []))})
            elif mtype == "log-request":
                self._send(sid, "log-data", {"lines": self.world.log.canonical_lines()})
            elif mtype == "bye":
                raise ConnectionError("client closed")
            else:
                self._send(sid, "error", {"code": "unsupported", "re_seq": re_seq,
                                          "message": f"server cannot handle {mtype}"})
        except ConnectionError:
            raise
        except (ClearanceError, ScenarioError, ValueError) as e:
            self._send(sid, "error", {"code": "request", "re_seq": re_seq, "message": str(e)})

    async def _on_reset(self, sid: str, payload: dict) -> None:
        session = self.sessions.sessions[sid]
        if session.role == "observer":
            self._send(sid, "error", {"code": "forbidden", "message": "observers cannot reset"})
            return
        doc = dict(self.spec.doc)
        if payload.get("scenario"):
            try:
                self.spec = load_scenario(payload["scenario"])
                doc = dict(self.spec.doc)
            except (OSError, ScenarioError) as e:
                self._send(sid, "error", {"code": "scenario-load", "message": str(e)})
                return
        if payload.get("seed") is not None:
            doc = {**doc, "seed": int(payload["seed"])}
        async with self._step_lock:
            self.world = world_from_spec(ScenarioSpec(doc), models=self.models,
                                         latency_override=self.latency_override)
            self.sessions.takeovers.clear()
            self.sessions.intents.clear()
        session_groups = session.groups or None
        self._send(sid, "reset-ok", {
            "observation": build_observation(self.world, session_groups)})

    async def _on_step(self, sid: str, payload: dict) -> None:
        session = self.sessions.sessions[sid]
        if session.role == "observer":
            self._send(sid, "error", {"code": "forbidden", "message": "observers cannot step"})
            return
        if self.mode != "lockstep":
            self._send(sid, "error", {"code": "mode",
                                      "message": "step only valid in lockstep mode"})
            return
        n_ticks = int(payload.get("n_ticks", 1))
        if n_ticks < 1:
            self._send(sid, "error", {"code": "request", "message": "n_ticks must be >= 1"})
            return
        accepted, rejected = self._apply_actions(sid, payload.get("actions", []))
        async with self._step_lock:
            reward = 0.0
            for _ in range(n_ticks):
                if self.world.done():
                    break
                before = len(self.world.log.records)
                self.world.tick()
                for rec in self.world.log.records[before:]:
                    if rec["kind"] == "snapshot":
                        reward += rec["reward"]
                self._broadcast_snapshot()
        groups = session.groups or None
        self._send(sid, "step-result", {
            "observation": build_observation(self.world, groups,
                                             intents=self.sessions.intents),
            "reward": reward,
            "done": self.world.done(),
            "info": {"accepted": accepted, "rejected": rejected},
        })

    def _apply_actions(self, sid: str, actions: list) -> tuple[list, list]:
        accepted, rejected = [], []
        for a in actions:
            callsign = a.get("callsign", "")
            ok, reason = self.sessions.can_command(sid, callsign, self.world)
            if not ok:
                rejected.append({"callsign": callsign, "accepted": False, "reason": reason})
                continue
            try:
                clearance = clearance_from_dict(a.get("clearance", {}))
            except ClearanceError as e:
                rejected.append({"callsign": callsign, "accepted": False, "reason": str(e)})
                continue
            ack = self.world.issue_clearance(callsign, clearance, issuer=sid)
            (accepted if ack.accepted else rejected).append(
                {"callsign": callsign, **ack.to_dict()})
        return accepted, rejected

    def _on_action(self, sid: str, payload: dict) -> None:
        accepted, rejected = self._apply_actions(sid, [payload])
        result = (accepted + rejected)[0]
        self._send(sid, "action-ack", result)

    def _on_takeover(self, sid: str, payload: dict) -> None:
        callsign = payload.get("callsign", "")
        ok, reason, prev = self.sessions.takeover(sid, callsign, self.world)
        self._send(sid, "takeover-result",
                   {"callsign": callsign, "accepted": ok, "reason": reason})
        if ok:
            self.world.log.append(self.world.sim_time, "takeover", callsign=callsign,
                                  by_session=sid, from_session=prev)
            if prev and prev != sid:
                self._send(prev, "control-lost", {"callsign": callsign, "to_session": sid})

    def _on_intent(self, sid: str, payload: dict) -> None:
        callsign = payload.get("callsign", "")
        body = payload.get("intent", {})
        size = len(json.dumps(body).encode())
        ok, reason = self.sessions.publish_intent(sid, callsign, body, self.world, size)
        self._send(sid, "intent-ack", {"callsign": callsign, "accepted": ok, "reason": reason})
        if ok:
            self.world.log.append(self.world.sim_time, "intent-published",
                                  callsign=callsign, by_session=sid, size_bytes=size)

    # ------------------------------------------------------------- pacing

    async def _free_run(self) -> None:
        budget = None if self.speed_factor is None else \
            self.world.tick_interval / self.speed_factor
        try:
            while True:
                if self.world.done():
                    await asyncio.sleep(0.05)
                    continue
                loop = asyncio.get_event_loop()
                before = loop.time()
                async with self._step_lock:
                    self.world.tick()
                    self._broadcast_snapshot()
                if budget is not None:
                    elapsed = loop.time() - before
                    await asyncio.sleep(max(0.0, budget - elapsed))
                else:
                    await asyncio.sleep(0)
        except asyncio.CancelledError:
            pass
