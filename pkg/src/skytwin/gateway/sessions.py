"""Concurrent sessions, control rights, and agent-intent storage.

At most one session commands an aircraft at a time. Default rights go to
the earliest-joined agent session whose groups cover the aircraft's comms
group; a controller takeover overrides that until the aircraft leaves.
Observers issue nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .protocol import MAX_INTENT_BYTES

ROLES = ("agent", "controller", "observer")


@dataclass
class Session:
    id: str
    role: str
    groups: set[str] = field(default_factory=set)
    name: str = ""
    joined_at: int = 0

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")


class SessionManager:
    def __init__(self):
        self.sessions: dict[str, Session] = {}
        self.takeovers: dict[str, str] = {}       # callsign -> session id
        self.intents: dict[str, tuple[str, dict]] = {}  # callsign -> (session, payload)
        self._join_counter = 0

    def add(self, role: str, groups: set[str] | None, name: str = "") -> Session:
        self._join_counter += 1
        sid = f"s{self._join_counter:04d}"
        s = Session(id=sid, role=role, groups=set(groups or ()), name=name,
                    joined_at=self._join_counter)
        self.sessions[sid] = s
        return s

    def remove(self, sid: str) -> None:
        self.sessions.pop(sid, None)
        self.takeovers = {cs: s for cs, s in self.takeovers.items() if s != sid}
        self.intents = {cs: (s, p) for cs, (s, p) in self.intents.items() if s != sid}

    def controller_of(self, callsign: str, world) -> str | None:
        if callsign in self.takeovers:
            return self.takeovers[callsign]
        ac = world.aircraft.get(callsign)
        if ac is None:
            return None
        candidates = [
            s for s in self.sessions.values()
            if s.role == "agent" and ac.comms_group in s.groups
        ]
        if not candidates:
            return None
        return min(candidates, key=lambda s: s.joined_at).id

    def can_command(self, sid: str, callsign: str, world) -> tuple[bool, str]:
        s = self.sessions.get(sid)
        if s is None:
            return False, "unknown session"
        if s.role == "observer":
            return False, "observers cannot issue clearances"
        owner = self.controller_of(callsign, world)
        if owner != sid:
            if owner is not None and owner != sid:
                return False, "control lost"
            if s.role == "controller":
                return False, "take over the aircraft first"
            return False, "aircraft not under this session's control"
        return True, ""

    def takeover(self, sid: str, callsign: str, world) -> tuple[bool, str, str | None]:
        """Returns (ok, reason, previous owner session id)."""
        s = self.sessions.get(sid)
        if s is None:
            return False, "unknown session", None
        if s.role != "controller":
            return False, "only controller sessions may take over", None
        ac = world.aircraft.get(callsign)
        if ac is None:
            return False, f"unknown callsign {callsign}", None
        if ac.comms_group not in s.groups:
            return False, "aircraft not in this session's groups", None
        prev = self.controller_of(callsign, world)
        if prev == sid:
            return False, "already controlling", prev
        self.takeovers[callsign] = sid
        return True, "", prev

    def publish_intent(self, sid: str, callsign: str, payload: dict,
                       world, payload_bytes: int) -> tuple[bool, str]:
        if payload_bytes > MAX_INTENT_BYTES:
            return False, f"intent payload of {payload_bytes} bytes exceeds cap"
        owner = self.controller_of(callsign, world)
        if owner != sid:
            return False, "publisher does not control the aircraft"
        self.intents[callsign] = (sid, payload)
        return True, ""
