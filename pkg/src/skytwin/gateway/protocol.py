"""Wire protocol: length-delimited JSON text records.

Frame: the payload's byte length in ASCII decimal, a single newline, then
exactly that many bytes of UTF-8 JSON. Every message is an object carrying
{v, session, seq, type, payload}; seq increases monotonically per sender.
The full catalogue lives in docs/protocol.md.
"""

from __future__ import annotations

import json

PROTOCOL_VERSION = 1
MAX_FRAME_BYTES = 8 * 1024 * 1024
MAX_INTENT_BYTES = 64 * 1024

CLIENT_TYPES = {
    "hello", "reset", "step", "action", "takeover", "intent", "wind",
    "log-request", "bye",
}
SERVER_TYPES = {
    "hello-ack", "reset-ok", "step-result", "action-ack", "takeover-result",
    "intent-ack", "wind-result", "snapshot", "metric-event", "control-lost",
    "log-data", "error",
}


class ProtocolError(ValueError):
    pass


def make_msg(session: str, seq: int, mtype: str, payload: dict) -> dict:
    return {"v": PROTOCOL_VERSION, "session": session, "seq": seq,
            "type": mtype, "payload": payload}


def encode_message(msg: dict) -> bytes:
    payload = json.dumps(msg, sort_keys=True, separators=(",", ":")).encode()
    if len(payload) > MAX_FRAME_BYTES:
        raise ProtocolError(f"frame of {len(payload)} bytes exceeds cap")
    return str(len(payload)).encode() + b"\n" + payload


class FrameDecoder:
    """Incremental decoder for the length-prefixed frame stream."""

    def __init__(self):
        self._buf = b""

    def feed(self, data: bytes) -> list[dict]:
        self._buf += data
        out = []
        while True:
            nl = self._buf.find(b"\n")
            if nl < 0:
                if len(self._buf) > 32:
                    raise ProtocolError("frame header too long")
                break
            head = self._buf[:nl]
            try:
                length = int(head.decode("ascii"))
            except ValueError:
                raise ProtocolError(f"bad frame header {head!r}") from None
            if not (0 <= length <= MAX_FRAME_BYTES):
                raise ProtocolError(f"frame length {length} out of range")
            if len(self._buf) < nl + 1 + length:
                break
            payload = self._buf[nl + 1:nl + 1 + length]
            self._buf = self._buf[nl + 1 + length:]
            try:
                out.append(json.loads(payload.decode()))
            except (UnicodeDecodeError, json.JSONDecodeError) as e:
                raise ProtocolError(f"bad frame payload: {e}") from None
        return out


async def read_messages(reader, decoder: FrameDecoder):
    """Async generator of decoded messages from a stream reader."""
    while True:
        data = await reader.read(65536)
        if not data:
            return
        for msg in decoder.feed(data):
            yield msg


def validate_envelope(msg: dict) -> str:
    """Returns an error string for malformed envelopes, empty when fine."""
    if not isinstance(msg, dict):
        return "message must be an object"
    for key in ("v", "session", "seq", "type", "payload"):
        if key not in msg:
            return f"missing envelope field {key!r}"
    if msg["v"] != PROTOCOL_VERSION:
        return f"protocol version {msg['v']} unsupported"
    if msg["type"] not in CLIENT_TYPES | SERVER_TYPES:
        return f"unknown message type {msg['type']!r}"
    if not isinstance(msg["payload"], dict):
        return "payload must be an object"
    return ""
