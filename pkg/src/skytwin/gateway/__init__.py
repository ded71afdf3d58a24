"""Process and network boundary: gym-style stepping, concurrent sessions,
observation filtering, the wire protocol, and the CLI."""

from .protocol import PROTOCOL_VERSION, FrameDecoder, encode_message, make_msg
from .env import TwinEnv, build_observation
from .sessions import Session, SessionManager
from .server import GatewayServer

__all__ = [
    "PROTOCOL_VERSION", "FrameDecoder", "encode_message", "make_msg",
    "TwinEnv", "build_observation", "Session", "SessionManager", "GatewayServer",
]
