"""Simulation kernel: aircraft lifecycle, pilot-intent mediation, hybrid
replay/simulation, coordinations, the fast-time tick loop, and the replayable
event log."""

from .clearances import (
    ChangeCAS,
    ChangeMach,
    ChangeROCD,
    Clearance,
    ClearanceError,
    ClimbDescendNow,
    ContactFrequency,
    DescendNowLevelBy,
    DescendWhenReadyLevelBy,
    DirectTo,
    FlyHeading,
    MaintainPresentHeading,
    TurnBy,
    clearance_from_dict,
    clearance_to_dict,
)
from .aircraft import AircraftState, Intent, LateralIntent, VerticalIntent
from .coordination import Coordination
from .events import EventLog, load_event_log, save_event_log
from .world import LatencyModel, World
from .descent import ConstraintUnachievable, compute_top_of_descent

__all__ = [
    "Clearance", "ClearanceError", "DirectTo", "FlyHeading", "TurnBy",
    "MaintainPresentHeading", "ClimbDescendNow", "DescendWhenReadyLevelBy",
    "DescendNowLevelBy", "ChangeCAS", "ChangeMach", "ChangeROCD",
    "ContactFrequency", "clearance_from_dict", "clearance_to_dict",
    "AircraftState", "Intent", "LateralIntent", "VerticalIntent",
    "Coordination", "EventLog", "save_event_log", "load_event_log",
    "World", "LatencyModel", "compute_top_of_descent", "ConstraintUnachievable",
]
