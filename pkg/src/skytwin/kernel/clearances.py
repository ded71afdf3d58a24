"""The eleven clearance types a controller can issue.

Attribute ranges are validated at construction; waypoint and group
references are resolved at issue time against the live world. Every variant
round-trips through a plain dict for the wire protocol and the event log.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import ClassVar


class ClearanceError(ValueError):
    pass


@dataclass(frozen=True)
class Clearance:
    kind: ClassVar[str] = ""

    def describe(self) -> str:
        parts = ", ".join(f"{f.name}={getattr(self, f.name)}" for f in fields(self))
        return f"{self.kind}({parts})"


def _check_fl(fl: float) -> None:
    if not (0.0 <= fl <= 600.0):
        raise ClearanceError(f"flight level {fl} outside [0, 600]")


@dataclass(frozen=True)
class DirectTo(Clearance):
    kind: ClassVar[str] = "direct_to"
    waypoint: str

    def __post_init__(self):
        if not self.waypoint:
            raise ClearanceError("direct_to requires a waypoint ident")


@dataclass(frozen=True)
class FlyHeading(Clearance):
    kind: ClassVar[str] = "fly_heading"
    heading: float

    def __post_init__(self):
        if not (0.0 <= self.heading < 360.0):
            raise ClearanceError(f"heading {self.heading} outside [0, 360)")


@dataclass(frozen=True)
class TurnBy(Clearance):
    kind: ClassVar[str] = "turn_by"
    direction: str
    degrees: float

    def __post_init__(self):
        if self.direction not in ("left", "right"):
            raise ClearanceError(f"turn direction {self.direction!r} must be left or right")
        if not (0.0 < self.degrees <= 360.0):
            raise ClearanceError(f"turn amount {self.degrees} outside (0, 360]")


@dataclass(frozen=True)
class MaintainPresentHeading(Clearance):
    kind: ClassVar[str] = "maintain_present_heading"


@dataclass(frozen=True)
class ClimbDescendNow(Clearance):
    kind: ClassVar[str] = "climb_descend_now"
    fl: float

    def __post_init__(self):
        _check_fl(self.fl)


@dataclass(frozen=True)
class DescendWhenReadyLevelBy(Clearance):
    kind: ClassVar[str] = "descend_when_ready_level_by"
    fl: float
    waypoint: str

    def __post_init__(self):
        _check_fl(self.fl)
        if not self.waypoint:
            raise ClearanceError("descend_when_ready_level_by requires a waypoint")


@dataclass(frozen=True)
class DescendNowLevelBy(Clearance):
    kind: ClassVar[str] = "descend_now_level_by"
    fl: float
    waypoint: str

    def __post_init__(self):
        _check_fl(self.fl)
        if not self.waypoint:
            raise ClearanceError("descend_now_level_by requires a waypoint")


@dataclass(frozen=True)
class ChangeCAS(Clearance):
    kind: ClassVar[str] = "change_cas"
    cas: float

    def __post_init__(self):
        if not (120.0 <= self.cas <= 370.0):
            raise ClearanceError(f"CAS {self.cas} outside [120, 370]")


@dataclass(frozen=True)
class ChangeMach(Clearance):
    kind: ClassVar[str] = "change_mach"
    mach: float

    def __post_init__(self):
        if not (0.3 < self.mach < 0.95):
            raise ClearanceError(f"Mach {self.mach} outside (0.3, 0.95)")


@dataclass(frozen=True)
class ChangeROCD(Clearance):
    kind: ClassVar[str] = "change_rocd"
    rocd: float   # magnitude, ft/min

    def __post_init__(self):
        if not (100.0 <= abs(self.rocd) <= 8000.0):
            raise ClearanceError(f"ROCD magnitude {abs(self.rocd)} outside [100, 8000]")


@dataclass(frozen=True)
class ContactFrequency(Clearance):
    kind: ClassVar[str] = "contact_frequency"
    group: str

    def __post_init__(self):
        if not self.group:
            raise ClearanceError("contact_frequency requires a group id")


ALL_CLEARANCE_TYPES: tuple[type[Clearance], ...] = (
    DirectTo, FlyHeading, TurnBy, MaintainPresentHeading, ClimbDescendNow,
    DescendWhenReadyLevelBy, DescendNowLevelBy, ChangeCAS, ChangeMach,
    ChangeROCD, ContactFrequency,
)

_BY_KIND = {cls.kind: cls for cls in ALL_CLEARANCE_TYPES}

LATERAL_KINDS = {"direct_to", "fly_heading", "turn_by", "maintain_present_heading"}
VERTICAL_KINDS = {"climb_descend_now", "descend_when_ready_level_by", "descend_now_level_by"}
SPEED_KINDS = {"change_cas", "change_mach", "change_rocd"}


def clearance_to_dict(c: Clearance) -> dict:
    d = {"kind": c.kind}
    for f in fields(c):
        d[f.name] = getattr(c, f.name)
    return d


def clearance_from_dict(d: dict) -> Clearance:
    kind = d.get("kind")
    cls = _BY_KIND.get(kind)
    if cls is None:
        raise ClearanceError(f"unknown clearance kind {kind!r}")
    args = {k: v for k, v in d.items() if k != "kind"}
    try:
        return cls(**args)
    except TypeError as e:
        raise ClearanceError(f"bad attributes for {kind}: {e}") from None
