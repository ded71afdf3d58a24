"""Inter-sector coordinations: agreed transfer levels, points, and times."""

from __future__ import annotations

from dataclasses import dataclass

from ..geo import great_circle_nm

FL_TOLERANCE = 3.0      # flight levels
POINT_TOLERANCE_NM = 5.0


@dataclass
class Coordination:
    callsign: str
    from_group: str
    to_group: str
    transfer_fl: float
    transfer_point: tuple[float, float] | None = None   # (lat, lon) when agreed
    estimate: float | None = None                        # sim time
    status: str = "standing"    # standing | tactical | satisfied | violated

    def __post_init__(self):
        if self.from_group == self.to_group:
            raise ValueError("coordination needs distinct groups")

    def active(self) -> bool:
        return self.status in ("standing", "tactical")


def check_coordination(coord: Coordination, fl: float, lat: float, lon: float,
                       fl_tol: float = FL_TOLERANCE,
                       point_tol_nm: float = POINT_TOLERANCE_NM) -> dict:
    """Evaluate a coordination at the boundary crossing; mutates status and
    returns the metric payload."""
    fl_dev = abs(fl - coord.transfer_fl)
    dist = None
    ok = fl_dev <= fl_tol
    if coord.transfer_point is not None:
        dist = great_circle_nm(lat, lon, coord.transfer_point[0], coord.transfer_point[1])
        ok = ok and dist <= point_tol_nm
    coord.status = "satisfied" if ok else "violated"
    return {
        "callsign": coord.callsign,
        "from_group": coord.from_group,
        "to_group": coord.to_group,
        "status": coord.status,
        "fl_deviation": fl_dev,
        "point_distance_nm": dist,
    }
