"""Re-run a logged scenario from its action stream.

The event log carries every externally injected event (clearance attempts,
takeovers, intent publications) with its issue time; everything else is a
pure function of the scenario and seeds, so re-running reproduces the log
byte for byte.
"""

from __future__ import annotations

from ..kernel.clearances import clearance_from_dict
from ..kernel.events import EventLog
from ..scenario.files import ScenarioSpec, world_from_spec

REPLAYED_KINDS = ("clearance", "clearance-rejected", "takeover", "intent-published")


def rerun_from_log(spec: ScenarioSpec, logged: EventLog, models=None):
    """Rebuild the world and re-inject the logged action stream."""
    world = world_from_spec(spec, models=models)
    stream = [r for r in logged.records if r["kind"] in REPLAYED_KINDS]
    idx = 0
    while True:
        while idx < len(stream) and stream[idx]["t"] <= world.sim_time + 1e-9:
            rec = stream[idx]
            idx += 1
            if rec["kind"] in ("clearance", "clearance-rejected"):
                world.issue_clearance(rec["callsign"],
                                      clearance_from_dict(rec["clearance"]),
                                      issuer=rec.get("issuer", ""))
            else:
                payload = {k: v for k, v in rec.items()
                           if k not in ("t", "seq", "kind")}
                world.log.append(rec["t"], rec["kind"], **payload)
        if world.done():
            break
        world.tick()
    if any(r["kind"] == "metrics-report" for r in logged.records):
        world.finalize()
    return world
