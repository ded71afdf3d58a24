"""Scenario files, recorded-track ingestion, and seeded scenario generation."""

from .tracks import RecordedTrack, TrackRow, import_tracks
from .files import ScenarioError, ScenarioSpec, load_scenario, save_scenario, world_from_spec
from .generate import GenerationError, generate_scenario

__all__ = [
    "RecordedTrack", "TrackRow", "import_tracks",
    "ScenarioError", "ScenarioSpec", "load_scenario", "save_scenario", "world_from_spec",
    "GenerationError", "generate_scenario",
]
