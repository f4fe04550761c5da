"""Interception-aware evaluation of ice-hockey passes from tracking and event data."""

__version__ = "0.1.0"

from .core import Config, PlayerState, Snapshot, Team, Triplet, load_config
from .ingestion import PassPlay, build_pass_plays, parse_events, parse_tracking
from .metrics import PlayEvaluation, evaluate_play, pass_surface

__all__ = [
    "Config", "PassPlay", "PlayEvaluation", "PlayerState", "Snapshot", "Team", "Triplet",
    "__version__", "build_pass_plays", "evaluate_play", "load_config", "parse_events",
    "parse_tracking", "pass_surface",
]
