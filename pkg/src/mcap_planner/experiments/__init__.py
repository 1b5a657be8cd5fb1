"""Episode runner, experiment configuration and statistics."""

from .config import ExperimentConfig, Policy, Variant
from .episode import (
    EpisodeStreams,
    EpisodeTrace,
    StepRecord,
    episode_seed,
    initial_state,
    run_episode,
)
from .stats import StatRow, StatTable, aggregate, read_results, t_half_widths, write_results

__all__ = [
    "EpisodeStreams",
    "EpisodeTrace",
    "ExperimentConfig",
    "Policy",
    "StatRow",
    "StatTable",
    "StepRecord",
    "Variant",
    "aggregate",
    "episode_seed",
    "initial_state",
    "read_results",
    "run_episode",
    "t_half_widths",
    "write_results",
]
