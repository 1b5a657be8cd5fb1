"""Search engine, domain interface and online planner."""

from .domain import ConformanceReport, GenerativeDomain, RewardOverride, conformance_check
from .planner import (
    Environment,
    OnlinePlanner,
    SimulatedEnvironment,
    StepHook,
    StepOutcome,
    online_mcap_step,
)
from .random_source import RandomSource, derive_seed
from .search import (
    SearchParams,
    best_action,
    expand,
    mcap_iteration,
    recompute_values,
    rollout,
    run_search,
    ucb1_score,
    ucb1_select,
    update_action,
    update_state,
)
from .tree import ActionNode, Metadata, StateNode

__all__ = [
    "ActionNode",
    "ConformanceReport",
    "Environment",
    "GenerativeDomain",
    "Metadata",
    "OnlinePlanner",
    "RandomSource",
    "RewardOverride",
    "SearchParams",
    "SimulatedEnvironment",
    "StateNode",
    "StepHook",
    "StepOutcome",
    "best_action",
    "conformance_check",
    "derive_seed",
    "expand",
    "mcap_iteration",
    "online_mcap_step",
    "recompute_values",
    "rollout",
    "run_search",
    "ucb1_score",
    "ucb1_select",
    "update_action",
    "update_state",
]
