"""Bundled domains: the rescue world and small toy models."""

from .rescue import (
    CARRIED,
    PREDICATES,
    RescueConfig,
    RescueDomain,
    RescueState,
    RewardKind,
    apply_action,
    burning_ratio,
    eval_rescue_atom,
    fire_step,
    generate_initial,
    inject_unexpected_event,
    legal_actions,
    rescue_program,
    reward_avoid_burning,
    reward_safe,
    safe_ratio,
    state_space_cardinality,
)
from .scenario import Scenario, load_scenario, rescue_config_from_settings, save_scenario
from .toy import ChainDomain, TabularMDP, two_state_mdp

__all__ = [
    "CARRIED",
    "PREDICATES",
    "ChainDomain",
    "RescueConfig",
    "RescueDomain",
    "RescueState",
    "RewardKind",
    "Scenario",
    "TabularMDP",
    "apply_action",
    "burning_ratio",
    "eval_rescue_atom",
    "fire_step",
    "generate_initial",
    "inject_unexpected_event",
    "legal_actions",
    "load_scenario",
    "rescue_config_from_settings",
    "rescue_program",
    "reward_avoid_burning",
    "reward_safe",
    "safe_ratio",
    "save_scenario",
    "state_space_cardinality",
    "two_state_mdp",
]
