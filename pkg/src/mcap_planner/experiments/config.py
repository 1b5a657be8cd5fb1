"""Experiment configuration: which world, which policy, how many episodes."""

from __future__ import annotations

from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.search import SearchParams
from ..domains.rescue import RescueConfig, RewardKind, rescue_program
from ..domains.scenario import rescue_config_from_settings
from ..language.program import Program, universal_program
from ..utils.config import Settings


class Variant(str, Enum):
    """The three experiment set-ups."""

    BASE = "base"
    EVENTS = "events"
    GOAL_CHANGE = "goal-change"


class Policy(str, Enum):
    """Program driving the search: the rescue strategy or plain MCTS over all actions."""

    MCAP = "mcap"
    MCTS = "mcts"

    def program(self) -> Program:
        return rescue_program() if self is Policy.MCAP else universal_program()


class ExperimentConfig(BaseModel):
    """
    One experiment cell: a variant and a policy with all parameters.

    ``ci`` is the total width of the confidence interval that every step's
    mean must reach, so each half-width has to be at most ``ci / 2``.
    Episodes run until that holds (after at least ``min_episodes``) or
    ``episodes`` is reached.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    variant: Variant = Variant.BASE
    policy: Policy = Policy.MCAP
    rescue: RescueConfig = Field(default_factory=RescueConfig)
    search: SearchParams = Field(default_factory=SearchParams)
    horizon: int = Field(default=50, ge=1)
    episodes: int = Field(default=100, ge=2)
    min_episodes: int = Field(default=10, ge=2)
    ci: float = Field(default=0.1, gt=0.0)
    confidence: float = Field(default=0.95, gt=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0)
    event_steps: tuple[int, ...] = (20, 40)
    reward_switch_step: int = Field(default=25, ge=0)
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_episode_bounds(self) -> ExperimentConfig:
        if self.min_episodes > self.episodes:
            raise ValueError(
                f"min_episodes ({self.min_episodes}) exceeds episodes ({self.episodes})"
            )
        return self

    @property
    def half_width_target(self) -> float:
        return self.ci / 2.0

    def program(self) -> Program:
        return self.policy.program()

    def planning_reward(self, time: int) -> RewardKind:
        """
        Reward the planner optimizes for the decision taken at ``time``.

        In the goal-change variant the planner avoids fire only, until the
        switch step, and rescues from then on.
        """
        if self.variant is Variant.GOAL_CHANGE and time < self.reward_switch_step:
            return RewardKind.AVOID_BURNING
        return RewardKind.SAFE

    @classmethod
    def from_settings(cls, settings: Settings, **overrides: Any) -> ExperimentConfig:
        """Build a configuration from application settings plus explicit overrides."""
        search = settings.search
        experiment = settings.experiment
        values: dict[str, Any] = {
            "rescue": rescue_config_from_settings(settings.rescue),
            "search": SearchParams(**search.model_dump()),
            "horizon": experiment.horizon,
            "episodes": experiment.episodes,
            "min_episodes": experiment.min_episodes,
            "ci": experiment.ci,
            "confidence": experiment.confidence,
            "seed": experiment.seed,
            "event_steps": tuple(experiment.event_steps),
            "reward_switch_step": experiment.reward_switch_step,
            "workers": experiment.workers,
        }
        values.update(overrides)
        return cls(**values)

    def label(self) -> str:
        return f"{self.variant.value}/{self.policy.value}"
