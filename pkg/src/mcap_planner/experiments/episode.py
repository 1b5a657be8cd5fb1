"""One online planning episode in the rescue world."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core.planner import OnlinePlanner, SimulatedEnvironment, StepHook
from ..core.random_source import RandomSource, derive_seed
from ..domains.rescue import (
    RescueDomain,
    RescueState,
    burning_ratio,
    generate_initial,
    inject_unexpected_event,
    safe_ratio,
)
from ..language.program import Program
from ..language.terms import ActionTerm
from ..utils.logging import get_logger
from .config import ExperimentConfig, Variant

NOOP = ActionTerm("noop")

ENV_STREAM = 0
PLANNER_STREAM = 1
INITIAL_STREAM = 2


@dataclass(frozen=True)
class EpisodeStreams:
    """The independent random streams of one episode."""

    env: RandomSource
    planner: RandomSource
    initial: RandomSource

    @classmethod
    def from_seed(cls, seed: int) -> EpisodeStreams:
        return cls(
            env=RandomSource(derive_seed(seed, ENV_STREAM)),
            planner=RandomSource(derive_seed(seed, PLANNER_STREAM)),
            initial=RandomSource(derive_seed(seed, INITIAL_STREAM)),
        )


def episode_seed(master_seed: int, index: int) -> int:
    """Seed of episode ``index``; shared by every policy for paired comparisons."""
    return derive_seed(master_seed, index)


def initial_state(cfg: ExperimentConfig, seed: int) -> RescueState:
    return generate_initial(cfg.rescue, EpisodeStreams.from_seed(seed).initial)


@dataclass(frozen=True)
class StepRecord:
    """
    Metrics of the state observed after step ``step`` (1-based).

    ``reward`` is the planning reward of that state; ``terminated`` marks
    steps filled with noop after the program ran out of actions.
    """

    step: int
    action: str
    reward: float
    safe_ratio: float
    burning_ratio: float
    root_reused: bool
    terminated: bool = False
    model_switched: bool = False


@dataclass
class EpisodeTrace:
    """Per-step records of one episode."""

    seed: int
    label: str
    records: list[StepRecord] = field(default_factory=list)
    events: list[tuple[int, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def steps(self) -> list[int]:
        return [r.step for r in self.records]

    def safe_ratios(self) -> np.ndarray:
        return np.array([r.safe_ratio for r in self.records], dtype=np.float64)

    def burning_ratios(self) -> np.ndarray:
        return np.array([r.burning_ratio for r in self.records], dtype=np.float64)

    @property
    def terminated_at(self) -> Optional[int]:
        for record in self.records:
            if record.terminated:
                return record.step
        return None


def run_episode(
    cfg: ExperimentConfig, seed: int, program: Optional[Program] = None
) -> EpisodeTrace:
    """
    Run the closed planning loop for ``cfg.horizon`` steps.

    The environment and the planning model share the simulator; events are
    injected on the environment side only, and the goal-change variant swaps
    the planner's reward (discarding its tree) at the switch step. Once the
    program terminates, the remaining steps execute noop.

    Args:
        cfg: Experiment configuration
        seed: Episode seed (see :func:`episode_seed`)
        program: Program to plan with (defaults to the policy's program)

    Returns:
        The episode trace
    """
    log = get_logger("Episode")
    streams = EpisodeStreams.from_seed(seed)
    world = RescueDomain(cfg.rescue)
    start = generate_initial(cfg.rescue, streams.initial)

    hooks: list[StepHook[RescueState]] = []
    if cfg.variant is Variant.EVENTS:
        hooks.append(
            StepHook(
                name="unexpected-event",
                steps=frozenset(cfg.event_steps),
                apply=lambda s, rng: inject_unexpected_event(s, cfg.rescue, rng),
            )
        )
    env = SimulatedEnvironment(world, start, hooks)

    reward_kind = cfg.planning_reward(0)
    planner = OnlinePlanner(
        program if program is not None else cfg.program(),
        world.with_reward(reward_kind),
        cfg.search,
        streams.planner,
    )
    planner.start(start)
    trace = EpisodeTrace(seed=seed, label=cfg.label())

    for time in range(cfg.horizon):
        switched = False
        wanted = cfg.planning_reward(time)
        if wanted is not reward_kind:
            planner.switch_domain(world.with_reward(wanted), env.current())
            reward_kind, switched = wanted, True

        outcome = planner.decide(env, streams.env)
        if outcome is None:
            observed = env.step(NOOP, streams.env)
            action, reused, terminated = str(NOOP), False, True
        else:
            observed = outcome.observed_state
            action, reused, terminated = str(outcome.action), outcome.root_reused, False

        trace.records.append(
            StepRecord(
                step=time + 1,
                action=action,
                reward=planner.domain.reward(observed),
                safe_ratio=safe_ratio(observed),
                burning_ratio=burning_ratio(observed),
                root_reused=reused,
                terminated=terminated,
                model_switched=switched,
            )
        )

    trace.events = list(env.fired)
    last = trace.records[-1]
    log.debug(
        f"{trace.label} seed={seed}: safe={last.safe_ratio:.2f} "
        f"burning={last.burning_ratio:.2f} events={len(trace.events)}"
    )
    return trace
