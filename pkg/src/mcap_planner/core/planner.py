"""Online planning: search, act in an environment, observe and re-root."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Generic, Iterable, Optional, TypeVar

from ..language.program import Program
from ..language.terms import ActionTerm
from ..utils.logging import get_logger
from .domain import GenerativeDomain
from .random_source import RandomSource
from .search import SearchParams, best_action, expand, run_search
from .tree import StateNode

S = TypeVar("S")


class Environment(ABC, Generic[S]):
    """
    The world the planner acts in.

    The planner only sees the states returned by :meth:`current` and
    :meth:`step`; exogenous events live entirely on this side.
    """

    @abstractmethod
    def current(self) -> S:
        """The current observable state."""

    @abstractmethod
    def step(self, action: ActionTerm, rng: RandomSource) -> S:
        """Apply one agent action plus exogenous dynamics and return the observed state."""

    @property
    @abstractmethod
    def step_index(self) -> int:
        """Number of steps executed so far."""


@dataclass(frozen=True)
class StepHook(Generic[S]):
    """A state transformation fired after the listed step numbers (1-based)."""

    name: str
    steps: frozenset[int]
    apply: Callable[[S, RandomSource], S]


class SimulatedEnvironment(Environment[S]):
    """
    Environment backed by a generative domain plus optional step hooks.

    Features:
    - Each step samples the successor with the domain's simulator
    - Hooks fire after the configured steps, in registration order
    - Fired hooks are recorded for traces and tests
    """

    def __init__(
        self,
        domain: GenerativeDomain[S],
        initial_state: S,
        hooks: Iterable[StepHook[S]] = (),
    ) -> None:
        """
        Initialize the environment.

        Args:
            domain: Simulator of the true dynamics
            initial_state: State before the first step
            hooks: Events injected after given steps
        """
        self._domain = domain
        self._state = initial_state
        self._hooks = list(hooks)
        self._steps = 0
        self.fired: list[tuple[int, str]] = []

    def current(self) -> S:
        return self._state

    @property
    def step_index(self) -> int:
        return self._steps

    def step(self, action: ActionTerm, rng: RandomSource) -> S:
        state = self._domain.simulate(self._state, action, rng)
        self._steps += 1
        for hook in self._hooks:
            if self._steps in hook.steps:
                state = hook.apply(state, rng)
                self.fired.append((self._steps, hook.name))
        self._state = state
        return state


@dataclass
class StepOutcome:
    """What one online decision did."""

    action: ActionTerm
    tail: Program
    observed_state: Any
    root_reused: bool
    planned_value: float
    root_visits: int
    tree_size: int = field(default=0)


def online_mcap_step(
    root: StateNode,
    env: Environment[Any],
    params: SearchParams,
    planning_domain: GenerativeDomain[Any],
    rng: RandomSource,
    env_rng: Optional[RandomSource] = None,
) -> tuple[Optional[StateNode], Optional[StepOutcome]]:
    """
    Plan from the root, execute the best action and derive the next root.

    If the observed successor was already sampled under the executed action,
    that subtree becomes the next root with its statistics intact; otherwise a
    fresh root is expanded from the observed state and the action's tail.

    Args:
        root: Current search root (expanded)
        env: Environment that executes the action
        params: Search parameters
        planning_domain: Model used for search
        rng: Random stream for search
        env_rng: Random stream for the environment (defaults to rng)

    Returns:
        (next root, outcome), or (None, None) once the program has terminated
    """
    run_search(root, params, planning_domain, rng)
    chosen = best_action(root)
    if chosen is None:
        return None, None

    observed = env.step(chosen.action, env_rng if env_rng is not None else rng)
    known = chosen.find_child(planning_domain.state_digest(observed))
    if known is not None:
        next_root = known
    else:
        next_root = expand(observed, chosen.tail, planning_domain, params)

    outcome = StepOutcome(
        action=chosen.action,
        tail=chosen.tail,
        observed_state=observed,
        root_reused=known is not None,
        planned_value=chosen.meta.value,
        root_visits=root.meta.count,
        tree_size=root.size(),
    )
    return next_root, outcome


class OnlinePlanner:
    """
    Stateful wrapper around :func:`online_mcap_step` for one episode.

    Features:
    - Keeps the current root between decisions
    - Supports swapping the planning model, which discards the tree
    - Reports termination once no action is left
    """

    def __init__(
        self,
        program: Program,
        domain: GenerativeDomain[Any],
        params: SearchParams,
        rng: RandomSource,
    ) -> None:
        self._program = program
        self._domain = domain
        self._params = params
        self._rng = rng
        self._root: Optional[StateNode] = None
        self._root_program = program
        self._terminated = False
        self._logger = get_logger("OnlinePlanner")

    @property
    def domain(self) -> GenerativeDomain[Any]:
        return self._domain

    @property
    def terminated(self) -> bool:
        return self._terminated

    @property
    def root(self) -> Optional[StateNode]:
        return self._root

    def start(self, state: Any) -> None:
        self._root = expand(state, self._program, self._domain, self._params)
        self._root_program = self._program
        self._terminated = False

    def switch_domain(self, domain: GenerativeDomain[Any], state: Any) -> None:
        """
        Replace the planning model and restart search from ``state``.

        The pending tail program is kept; node values computed under the old
        model are dropped.
        """
        self._domain = domain
        if self._root is None or self._terminated:
            return
        self._root = expand(state, self._root_program, domain, self._params)
        self._logger.debug(f"planning model switched to {domain.name}")

    def decide(
        self, env: Environment[Any], env_rng: Optional[RandomSource] = None
    ) -> Optional[StepOutcome]:
        """Plan, act and re-root; returns None once the program has terminated."""
        if self._root is None:
            self.start(env.current())
        assert self._root is not None
        if self._terminated:
            return None
        next_root, outcome = online_mcap_step(
            self._root, env, self._params, self._domain, self._rng, env_rng
        )
        if next_root is None or outcome is None:
            self._terminated = True
            self._logger.debug(f"program terminated before step {env.step_index + 1}")
            return None
        self._root = next_root
        self._root_program = outcome.tail
        return outcome
