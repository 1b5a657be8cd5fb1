"""
The rescue world: a robot on a position graph saving victims from spreading fires.

Positions are numbered 0..n-1 and named ``p<i>`` in actions and queries;
victims are named ``v<i>``. Three positions (by default) are safe: they never
burn, and a victim dropped there counts as rescued.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Optional, Sequence

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.domain import GenerativeDomain
from ..core.random_source import RandomSource
from ..errors import IllegalActionError, InfeasibleConfigError, UnknownPredicateError
from ..language.program import ANY, Choice, Cond, Loop, NegCond, Program, act
from ..language.semantics import match_rows
from ..language.terms import TRUE_QUERY, ActionTerm, Literal, Substitution, Term, atom, query

CARRIED = -1
"""Victim location marker for a victim the robot is carrying."""

SAFE_VICTIM_REWARD = 1.0
NOT_BURNING_REWARD = 0.1


class RescueConfig(BaseModel):
    """
    Parameters of the rescue world and its fire model.

    Placement feasibility (enough unsafe positions for victims and fires, at
    least one safe position for the robot) is checked when an initial state is
    generated, so that small configurations remain usable for counting.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    positions: int = Field(default=20, ge=1)
    connectivity: float = Field(default=0.30, ge=0.0, le=1.0)
    safe_count: int = Field(default=3, ge=0)
    victims: int = Field(default=10, ge=0)
    fires: int = Field(default=10, ge=0)
    capacity: int = Field(default=2, ge=0)
    p_action_fail: float = Field(default=0.05, ge=0.0, le=1.0)
    p_spontaneous_ignite: float = Field(default=0.01, ge=0.0, le=1.0)
    p_spread_factor: float = Field(default=0.30, ge=0.0, le=1.0)
    p_cease: float = Field(default=0.05, ge=0.0, le=1.0)
    extinguish_own_position: bool = False
    event_min_fires: int = Field(default=10, ge=0)

    @model_validator(mode="after")
    def _check_safe_count(self) -> RescueConfig:
        if self.safe_count >= self.positions:
            raise ValueError(
                f"safe_count ({self.safe_count}) must be smaller than positions ({self.positions})"
            )
        return self

    @property
    def unsafe_count(self) -> int:
        return self.positions - self.safe_count


class RewardKind(str, Enum):
    """Which reward the domain reports."""

    SAFE = "safe"
    AVOID_BURNING = "avoid_burning"


def position_name(index: int) -> str:
    return f"p{index}"


def victim_name(index: int) -> str:
    return f"v{index}"


def _index_of(term: Term, prefix: str, bound: int) -> Optional[int]:
    if not isinstance(term, str) or not term.startswith(prefix) or not term[1:].isdigit():
        return None
    index = int(term[1:])
    return index if index < bound else None


@dataclass(frozen=True)
class RescueState:
    """
    Immutable snapshot of the world.

    ``victims[i]`` is the position of victim i, or CARRIED while the robot holds
    it; a carried victim is effectively at the robot's position.
    """

    adjacency: tuple[tuple[int, ...], ...]
    safe: tuple[bool, ...]
    burning: tuple[bool, ...]
    victims: tuple[int, ...]
    robot: int

    @property
    def positions(self) -> int:
        return len(self.safe)

    @property
    def carried(self) -> tuple[int, ...]:
        return tuple(i for i, loc in enumerate(self.victims) if loc == CARRIED)

    def effective_position(self, victim: int) -> int:
        location = self.victims[victim]
        return self.robot if location == CARRIED else location

    def victims_at(self, position: int) -> tuple[int, ...]:
        """Victims lying on the ground at a position."""
        return tuple(i for i, loc in enumerate(self.victims) if loc == position)

    @property
    def burning_count(self) -> int:
        return sum(self.burning)

    def digest(self) -> tuple[int, tuple[int, ...], tuple[bool, ...]]:
        # The graph and safe flags never change within an episode.
        return (self.robot, self.victims, self.burning)


# Graph and initial state


def generate_graph(positions: int, connectivity: float, rng: RandomSource) -> nx.Graph:
    """
    Sample a G(n, p) graph and join its components into one.

    Components are ordered by smallest node; each one is linked by a single
    edge between a random node of it and a random node already connected.
    """
    graph = nx.gnp_random_graph(positions, connectivity, seed=rng.integers(0, 2**31 - 1))
    components = sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])
    connected = list(components[0])
    for component in components[1:]:
        graph.add_edge(rng.choice(connected), rng.choice(component))
        connected.extend(component)
    return graph


def adjacency_of(graph: nx.Graph) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(sorted(graph.neighbors(u))) for u in sorted(graph.nodes))


def generate_initial(cfg: RescueConfig, rng: RandomSource) -> RescueState:
    """
    Sample a random initial world.

    Safe positions are drawn first, victims and fires are then placed on
    distinct unsafe positions (independently of each other) and the robot
    starts on a random safe position carrying nothing.

    Raises:
        InfeasibleConfigError: if victims or fires do not fit on the unsafe
            positions, or there is no safe position for the robot
    """
    if cfg.safe_count < 1:
        raise InfeasibleConfigError("the robot needs at least one safe start position")
    if cfg.victims > cfg.unsafe_count or cfg.fires > cfg.unsafe_count:
        raise InfeasibleConfigError(
            f"{cfg.unsafe_count} unsafe positions cannot hold {cfg.victims} victims "
            f"and {cfg.fires} fires"
        )

    graph = generate_graph(cfg.positions, cfg.connectivity, rng)
    all_positions = list(range(cfg.positions))
    safe_positions = sorted(rng.sample(all_positions, cfg.safe_count))
    safe_set = set(safe_positions)
    unsafe = [p for p in all_positions if p not in safe_set]

    victim_positions = rng.sample(unsafe, cfg.victims)
    fire_positions = set(rng.sample(unsafe, cfg.fires))

    return RescueState(
        adjacency=adjacency_of(graph),
        safe=tuple(p in safe_set for p in all_positions),
        burning=tuple(p in fire_positions for p in all_positions),
        victims=tuple(victim_positions),
        robot=rng.choice(safe_positions),
    )


# Actions and dynamics


def legal_actions(s: RescueState, cfg: RescueConfig) -> list[ActionTerm]:
    """Every action the robot may take in s, sorted by the term order."""
    actions: list[ActionTerm] = [ActionTerm("noop")]
    for p in s.adjacency[s.robot]:
        if s.burning[p]:
            actions.append(ActionTerm("extinguish", (position_name(p),)))
        else:
            actions.append(ActionTerm("move", (position_name(p),)))
    if cfg.extinguish_own_position and s.burning[s.robot]:
        actions.append(ActionTerm("extinguish", (position_name(s.robot),)))
    if len(s.carried) < cfg.capacity:
        actions.extend(ActionTerm("lift", (victim_name(v),)) for v in s.victims_at(s.robot))
    actions.extend(ActionTerm("drop", (victim_name(v),)) for v in s.carried)
    return sorted(set(actions), key=ActionTerm.sort_key)


def _is_legal(s: RescueState, a: ActionTerm, cfg: RescueConfig) -> bool:
    n = s.positions
    if a.name == "noop":
        return not a.args
    if len(a.args) != 1:
        return False
    if a.name in ("move", "extinguish"):
        target = _index_of(a.args[0], "p", n)
        if target is None:
            return False
        neighbor = target in s.adjacency[s.robot]
        if a.name == "move":
            return neighbor and not s.burning[target]
        own = cfg.extinguish_own_position and target == s.robot
        return (neighbor or own) and s.burning[target]
    victim = _index_of(a.args[0], "v", len(s.victims))
    if victim is None:
        return False
    if a.name == "lift":
        return s.victims[victim] == s.robot and len(s.carried) < cfg.capacity
    if a.name == "drop":
        return s.victims[victim] == CARRIED
    return False


def _effect(s: RescueState, a: ActionTerm) -> RescueState:
    if a.name == "noop":
        return s
    index = int(str(a.args[0])[1:])
    if a.name == "move":
        return replace(s, robot=index)
    if a.name == "extinguish":
        burning = list(s.burning)
        burning[index] = False
        return replace(s, burning=tuple(burning))
    victims = list(s.victims)
    victims[index] = CARRIED if a.name == "lift" else s.robot
    return replace(s, victims=tuple(victims))


def apply_action(
    s: RescueState, a: ActionTerm, cfg: RescueConfig, rng: RandomSource
) -> RescueState:
    """
    Execute one robot action, then advance the fire model once.

    The action fails (has no effect) with probability ``p_action_fail``; the
    fire step happens either way.

    Raises:
        IllegalActionError: if a is not legal in s
    """
    if not _is_legal(s, a, cfg):
        raise IllegalActionError(f"{a} is not legal with the robot at {position_name(s.robot)}")
    failed = rng.random() < cfg.p_action_fail
    after = s if failed else _effect(s, a)
    return fire_step(after, cfg, rng)


@dataclass(frozen=True)
class _GraphArrays:
    matrix: np.ndarray
    degree: np.ndarray


@lru_cache(maxsize=64)
def _graph_arrays(adjacency: tuple[tuple[int, ...], ...]) -> _GraphArrays:
    n = len(adjacency)
    matrix = np.zeros((n, n), dtype=np.float64)
    for u, neighbors in enumerate(adjacency):
        matrix[u, list(neighbors)] = 1.0
    return _GraphArrays(matrix=matrix, degree=np.maximum(1.0, matrix.sum(axis=1)))


def ignition_probabilities(s: RescueState, cfg: RescueConfig) -> np.ndarray:
    """
    Per-position ignition probability for the next fire step.

    ``min(1, spontaneous + spread · burning neighbours / max(1, degree))`` for
    unsafe positions not yet burning, 0 elsewhere.
    """
    arrays = _graph_arrays(s.adjacency)
    burning = np.asarray(s.burning, dtype=np.float64)
    fraction = (arrays.matrix @ burning) / arrays.degree
    probability = np.minimum(1.0, cfg.p_spontaneous_ignite + cfg.p_spread_factor * fraction)
    blocked = np.asarray(s.safe, dtype=bool) | np.asarray(s.burning, dtype=bool)
    return np.where(blocked, 0.0, probability)


def fire_step(s: RescueState, cfg: RescueConfig, rng: RandomSource) -> RescueState:
    """
    Advance every fire flag once, from the flags before the step.

    One uniform draw per position decides ignition (unsafe, not burning) or
    extinction (burning, probability ``p_cease``). Safe positions never burn.
    """
    draws = rng.random_array(s.positions)
    burning = np.asarray(s.burning, dtype=bool)
    ignite = draws < ignition_probabilities(s, cfg)
    keep = burning & ~(draws < cfg.p_cease)
    updated = (ignite | keep) & ~np.asarray(s.safe, dtype=bool)
    return replace(s, burning=tuple(bool(flag) for flag in updated))


def inject_unexpected_event(s: RescueState, cfg: RescueConfig, rng: RandomSource) -> RescueState:
    """
    Drop every carried victim and start fires until enough are burning.

    Carried victims land on the robot's position. New fires are placed on
    uniformly chosen unsafe positions that are not burning, until at least
    ``event_min_fires`` positions burn (or no candidate is left).
    """
    victims = tuple(s.robot if loc == CARRIED else loc for loc in s.victims)
    candidates = [p for p in range(s.positions) if not s.safe[p] and not s.burning[p]]
    missing = max(0, cfg.event_min_fires - s.burning_count)
    ignited = set(rng.sample(candidates, min(missing, len(candidates))))
    burning = tuple(flag or p in ignited for p, flag in enumerate(s.burning))
    return replace(s, victims=victims, burning=burning)


# Rewards and metrics


def _safe_victims(s: RescueState) -> int:
    return sum(1 for loc in s.victims if loc != CARRIED and s.safe[loc])


def _victims_not_burning(s: RescueState) -> int:
    return sum(1 for v in range(len(s.victims)) if not s.burning[s.effective_position(v)])


def reward_safe(s: RescueState) -> float:
    """1.0 per victim on the ground at a safe position plus 0.1 per victim not burning."""
    return _safe_victims(s) * SAFE_VICTIM_REWARD + _victims_not_burning(s) * NOT_BURNING_REWARD


def reward_avoid_burning(s: RescueState) -> float:
    """0.1 per victim not burning; safety earns nothing extra."""
    return _victims_not_burning(s) * NOT_BURNING_REWARD


def safe_ratio(s: RescueState) -> float:
    """Fraction of victims on the ground at a safe position."""
    return _safe_victims(s) / len(s.victims) if s.victims else 0.0


def burning_ratio(s: RescueState) -> float:
    """Fraction of victims whose effective position is burning."""
    if not s.victims:
        return 0.0
    return (len(s.victims) - _victims_not_burning(s)) / len(s.victims)


# Queries

Rows = Iterable[tuple[Term, ...]]


@dataclass(frozen=True)
class Predicate:
    """A query predicate: its arity, a description and the relation it denotes."""

    name: str
    arity: int
    description: str
    rows: Callable[[RescueState, RescueConfig], Rows]


def _holds(test: Callable[[RescueState, RescueConfig], bool]) -> Callable[..., Rows]:
    return lambda s, cfg: [()] if test(s, cfg) else []


def _at_safe(s: RescueState, cfg: RescueConfig) -> bool:
    return s.safe[s.robot]


def _has_capacity(s: RescueState, cfg: RescueConfig) -> bool:
    return len(s.carried) < cfg.capacity


def _victims_here(s: RescueState) -> list[tuple[Term, ...]]:
    return [(victim_name(v),) for v in s.victims_at(s.robot)]


PREDICATES: dict[str, Predicate] = {
    p.name: p
    for p in (
        Predicate("true", 0, "always holds", _holds(lambda s, cfg: True)),
        Predicate("at_safe", 0, "the robot is on a safe position", _holds(_at_safe)),
        Predicate(
            "not_at_safe",
            0,
            "the robot is on an unsafe position",
            _holds(lambda s, cfg: not _at_safe(s, cfg)),
        ),
        Predicate(
            "carrying",
            1,
            "V is carried by the robot",
            lambda s, cfg: [(victim_name(v),) for v in s.carried],
        ),
        Predicate(
            "victim_here",
            1,
            "V lies on the ground at the robot's position",
            lambda s, cfg: _victims_here(s),
        ),
        Predicate(
            "burning_here",
            0,
            "the robot's position is burning",
            _holds(lambda s, cfg: s.burning[s.robot]),
        ),
        Predicate("has_capacity", 0, "the robot can lift another victim", _holds(_has_capacity)),
        Predicate(
            "at_safe_and_carrying",
            0,
            "the robot is on a safe position and carries a victim",
            _holds(lambda s, cfg: _at_safe(s, cfg) and bool(s.carried)),
        ),
        Predicate(
            "not_at_safe_and_victim_here",
            0,
            "the robot is on an unsafe position with a victim on the ground",
            _holds(lambda s, cfg: not _at_safe(s, cfg) and bool(s.victims_at(s.robot))),
        ),
        Predicate(
            "burning",
            1,
            "position P is burning",
            lambda s, cfg: [(position_name(p),) for p, f in enumerate(s.burning) if f],
        ),
        Predicate(
            "safe",
            1,
            "position P is safe",
            lambda s, cfg: [(position_name(p),) for p, f in enumerate(s.safe) if f],
        ),
        Predicate(
            "adjacent",
            1,
            "position P neighbours the robot's position",
            lambda s, cfg: [(position_name(p),) for p in s.adjacency[s.robot]],
        ),
        Predicate(
            "victim_at",
            2,
            "victim V lies on the ground at position P",
            lambda s, cfg: [
                (victim_name(v), position_name(loc))
                for v, loc in enumerate(s.victims)
                if loc != CARRIED
            ],
        ),
        Predicate(
            "robot_at",
            1,
            "the robot is at position P",
            lambda s, cfg: [(position_name(s.robot),)],
        ),
    )
}


def eval_rescue_atom(lit: Literal, s: RescueState, cfg: RescueConfig) -> frozenset[Substitution]:
    """
    Substitutions under which a positive atom holds in s.

    Raises:
        UnknownPredicateError: for names outside the vocabulary or a wrong arity
    """
    predicate = PREDICATES.get(lit.name)
    if predicate is None:
        raise UnknownPredicateError(f"unknown predicate {lit.name!r}")
    if predicate.arity != len(lit.args):
        raise UnknownPredicateError(
            f"predicate {lit.name!r} takes {predicate.arity} arguments, got {len(lit.args)}"
        )
    return match_rows(lit, predicate.rows(s, cfg))


class RescueDomain(GenerativeDomain[RescueState]):
    """
    The rescue world as a generative domain.

    Features:
    - Simulation = one robot action followed by one fire step
    - Reward selectable between rescuing and merely avoiding fire
    - Query vocabulary listed in ``PREDICATES``
    """

    def __init__(self, cfg: RescueConfig, reward_kind: RewardKind = RewardKind.SAFE) -> None:
        self.cfg = cfg
        self.reward_kind = reward_kind
        self.name = f"rescue[{reward_kind.value}]"
        self._reward: Callable[[RescueState], float] = (
            reward_safe if reward_kind is RewardKind.SAFE else reward_avoid_burning
        )

    def with_reward(self, reward_kind: RewardKind) -> RescueDomain:
        return RescueDomain(self.cfg, reward_kind)

    def simulate(self, state: RescueState, action: ActionTerm, rng: RandomSource) -> RescueState:
        return apply_action(state, action, self.cfg, rng)

    def reward(self, state: RescueState) -> float:
        return self._reward(state)

    def ground_actions(self, state: RescueState) -> Sequence[ActionTerm]:
        return legal_actions(state, self.cfg)

    def eval_atom(self, literal: Literal, state: RescueState) -> frozenset[Substitution]:
        return eval_rescue_atom(literal, state, self.cfg)

    def state_digest(self, state: RescueState) -> tuple[int, tuple[int, ...], tuple[bool, ...]]:
        return state.digest()

    def initial_state(self, rng: RandomSource) -> RescueState:
        return generate_initial(self.cfg, rng)


def rescue_program() -> Program:
    """
    The rescue strategy program.

    Drop a carried victim when standing on a safe position; otherwise lift a
    victim lying at an unsafe position while capacity is left; otherwise try
    any action. The guards are mutually exclusive, so at most one branch is
    open in every state.
    """
    drop = Cond(query(atom("at_safe"), atom("carrying", "V")), act("drop", "V"))
    lift = Cond(
        query(atom("not_at_safe"), atom("has_capacity"), atom("victim_here", "V")),
        act("lift", "V"),
    )
    fallback = NegCond(query(atom("not_at_safe_and_victim_here"), atom("has_capacity")), ANY)
    otherwise = NegCond(query(atom("at_safe_and_carrying")), Choice((lift, fallback)))
    return Loop(TRUE_QUERY, Choice((drop, otherwise)))


def state_space_cardinality(cfg: RescueConfig) -> int:
    """
    Number of distinct rescue states for a fixed graph and safe set.

    Victims split into i carried (i up to the capacity) and the rest placed
    on the ground, times the robot position, times the fire flags of the
    unsafe positions.
    """
    placements = sum(
        comb(cfg.victims, i) * comb(cfg.positions, cfg.victims - i)
        for i in range(min(cfg.capacity, cfg.victims) + 1)
    )
    return placements * cfg.positions * 2**cfg.unsafe_count
