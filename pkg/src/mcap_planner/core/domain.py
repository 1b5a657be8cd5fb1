"""The generative-domain interface every plannable domain implements."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections.abc import Hashable
from dataclasses import dataclass, field
from typing import Callable, Generic, Sequence, TypeVar

from ..errors import ContractViolation
from ..language.semantics import solve_query
from ..language.terms import (
    EMPTY_SUBSTITUTION,
    TRUE_QUERY,
    ActionTerm,
    Literal,
    Query,
    Substitution,
)
from ..utils.logging import get_logger
from .random_source import RandomSource

S = TypeVar("S")


class GenerativeDomain(ABC, Generic[S]):
    """
    Black-box generative model of a fully observable world.

    Subclasses supply a successor sampler, a reward, the applicable ground
    actions and the evaluation of single query atoms. Conjunctive queries,
    state equality and digests have defaults built on those.

    Implementations must not keep hidden mutable state: every call may run
    concurrently with others on shared states.
    """

    name: str = "domain"

    @abstractmethod
    def simulate(self, state: S, action: ActionTerm, rng: RandomSource) -> S:
        """Sample a successor of ``state`` after executing ``action``."""

    @abstractmethod
    def reward(self, state: S) -> float:
        """Deterministic quality of a state."""

    @abstractmethod
    def ground_actions(self, state: S) -> Sequence[ActionTerm]:
        """Ground actions applicable in ``state``, in a fixed order."""

    @abstractmethod
    def eval_atom(self, literal: Literal, state: S) -> frozenset[Substitution]:
        """
        Substitutions under which one positive atom holds in a state.

        Raises:
            UnknownPredicateError: if the atom's predicate is not registered
        """

    def eval_query(self, q: Query, state: S) -> frozenset[Substitution]:
        """All substitutions satisfying a conjunctive query; ``true`` gives ``{∅}``."""
        if q.is_true:
            return frozenset({EMPTY_SUBSTITUTION})
        return solve_query(q, lambda lit: self.eval_atom(lit, state))

    def state_equal(self, left: S, right: S) -> bool:
        return left == right

    def state_digest(self, state: S) -> Hashable:
        """Hashable key consistent with :meth:`state_equal`."""
        return state  # type: ignore[return-value]


class RewardOverride(GenerativeDomain[S]):
    """A domain whose reward is replaced, everything else delegated."""

    def __init__(
        self, base: GenerativeDomain[S], reward_fn: Callable[[S], float], name: str
    ) -> None:
        self._base = base
        self._reward_fn = reward_fn
        self.name = name

    @property
    def base(self) -> GenerativeDomain[S]:
        return self._base

    def simulate(self, state: S, action: ActionTerm, rng: RandomSource) -> S:
        return self._base.simulate(state, action, rng)

    def reward(self, state: S) -> float:
        return self._reward_fn(state)

    def ground_actions(self, state: S) -> Sequence[ActionTerm]:
        return self._base.ground_actions(state)

    def eval_atom(self, literal: Literal, state: S) -> frozenset[Substitution]:
        return self._base.eval_atom(literal, state)

    def eval_query(self, q: Query, state: S) -> frozenset[Substitution]:
        return self._base.eval_query(q, state)

    def state_equal(self, left: S, right: S) -> bool:
        return self._base.state_equal(left, right)

    def state_digest(self, state: S) -> Hashable:
        return self._base.state_digest(state)


@dataclass
class ConformanceReport:
    """Outcome of :func:`conformance_check`: how often each clause was exercised."""

    domain: str
    trials: int
    checks: dict[str, int] = field(default_factory=dict)

    def record(self, clause: str) -> None:
        self.checks[clause] = self.checks.get(clause, 0) + 1

    @property
    def total_checks(self) -> int:
        return sum(self.checks.values())


def conformance_check(
    domain: GenerativeDomain[S],
    state: S,
    trials: int,
    rng: RandomSource,
    queries: Sequence[Query] = (),
) -> ConformanceReport:
    """
    Sample-based check of the domain interface contracts.

    Walks a random trajectory from ``state``; at every visited state it checks
    that simulation replays identically from a cloned random stream, that the
    reward is deterministic and finite, that ``true`` and the given ground
    queries follow the ``{∅}``/``∅`` convention, that all offered actions are
    ground, and that state equality is reflexive, symmetric and agrees with
    the digest.

    Args:
        domain: Domain under test
        state: Starting state
        trials: Number of sampled transitions (at least 1)
        rng: Random stream driving the walk
        queries: Extra ground queries to check at each state

    Returns:
        Per-clause check counts

    Raises:
        ContractViolation: naming the first broken clause
        ValueError: if trials < 1
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    log = get_logger("Conformance")
    report = ConformanceReport(domain=domain.name, trials=trials)
    current = state

    for trial in range(trials):
        _check_state(domain, current, queries, report)
        actions = list(domain.ground_actions(current))
        if not actions:
            current = state
            continue
        chosen = rng.choice(actions)
        if not chosen.is_ground:
            raise ContractViolation("ground-actions", f"non-ground action {chosen}")
        report.record("ground-actions")

        replay = rng.clone()
        successor = domain.simulate(current, chosen, rng)
        replayed = domain.simulate(current, chosen, replay)
        if not domain.state_equal(successor, replayed):
            raise ContractViolation(
                "simulate-determinism", f"trial {trial}: {chosen} diverged on a replayed stream"
            )
        report.record("simulate-determinism")

        reflexive = domain.state_equal(successor, successor)
        if not reflexive:
            raise ContractViolation("state-equality", "state_equal is not reflexive")
        if domain.state_equal(current, successor) != domain.state_equal(successor, current):
            raise ContractViolation("state-equality", "state_equal is not symmetric")
        if domain.state_digest(successor) != domain.state_digest(replayed):
            raise ContractViolation("state-equality", "equal states have different digests")
        report.record("state-equality")
        current = successor

    log.debug(f"{domain.name}: {report.total_checks} checks over {trials} trials passed")
    return report


def _check_state(
    domain: GenerativeDomain[S],
    state: S,
    queries: Sequence[Query],
    report: ConformanceReport,
) -> None:
    first, second = domain.reward(state), domain.reward(state)
    if first != second:
        raise ContractViolation("reward-determinism", f"reward returned {first} then {second}")
    if not math.isfinite(first):
        raise ContractViolation("reward-determinism", f"reward is not finite: {first}")
    report.record("reward-determinism")

    if domain.eval_query(TRUE_QUERY, state) != frozenset({EMPTY_SUBSTITUTION}):
        raise ContractViolation("ground-query", "query 'true' must give the empty substitution")
    for q in queries:
        if not q.is_ground:
            continue
        if not domain.eval_query(q, state) <= {EMPTY_SUBSTITUTION}:
            raise ContractViolation("ground-query", f"ground query {q} bound variables")
    report.record("ground-query")
