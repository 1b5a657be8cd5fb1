"""Small domains with known values, for checking the search and the planner."""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

from ..core.domain import GenerativeDomain
from ..core.random_source import RandomSource
from ..errors import IllegalActionError, UnknownPredicateError
from ..language.semantics import match_rows
from ..language.terms import ActionTerm, Literal, Substitution

Transition = Sequence[tuple[str, float]]


class ChainDomain(GenerativeDomain[int]):
    """
    Deterministic chain 0 → 1 → … → length-1.

    ``next`` advances (and stays put at the end), ``stay`` does nothing. Each
    state's reward comes from ``rewards`` (1.0 everywhere by default).

    Query atoms: ``at(N)`` (N an integer) and ``at_end``.
    """

    name = "chain"

    def __init__(self, length: int = 2, rewards: Optional[Sequence[float]] = None) -> None:
        if length < 1:
            raise ValueError("chain length must be positive")
        self.length = length
        self.rewards = list(rewards) if rewards is not None else [1.0] * length
        if len(self.rewards) != length:
            raise ValueError("one reward per chain state is required")

    def simulate(self, state: int, action: ActionTerm, rng: RandomSource) -> int:
        if action.name == "next" and not action.args:
            return min(state + 1, self.length - 1)
        if action.name == "stay" and not action.args:
            return state
        raise IllegalActionError(f"{action} is not a chain action")

    def reward(self, state: int) -> float:
        return self.rewards[state]

    def ground_actions(self, state: int) -> Sequence[ActionTerm]:
        return [ActionTerm("next"), ActionTerm("stay")]

    def eval_atom(self, literal: Literal, state: int) -> frozenset[Substitution]:
        if literal.name == "at" and len(literal.args) == 1:
            return match_rows(literal, [(state,)])
        if literal.name == "at_end" and not literal.args:
            return match_rows(literal, [()] if state == self.length - 1 else [])
        raise UnknownPredicateError(f"chain has no predicate {literal.name}/{len(literal.args)}")


class TabularMDP(GenerativeDomain[str]):
    """
    Explicit finite MDP with named states and argument-free actions.

    Simulation samples the successor with one uniform draw against the
    cumulative transition probabilities, in the listed order.

    Query atom: ``in(S)``.
    """

    def __init__(
        self,
        rewards: Mapping[str, float],
        transitions: Mapping[tuple[str, str], Transition],
        name: str = "mdp",
    ) -> None:
        self.rewards = dict(rewards)
        self.transitions = {key: list(outcomes) for key, outcomes in transitions.items()}
        self.name = name
        for (state, action), outcomes in self.transitions.items():
            total = sum(p for _, p in outcomes)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"transition ({state}, {action}) sums to {total}")

    @property
    def states(self) -> list[str]:
        return sorted(self.rewards)

    def actions_in(self, state: str) -> list[str]:
        return sorted(a for s, a in self.transitions if s == state)

    def simulate(self, state: str, action: ActionTerm, rng: RandomSource) -> str:
        outcomes = self.transitions.get((state, action.name))
        if outcomes is None or action.args:
            raise IllegalActionError(f"{action} is not available in state {state}")
        draw = rng.random()
        cumulative = 0.0
        for successor, probability in outcomes:
            cumulative += probability
            if draw < cumulative:
                return successor
        return outcomes[-1][0]

    def reward(self, state: str) -> float:
        return self.rewards[state]

    def ground_actions(self, state: str) -> Sequence[ActionTerm]:
        return [ActionTerm(a) for a in self.actions_in(state)]

    def eval_atom(self, literal: Literal, state: str) -> frozenset[Substitution]:
        if literal.name == "in" and len(literal.args) == 1:
            return match_rows(literal, [(state,)])
        raise UnknownPredicateError(
            f"{self.name} has no predicate {literal.name}/{len(literal.args)}"
        )

    def finite_horizon_values(self, gamma: float, horizon: int) -> list[dict[str, float]]:
        """
        Exact values with k decisions left, for k = 0..horizon.

        ``V_0 = R`` and ``V_k(s) = R(s) + γ·max_a Σ P(s'|s,a)·V_{k-1}(s')``.
        """
        values = [dict(self.rewards)]
        for _ in range(horizon):
            previous = values[-1]
            current: dict[str, float] = {}
            for state in self.states:
                qs = [self._expected(previous, state, a) for a in self.actions_in(state)]
                current[state] = self.rewards[state] + gamma * max(qs, default=0.0)
            values.append(current)
        return values

    def q_value(self, values: Mapping[str, float], state: str, action: str) -> float:
        """Expected successor value ``Σ P(s'|s,a)·V(s')`` under a value table."""
        return self._expected(values, state, action)

    def _expected(self, values: Mapping[str, float], state: str, action: str) -> float:
        return sum(p * values[succ] for succ, p in self.transitions[(state, action)])


def two_state_mdp(p_success: float = 0.9) -> TabularMDP:
    """
    State ``a`` (reward 0) and absorbing state ``b`` (reward 1).

    From ``a``, ``go`` reaches ``b`` with probability ``p_success``; ``stay``
    keeps ``a``. Both actions keep ``b``.
    """
    return TabularMDP(
        rewards={"a": 0.0, "b": 1.0},
        transitions={
            ("a", "go"): [("b", p_success), ("a", 1.0 - p_success)],
            ("a", "stay"): [("a", 1.0)],
            ("b", "go"): [("b", 1.0)],
            ("b", "stay"): [("b", 1.0)],
        },
        name="two-state",
    )
