"""
Monte Carlo search over action programs.

One iteration descends the tree with UCB1, samples a successor through the
generative domain and either recurses into a known successor (then backs up
values with the Bellman update) or attaches a freshly expanded node whose
value is a random rollout constrained by the remaining program.
"""

from __future__ import annotations

from math import inf, log, sqrt
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..errors import NoChildrenError, ZeroCountError
from ..language.program import Program
from ..language.semantics import pot
from .domain import GenerativeDomain
from .random_source import RandomSource
from .tree import ActionNode, Metadata, StateNode


class SearchParams(BaseModel):
    """
    Framework parameters of one search.

    ``normalized_weights`` divides successor weights by the summed successor
    counts instead of the action count. ``discounted_backup`` applies gamma in
    the state update. Both default to the undiscounted count-weighted backup.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    h_max: int = Field(default=40, ge=1)
    gamma: float = Field(default=0.9, ge=0.0, le=1.0)
    c: float = Field(default=10.0, gt=0.0)
    budget: int = Field(default=1000, ge=1)
    normalized_weights: bool = False
    discounted_backup: bool = False
    transparent_termination: bool = False
    pot_max_steps: Optional[int] = Field(default=None, ge=1)

    @property
    def backup_discount(self) -> float:
        return self.gamma if self.discounted_backup else 1.0


def ucb1_score(q: float, n: int, log_parent: float, c: float) -> float:
    """``q + c·sqrt(2·ln N / n)``; an unvisited child scores infinity."""
    if n == 0:
        return inf
    return q + c * sqrt(2.0 * log_parent / n)


def ucb1_select(node: StateNode, c: float, rng: RandomSource) -> ActionNode:
    """
    Pick the child with the highest UCB1 score.

    Unvisited children win outright; ties are broken uniformly with rng.

    Raises:
        NoChildrenError: if the node has no children
    """
    if not node.children:
        raise NoChildrenError("cannot select an action: state node has no children")
    if len(node.children) == 1:
        return node.children[0]

    fresh = [child for child in node.children if child.meta.count == 0]
    if fresh:
        return fresh[0] if len(fresh) == 1 else rng.choice(fresh)

    log_parent = log(max(node.meta.count, 1))
    scores = [ucb1_score(a.meta.value, a.meta.count, log_parent, c) for a in node.children]
    best = max(scores)
    leaders = [child for child, score in zip(node.children, scores) if score == best]
    return leaders[0] if len(leaders) == 1 else rng.choice(leaders)


def expand(
    state: Any,
    program: Program,
    domain: GenerativeDomain[Any],
    params: Optional[SearchParams] = None,
) -> StateNode:
    """
    Create a state node with one fresh action child per potential entry.

    The children follow the potential set's order; a terminated or blocked
    program yields a childless node.
    """
    params = params or SearchParams()
    entries = pot(
        state,
        program,
        domain,
        transparent_termination=params.transparent_termination,
        max_steps=params.pot_max_steps,
    )
    return StateNode(
        state=state,
        children=[ActionNode(action=entry.head, tail=entry.tail) for entry in entries],
    )


def rollout(
    state: Any,
    program: Program,
    h: int,
    params: SearchParams,
    domain: GenerativeDomain[Any],
    rng: RandomSource,
) -> float:
    """
    Discounted return of a random walk that follows the program.

    At each depth the reward is collected; unless the maximum depth is reached
    or the program has no continuation, an entry of the potential set is drawn
    uniformly and its head simulated.

    Raises:
        ValueError: if h is outside [0, h_max]
    """
    if not 0 <= h <= params.h_max:
        raise ValueError(f"rollout depth {h} outside [0, {params.h_max}]")

    rewards: list[float] = []
    while True:
        rewards.append(domain.reward(state))
        if h >= params.h_max:
            break
        entries = pot(
            state,
            program,
            domain,
            transparent_termination=params.transparent_termination,
            max_steps=params.pot_max_steps,
        )
        if not entries:
            break
        entry = rng.choice(entries.entries)
        state = domain.simulate(state, entry.head, rng)
        program = entry.tail
        h += 1

    value = 0.0
    for reward in reversed(rewards):
        value = reward + params.gamma * value
    return value


def _action_value(node: ActionNode, normalized: bool, count: int) -> float:
    if count == 0:
        raise ZeroCountError(f"action node {node.action} was never visited")
    total = node.child_count_sum() if normalized else count
    if total == 0:
        raise ZeroCountError(f"no successor of {node.action} was visited")
    return sum(child.meta.count / total * child.meta.value for child in node.children)


def update_action(node: ActionNode, normalized_weights: bool = False) -> float:
    """
    Set q to the count-weighted mean of the successor values.

    The weights are ``#(successor) / #(action)``; with ``normalized_weights``
    they are divided by the summed successor counts so they add up to one.

    Raises:
        ZeroCountError: if the action (or, normalized, every successor) is unvisited
    """
    node.meta.value = _action_value(node, normalized_weights, node.meta.count)
    node.backed_up_at = node.meta.count
    return node.meta.value



def _state_value(node: StateNode, domain: GenerativeDomain[Any], discount: float) -> float:
    if not node.children:
        raise NoChildrenError("cannot back up a state node without children")
    return domain.reward(node.state) + discount * max(child.meta.value for child in node.children)


def update_state(node: StateNode, domain: GenerativeDomain[Any], discount: float = 1.0) -> float:
    """
    Set v to the state's reward plus the best action value.

    Raises:
        NoChildrenError: if the node has no children (its value stays as is)
    """
    node.meta.value = _state_value(node, domain, discount)
    return node.meta.value


def mcap_iteration(
    node: StateNode,
    h: int,
    params: SearchParams,
    domain: GenerativeDomain[Any],
    rng: RandomSource,
) -> None:
    """
    One search iteration from ``node`` at depth ``h``.

    Values are backed up only along a path that recursed into an already known
    successor. A new successor is attached with count 0 and its rollout value,
    and its ancestors are not updated in that iteration.
    """
    node.meta.count += 1
    if h >= params.h_max or not node.children:
        return

    chosen = ucb1_select(node, params.c, rng)
    chosen.meta.count += 1
    successor = domain.simulate(node.state, chosen.action, rng)
    digest = domain.state_digest(successor)

    known = chosen.find_child(digest)
    if known is not None:
        mcap_iteration(known, h + 1, params, domain, rng)
        update_action(chosen, params.normalized_weights)
        update_state(node, domain, params.backup_discount)
        return

    leaf = expand(successor, chosen.tail, domain, params)
    leaf.meta = Metadata(count=0, value=rollout(successor, chosen.tail, h, params, domain, rng))
    chosen.add_child(digest, leaf)


def run_search(
    root: StateNode,
    params: SearchParams,
    domain: GenerativeDomain[Any],
    rng: RandomSource,
) -> None:
    """Run ``params.budget`` iterations from the root at depth 0."""
    for _ in range(params.budget):
        mcap_iteration(root, 0, params, domain, rng)


def best_action(root: StateNode) -> Optional[ActionNode]:
    """
    The child with the highest q, or None when the program has terminated.

    Ties go to the smallest action under the fixed term order.
    """
    if not root.children:
        return None
    return min(root.children, key=lambda child: (-child.meta.value, child.sort_key()))


def recompute_values(
    root: StateNode,
    params: SearchParams,
    domain: GenerativeDomain[Any],
) -> list[str]:
    """
    Recompute every backed-up value bottom-up and report disagreements.

    Each action value is recomputed from its successors with the visit count
    it had at its last backup, since later expansions raise the count without
    a backup. Nodes that were never backed up keep their stored value: state
    nodes with no backed-up action child hold their rollout estimate. An empty
    list means the tree is consistent.
    """
    mismatches: list[str] = []
    discount = params.backup_discount

    def state_value(node: StateNode) -> float:
        for action_node in node.children:
            action_value(action_node)
        if not any(a.backed_up_at > 0 for a in node.children):
            return node.meta.value
        expected = domain.reward(node.state) + discount * max(a.meta.value for a in node.children)
        if expected != node.meta.value:
            mismatches.append(
                f"state {node.state!r}: stored {node.meta.value}, expected {expected}"
            )
        return expected

    def action_value(node: ActionNode) -> float:
        for child in node.children:
            state_value(child)
        if node.backed_up_at == 0:
            return node.meta.value
        expected = _action_value(node, params.normalized_weights, node.backed_up_at)
        if expected != node.meta.value:
            mismatches.append(
                f"action {node.action}: stored {node.meta.value}, expected {expected}"
            )
        return expected

    state_value(root)
    return mismatches
