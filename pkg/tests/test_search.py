"""Tests for the search tree, UCB1 selection, rollouts, backups and iterations."""

from math import log

import pytest
from pydantic import ValidationError

from src.mcap_planner.core import (
    ActionNode,
    Metadata,
    RandomSource,
    SearchParams,
    StateNode,
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
from src.mcap_planner.domains import ChainDomain
from src.mcap_planner.errors import NoChildrenError, ZeroCountError
from src.mcap_planner.language import (
    EPSILON,
    TRUE_QUERY,
    Choice,
    Loop,
    action,
    act,
    universal_program,
)

NEXT_FOREVER = Loop(TRUE_QUERY, act("next"))


def action_node(name: str, count: int = 0, value: float = 0.0) -> ActionNode:
    return ActionNode(action=action(name), tail=EPSILON, meta=Metadata(count, value))


def state_node(state, count: int = 0, value: float = 0.0) -> StateNode:
    return StateNode(state=state, meta=Metadata(count, value))


class TestSearchParams:
    """Tests for SearchParams validation."""

    def test_defaults(self):
        params = SearchParams()
        assert (params.h_max, params.gamma, params.c, params.budget) == (40, 0.9, 10.0, 1000)
        assert params.backup_discount == 1.0

    def test_discounted_backup(self):
        assert SearchParams(gamma=0.5, discounted_backup=True).backup_discount == 0.5

    def test_rejects_out_of_range(self):
        with pytest.raises(ValidationError):
            SearchParams(gamma=1.5)
        with pytest.raises(ValidationError):
            SearchParams(h_max=0)


class TestUcb1:
    """Tests for ucb1_score and ucb1_select."""

    def test_score_arithmetic(self):
        assert ucb1_score(0.5, 10, log(100), 1.0) == pytest.approx(1.4597, abs=1e-4)
        assert ucb1_score(1.0, 90, log(100), 1.0) == pytest.approx(1.3199, abs=1e-4)

    def test_less_visited_child_wins(self, rng):
        root = state_node(0, count=100)
        first, second = action_node("a", 10, 0.5), action_node("b", 90, 1.0)
        root.children = [first, second]
        assert ucb1_select(root, 1.0, rng) is first

    def test_single_child(self, rng):
        root = state_node(0, count=5)
        only = action_node("a", 5, 1.0)
        root.children = [only]
        assert ucb1_select(root, 1.0, rng) is only

    def test_unvisited_child_first(self, rng):
        root = state_node(0, count=20)
        fresh = action_node("b")
        root.children = [action_node("a", 20, 100.0), fresh]
        assert ucb1_select(root, 1.0, rng) is fresh

    def test_ties_broken_among_leaders(self, rng):
        root = state_node(0, count=4)
        root.children = [action_node("a"), action_node("b"), action_node("c", 4, 1.0)]
        picks = {ucb1_select(root, 1.0, rng).action.name for _ in range(50)}
        assert picks == {"a", "b"}

    def test_no_children(self, rng):
        with pytest.raises(NoChildrenError):
            ucb1_select(state_node(0), 1.0, rng)


class TestExpand:
    """Tests for expand."""

    def test_epsilon_gives_leaf(self, chain):
        assert expand(0, EPSILON, chain).is_terminal

    def test_single_action(self, chain):
        node = expand(0, act("a"), chain)
        assert len(node.children) == 1
        child = node.children[0]
        assert child.action == action("a")
        assert child.tail == EPSILON
        assert child.meta == Metadata(0, 0.0)
        assert child.children == []

    def test_choice(self, chain):
        node = expand(0, Choice((act("a"), act("b"))), chain)
        assert [c.action.name for c in node.children] == ["a", "b"]
        assert all(c.tail == EPSILON for c in node.children)


class TestRollout:
    """Tests for rollout."""

    def test_geometric_sum(self, chain, rng):
        params = SearchParams(h_max=2, gamma=0.9)
        assert rollout(0, NEXT_FOREVER, 0, params, chain, rng) == pytest.approx(2.71)

    def test_at_max_depth(self, chain, rng):
        params = SearchParams(h_max=3, gamma=0.9)
        assert rollout(0, NEXT_FOREVER, 3, params, chain, rng) == 1.0

    def test_zero_discount(self, chain, rng):
        params = SearchParams(h_max=10, gamma=0.0)
        assert rollout(0, NEXT_FOREVER, 0, params, chain, rng) == 1.0

    def test_program_ends_rollout(self, chain, rng):
        params = SearchParams(h_max=10, gamma=0.9)
        assert rollout(0, act("next"), 0, params, chain, rng) == pytest.approx(1.9)

    def test_depth_out_of_range(self, chain, rng):
        params = SearchParams(h_max=3)
        with pytest.raises(ValueError):
            rollout(0, NEXT_FOREVER, 4, params, chain, rng)


class TestBackups:
    """Tests for update_action and update_state."""

    def make_action(self, count: int) -> ActionNode:
        node = action_node("a", count)
        node.add_child(1, state_node(1, 3, 2.0))
        node.add_child(2, state_node(2, 1, 4.0))
        return node

    def test_count_weighted_mean(self):
        node = self.make_action(4)
        assert update_action(node) == pytest.approx(2.5)
        assert node.backed_up_at == 4

    def test_uncounted_visit_shrinks_value(self):
        node = self.make_action(5)
        assert update_action(node) == pytest.approx(2.0)
        assert update_action(node, normalized_weights=True) == pytest.approx(2.5)

    def test_single_child_takes_its_value(self):
        node = action_node("a", 3)
        node.add_child(1, state_node(1, 3, 7.0))
        assert update_action(node) == pytest.approx(7.0)

    def test_unvisited_action(self):
        with pytest.raises(ZeroCountError):
            update_action(action_node("a"))

    def test_state_reward_plus_best(self):
        domain = ChainDomain(length=1, rewards=[0.5])
        node = state_node(0)
        node.children = [action_node("a", 1, 1.0), action_node("b", 1, 3.0)]
        assert update_state(node, domain) == pytest.approx(3.5)
        assert update_state(node, domain, discount=0.5) == pytest.approx(2.0)

    def test_state_without_children(self, chain):
        node = state_node(0, 1, 9.0)
        with pytest.raises(NoChildrenError):
            update_state(node, chain)
        assert node.meta.value == 9.0

    def test_duplicate_successor_rejected(self):
        node = self.make_action(4)
        with pytest.raises(ValueError):
            node.add_child(1, state_node(1))


class TestIteration:
    """Tests for mcap_iteration and run_search."""

    def test_first_iteration_attaches_leaf(self, chain, rng):
        params = SearchParams(h_max=5, gamma=0.9, c=1.0)
        root = expand(0, act("next"), chain, params)
        mcap_iteration(root, 0, params, chain, rng)

        assert root.meta == Metadata(1, 0.0)
        chosen = root.children[0]
        assert chosen.meta.count == 1
        assert len(chosen.children) == 1
        leaf = chosen.children[0]
        assert leaf.state == 1
        assert leaf.meta == Metadata(0, 1.0)
        assert leaf.is_terminal

    def test_second_iteration_backs_up(self, chain, rng):
        """The expansion visit stays in the action count, so q is halved."""
        params = SearchParams(h_max=5, gamma=0.9, c=1.0)
        root = expand(0, act("next"), chain, params)
        mcap_iteration(root, 0, params, chain, rng)
        mcap_iteration(root, 0, params, chain, rng)

        chosen = root.children[0]
        assert chosen.meta == Metadata(2, 0.5)
        assert chosen.children[0].meta.count == 1
        assert root.meta == Metadata(2, 1.5)

    def test_normalized_weights(self, chain, rng):
        params = SearchParams(h_max=5, gamma=0.9, c=1.0, normalized_weights=True)
        root = expand(0, act("next"), chain, params)
        for _ in range(2):
            mcap_iteration(root, 0, params, chain, rng)
        assert root.children[0].meta.value == pytest.approx(1.0)
        assert root.meta.value == pytest.approx(2.0)

    def test_at_max_depth_only_counts(self, chain, rng):
        params = SearchParams(h_max=3)
        root = expand(0, NEXT_FOREVER, chain, params)
        mcap_iteration(root, 3, params, chain, rng)
        assert root.meta.count == 1
        assert root.children[0].meta.count == 0

    def test_terminated_program_only_counts(self, chain, rng):
        params = SearchParams(h_max=3)
        root = expand(0, EPSILON, chain, params)
        mcap_iteration(root, 0, params, chain, rng)
        assert root.meta == Metadata(1, 0.0)
        assert root.size() == 1

    def test_budget_counts(self, chain, rng):
        params = SearchParams(h_max=6, gamma=0.9, c=1.0, budget=200)
        root = expand(0, universal_program(), chain, params)
        run_search(root, params, chain, rng)
        assert root.meta.count == 200
        assert sum(child.meta.count for child in root.children) == 200

    def test_counts_with_early_returns(self, rng):
        """Children count the iterations that did not stop at the root."""
        chain = ChainDomain(length=3)
        params = SearchParams(h_max=4, budget=50)
        root = expand(0, act("next"), chain, params)
        run_search(root, params, chain, rng)
        assert root.meta.count == 50
        assert root.children[0].meta.count == 50
        assert root.children[0].children[0].meta.count == 49

    def test_reproducible(self, chain):
        params = SearchParams(h_max=6, gamma=0.9, c=1.0, budget=150)
        values = []
        for _ in range(2):
            root = expand(0, universal_program(), chain, params)
            run_search(root, params, chain, RandomSource(5))
            values.append([(c.meta.count, c.meta.value) for c in root.children])
        assert values[0] == values[1]


class TestBestAction:
    """Tests for best_action."""

    def test_no_children(self):
        assert best_action(state_node(0)) is None

    def test_highest_value(self):
        root = state_node(0)
        root.children = [action_node("a", 1, 0.2), action_node("b", 1, 0.9)]
        assert best_action(root).action.name == "b"

    def test_ties_follow_term_order(self):
        root = state_node(0)
        root.children = [action_node("stay", 1, 1.0), action_node("next", 1, 1.0)]
        assert best_action(root).action.name == "next"


class TestConsistencyAudit:
    """Tests for recompute_values."""

    @pytest.mark.parametrize("normalized", [False, True])
    @pytest.mark.parametrize("discounted", [False, True])
    def test_searched_tree_is_consistent(self, mdp, normalized, discounted):
        params = SearchParams(
            h_max=6,
            gamma=0.9,
            c=1.0,
            budget=400,
            normalized_weights=normalized,
            discounted_backup=discounted,
        )
        root = expand("a", universal_program(), mdp, params)
        run_search(root, params, mdp, RandomSource(3))
        assert recompute_values(root, params, mdp) == []

    def test_tampered_value_reported(self, mdp):
        params = SearchParams(h_max=6, gamma=0.9, c=1.0, budget=200)
        root = expand("a", universal_program(), mdp, params)
        run_search(root, params, mdp, RandomSource(3))
        root.meta.value += 1.0
        mismatches = recompute_values(root, params, mdp)
        assert len(mismatches) == 1
        assert mismatches[0].startswith("state 'a'")


class TestConvergence:
    """Search values approach exact finite-horizon values on a small MDP."""

    def test_two_state_mdp(self, mdp):
        params = SearchParams(
            h_max=10,
            gamma=0.9,
            c=1.0,
            budget=30000,
            normalized_weights=True,
            discounted_backup=True,
        )
        root = expand("a", universal_program(), mdp, params)
        run_search(root, params, mdp, RandomSource(2024))

        exact = mdp.finite_horizon_values(0.9, 10)[10]
        go = next(c for c in root.children if c.action.name == "go")
        assert go.meta.value == pytest.approx(mdp.q_value(exact, "a", "go"), abs=0.05)
        assert best_action(root) is go


class TestValueBounds:
    """Node values against the discounted return bound R_max·(1-γ^(h_max+1))/(1-γ)."""

    H_MAX, GAMMA = 40, 0.9

    def searched_tree(self, discounted: bool) -> StateNode:
        params = SearchParams(
            h_max=self.H_MAX, gamma=self.GAMMA, c=10.0, budget=3000, discounted_backup=discounted
        )
        chain = ChainDomain(length=2, rewards=[0.0, 1.0])
        root = expand(0, universal_program(), chain, params)
        run_search(root, params, chain, RandomSource(11))
        return root

    def bound(self) -> float:
        return (1 - self.GAMMA ** (self.H_MAX + 1)) / (1 - self.GAMMA)

    def test_discounted_backup_stays_in_bound(self):
        values = [node.meta.value for node in self.searched_tree(True).iter_nodes()]
        assert min(values) >= 0.0
        assert max(values) <= self.bound() + 1e-9

    def test_literal_backup_sums_undiscounted(self):
        """The default backup adds rewards along the tree path without gamma."""
        values = [node.meta.value for node in self.searched_tree(False).iter_nodes()]
        assert min(values) >= 0.0
        assert max(values) > self.bound()


class TestScaleInvariance:
    """Scaling rewards and c by the same factor scales values and keeps every choice."""

    @pytest.mark.parametrize("factor", [0.5, 2.0, 4.0])
    def test_counts_and_best_action_unchanged(self, factor):
        rewards = [0.0, 0.25, 1.0]
        trees = []
        for scale in (1.0, factor):
            domain = ChainDomain(length=3, rewards=[scale * r for r in rewards])
            params = SearchParams(h_max=8, gamma=0.9, c=scale * 0.5, budget=400)
            root = expand(0, universal_program(), domain, params)
            run_search(root, params, domain, RandomSource(9))
            trees.append(root)
        plain, scaled = trees
        assert [c.meta.count for c in plain.children] == [c.meta.count for c in scaled.children]
        for a, b in zip(plain.iter_nodes(), scaled.iter_nodes()):
            assert b.meta.value == pytest.approx(factor * a.meta.value)
        assert best_action(plain).action == best_action(scaled).action
