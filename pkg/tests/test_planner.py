"""Tests for the environment and the online planner."""

from src.mcap_planner.core import (
    OnlinePlanner,
    RandomSource,
    SearchParams,
    SimulatedEnvironment,
    StepHook,
    expand,
    online_mcap_step,
)
from src.mcap_planner.core.domain import RewardOverride
from src.mcap_planner.domains import ChainDomain
from src.mcap_planner.language import EPSILON, act, action, seq, universal_program

PARAMS = SearchParams(h_max=4, gamma=0.9, c=1.0, budget=20)


def jump_to_end(state: int, rng: RandomSource) -> int:
    return 2


class TestSimulatedEnvironment:
    """Tests for SimulatedEnvironment."""

    def test_step_advances(self, chain, rng):
        env = SimulatedEnvironment(chain, 0)
        assert env.step(action("next"), rng) == 1
        assert env.current() == 1
        assert env.step_index == 1

    def test_hooks_fire_after_listed_steps(self, rng):
        chain = ChainDomain(length=3)
        hook = StepHook(name="jump", steps=frozenset({2}), apply=jump_to_end)
        env = SimulatedEnvironment(chain, 0, [hook])

        assert env.step(action("stay"), rng) == 0
        assert env.step(action("stay"), rng) == 2
        assert env.fired == [(2, "jump")]


class TestOnlineStep:
    """Tests for online_mcap_step."""

    def test_terminated_root(self, chain, rng):
        root = expand(0, EPSILON, chain, PARAMS)
        env = SimulatedEnvironment(chain, 0)
        assert online_mcap_step(root, env, PARAMS, chain, rng) == (None, None)
        assert env.step_index == 0

    def test_outcome_fields(self, chain, rng):
        root = expand(0, universal_program(), chain, PARAMS)
        env = SimulatedEnvironment(chain, 0)
        next_root, outcome = online_mcap_step(root, env, PARAMS, chain, rng)

        assert outcome is not None and next_root is not None
        assert outcome.root_visits == PARAMS.budget
        assert outcome.tail == universal_program()
        assert outcome.observed_state == env.current()
        assert next_root.state == env.current()
        assert outcome.tree_size == root.size()


class TestOnlinePlanner:
    """Tests for OnlinePlanner."""

    def test_deterministic_world_reuses_subtrees(self, chain, rng):
        env = SimulatedEnvironment(chain, 0)
        planner = OnlinePlanner(universal_program(), chain, PARAMS, rng)
        outcomes = [planner.decide(env) for _ in range(5)]
        assert all(o is not None and o.root_reused for o in outcomes)

    def test_reused_root_keeps_statistics(self, chain, rng):
        env = SimulatedEnvironment(chain, 0)
        planner = OnlinePlanner(universal_program(), chain, PARAMS, rng)
        planner.decide(env)
        assert planner.root is not None
        assert planner.root.meta.count > 0

    def test_single_action_program_terminates(self, chain, rng):
        env = SimulatedEnvironment(chain, 0)
        planner = OnlinePlanner(act("next"), chain, PARAMS, rng)

        first = planner.decide(env)
        assert first is not None
        assert first.action == action("next")
        assert planner.decide(env) is None
        assert planner.terminated
        assert env.step_index == 1

    def test_program_order_followed(self, rng):
        chain = ChainDomain(length=3)
        env = SimulatedEnvironment(chain, 0)
        planner = OnlinePlanner(seq(act("stay"), act("next")), chain, PARAMS, rng)
        executed = [planner.decide(env).action.name for _ in range(2)]
        assert executed == ["stay", "next"]
        assert planner.decide(env) is None

    def test_unexpected_state_expands_fresh_root(self, rng):
        chain = ChainDomain(length=3)
        hook = StepHook(name="jump", steps=frozenset({1}), apply=jump_to_end)
        env = SimulatedEnvironment(chain, 0, [hook])
        planner = OnlinePlanner(universal_program(), chain, PARAMS, rng)

        outcome = planner.decide(env)
        assert outcome is not None
        assert not outcome.root_reused
        assert planner.root is not None
        assert planner.root.state == 2
        assert planner.root.meta.count == 0
        assert {c.action.name for c in planner.root.children} == {"next", "stay"}

    def test_switch_domain_discards_tree(self, chain, rng):
        env = SimulatedEnvironment(chain, 0)
        planner = OnlinePlanner(universal_program(), chain, PARAMS, rng)
        planner.decide(env)

        doubled = RewardOverride(chain, lambda s: 2.0, name="doubled")
        planner.switch_domain(doubled, env.current())
        assert planner.domain is doubled
        assert planner.root is not None
        assert planner.root.meta.count == 0
        assert planner.root.children[0].tail == universal_program()
