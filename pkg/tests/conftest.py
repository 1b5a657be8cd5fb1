"""Pytest configuration and fixtures."""

from pathlib import Path

import pytest

from src.mcap_planner.core import RandomSource, SearchParams
from src.mcap_planner.domains import (
    CARRIED,
    ChainDomain,
    RescueConfig,
    RescueDomain,
    RescueState,
    two_state_mdp,
)
from src.mcap_planner.domains.toy import TabularMDP
from src.mcap_planner.experiments import ExperimentConfig
from src.mcap_planner.utils import Settings

ROOT = Path(__file__).resolve().parent.parent


def line_graph(n: int) -> tuple[tuple[int, ...], ...]:
    """Adjacency of the path 0 - 1 - ... - n-1."""
    return tuple(tuple(v for v in (u - 1, u + 1) if 0 <= v < n) for u in range(n))


def make_state(
    positions: int = 5,
    safe: tuple[int, ...] = (0,),
    burning: tuple[int, ...] = (),
    victims: tuple[int, ...] = (),
    robot: int = 0,
    adjacency: tuple[tuple[int, ...], ...] | None = None,
) -> RescueState:
    """Hand-built rescue state; victims use CARRIED for carried ones."""
    return RescueState(
        adjacency=adjacency if adjacency is not None else line_graph(positions),
        safe=tuple(p in safe for p in range(positions)),
        burning=tuple(p in burning for p in range(positions)),
        victims=tuple(victims),
        robot=robot,
    )


@pytest.fixture
def rng() -> RandomSource:
    """Fixed-seed random stream."""
    return RandomSource(1234)


@pytest.fixture
def chain() -> ChainDomain:
    """Two-state deterministic chain with reward 1 everywhere."""
    return ChainDomain(length=2)


@pytest.fixture
def mdp() -> TabularMDP:
    """Two-state MDP with a 0.9-reliable transition to the rewarding state."""
    return two_state_mdp()


@pytest.fixture
def tiny_config() -> RescueConfig:
    """Smallest feasible rescue world: one safe and one unsafe position."""
    return RescueConfig(
        positions=2,
        connectivity=1.0,
        safe_count=1,
        victims=1,
        fires=1,
        capacity=1,
        event_min_fires=1,
    )


@pytest.fixture
def small_config() -> RescueConfig:
    """Six positions, enough for interesting plans but quick to search."""
    return RescueConfig(
        positions=6,
        connectivity=0.5,
        safe_count=2,
        victims=2,
        fires=2,
        capacity=1,
        event_min_fires=3,
    )


@pytest.fixture
def rescue_domain() -> RescueDomain:
    """Rescue domain with default parameters (state built by hand in tests)."""
    return RescueDomain(RescueConfig())


@pytest.fixture
def carrying_state() -> RescueState:
    """Robot on safe position 0 carrying victims 0 and 1; victim 2 on p3."""
    return make_state(victims=(CARRIED, CARRIED, 3), robot=0)


@pytest.fixture
def fast_params() -> SearchParams:
    """Search parameters small enough for unit tests."""
    return SearchParams(h_max=5, gamma=0.9, c=1.0, budget=30)


@pytest.fixture
def small_experiment(small_config: RescueConfig) -> ExperimentConfig:
    """A short, cheap experiment cell on the small world."""
    return ExperimentConfig(
        rescue=small_config,
        search=SearchParams(h_max=4, gamma=0.9, c=1.0, budget=15),
        horizon=6,
        episodes=4,
        min_episodes=2,
        ci=1e-9,
        seed=11,
        event_steps=(2, 4),
        reward_switch_step=3,
    )


@pytest.fixture
def settings() -> Settings:
    """Create test settings."""
    return Settings()


@pytest.fixture(autouse=True)
def no_config_override(monkeypatch: pytest.MonkeyPatch) -> None:
    """Ignore a configuration file named in the developer's environment."""
    monkeypatch.delenv("MCAP_CONFIG", raising=False)
