"""MCAP planner - Monte Carlo search over nondeterministic action programs."""

__version__ = "0.1.0"
