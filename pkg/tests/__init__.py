"""Tests for the MCAP planner."""
