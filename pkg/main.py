#!/usr/bin/env python3
"""Main entry point for the MCAP planner."""

import sys

from src.mcap_planner.cli import main

if __name__ == "__main__":
    sys.exit(main())
