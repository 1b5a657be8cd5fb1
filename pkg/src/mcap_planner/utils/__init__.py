"""Settings and logging helpers."""

from .config import (
    ExperimentSettings,
    LoggingSettings,
    RescueSettings,
    SearchSettings,
    Settings,
    create_default_config,
    load_config,
)
from .logging import configure_worker, get_logger, setup_logging

__all__ = [
    "ExperimentSettings",
    "LoggingSettings",
    "RescueSettings",
    "SearchSettings",
    "Settings",
    "configure_worker",
    "create_default_config",
    "get_logger",
    "load_config",
    "setup_logging",
]
