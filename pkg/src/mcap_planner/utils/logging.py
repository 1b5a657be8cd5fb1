"""Loguru setup shared by the CLI process and experiment worker processes."""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Any

from loguru import logger

from .config import LoggingSettings

FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {extra[component]} | {message}"
WORKER_FORMAT = (
    "<dim>worker {process}</dim> | <level>{level: <8}</level> | {extra[component]} | {message}"
)


def setup_logging(settings: LoggingSettings | None = None) -> None:
    """
    Replace loguru's default sink with the configured ones.

    A colored stderr sink is always installed; a rotating, gzip-compressed
    file sink is added when ``settings.file_path`` is set.

    Args:
        settings: Logging settings (defaults when omitted)
    """
    settings = settings or LoggingSettings()
    logger.remove()
    logger.configure(extra={"component": "mcap"})

    logger.add(
        sys.stderr,
        format=settings.format,
        level=settings.level,
        colorize=True,
        backtrace=True,
        diagnose=False,
    )

    if settings.file_path:
        Path(settings.file_path).parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            settings.file_path,
            format=FILE_FORMAT,
            level=settings.level,
            rotation=settings.rotation,
            retention=settings.retention,
            compression="gz",
        )


def configure_worker(level: str) -> None:
    """
    Process-pool initializer for episode workers.

    Fresh worker processes start with loguru's DEBUG sink; this keeps them
    at the parent's level and tags each line with the worker's pid.
    """
    logger.remove()
    logger.configure(extra={"component": "worker"})
    logger.add(sys.stderr, format=WORKER_FORMAT, level=level, colorize=True, diagnose=False)


def get_logger(component: str) -> Any:
    """Logger whose lines carry ``component`` in the component column."""
    return logger.bind(component=component)
