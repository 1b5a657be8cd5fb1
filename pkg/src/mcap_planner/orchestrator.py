"""Experiment orchestrator: runs episodes in parallel until the statistics settle."""

from __future__ import annotations

import asyncio
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

from .experiments.config import ExperimentConfig
from .experiments.episode import EpisodeTrace, episode_seed, run_episode
from .experiments.stats import StatTable, aggregate
from .utils.logging import configure_worker, get_logger


@dataclass
class ExperimentResult:
    """Aggregated table plus the traces it was computed from."""

    config: ExperimentConfig
    table: StatTable
    traces: list[EpisodeTrace] = field(default_factory=list)
    converged: bool = False

    @property
    def episodes(self) -> int:
        return len(self.traces)


def _run_indexed(cfg: ExperimentConfig, index: int) -> tuple[int, EpisodeTrace]:
    return index, run_episode(cfg, episode_seed(cfg.seed, index))


class ExperimentOrchestrator:
    """
    Runs the episodes of one experiment cell.

    Features:
    - Bounded worker pool (threads for one worker, processes otherwise)
    - Stopping rule evaluated on the prefix of finished episode indices, so
      the result does not depend on the worker count or completion order
    - Optional rich progress bar
    """

    def __init__(
        self,
        cfg: ExperimentConfig,
        console: Optional[Console] = None,
        show_progress: bool = False,
        log_level: str = "WARNING",
    ) -> None:
        """
        Initialize the orchestrator.

        Args:
            cfg: Experiment configuration
            console: Console for the progress bar
            show_progress: Whether to display progress
            log_level: Log level of worker processes
        """
        self._cfg = cfg
        self._console = console or Console(stderr=True)
        self._show_progress = show_progress
        self._log_level = log_level
        self._semaphore = asyncio.Semaphore(cfg.workers)
        self._logger = get_logger("ExperimentOrchestrator")

    def _make_executor(self) -> Executor:
        if self._cfg.workers == 1:
            return ThreadPoolExecutor(max_workers=1)
        return ProcessPoolExecutor(
            max_workers=self._cfg.workers,
            initializer=configure_worker,
            initargs=(self._log_level,),
        )

    async def _run_one(self, executor: Executor, index: int) -> tuple[int, EpisodeTrace]:
        async with self._semaphore:
            loop = asyncio.get_running_loop()
            return await loop.run_in_executor(executor, _run_indexed, self._cfg, index)

    def _settled(self, prefix: list[EpisodeTrace]) -> bool:
        if len(prefix) < self._cfg.min_episodes:
            return False
        table = aggregate(prefix, self._cfg.confidence)
        return table.meets(self._cfg.half_width_target)

    async def run(self) -> ExperimentResult:
        """
        Run episodes until every step's confidence half-width meets the target
        (after ``min_episodes``) or the episode cap is reached.

        Returns:
            Result built from the shortest settled prefix of episodes
        """
        cfg = self._cfg
        self._logger.info(
            f"Running {cfg.label()}: up to {cfg.episodes} episodes, "
            f"budget {cfg.search.budget}, {cfg.workers} worker(s)"
        )

        finished: dict[int, EpisodeTrace] = {}
        prefix: list[EpisodeTrace] = []
        settled = False
        next_index = 0
        pending: set[asyncio.Task[tuple[int, EpisodeTrace]]] = set()

        progress = Progress(
            TextColumn("[cyan]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            console=self._console,
            disable=not self._show_progress,
        )

        with progress, self._make_executor() as executor:
            bar = progress.add_task(cfg.label(), total=cfg.episodes)
            while True:
                while not settled and next_index < cfg.episodes and len(pending) < cfg.workers:
                    pending.add(asyncio.create_task(self._run_one(executor, next_index)))
                    next_index += 1
                if not pending:
                    break

                done, pending = await asyncio.wait(pending, return_when=asyncio.FIRST_COMPLETED)
                for task in done:
                    index, trace = task.result()
                    finished[index] = trace
                    progress.advance(bar)

                while not settled and len(prefix) in finished:
                    prefix.append(finished[len(prefix)])
                    settled = self._settled(prefix)

        table = aggregate(prefix, cfg.confidence)
        self._logger.info(
            f"{cfg.label()}: {len(prefix)} episodes, max half-width "
            f"{table.max_half_width():.4f}{' (target met)' if settled else ''}"
        )
        return ExperimentResult(config=cfg, table=table, traces=prefix, converged=settled)


def run_experiment(cfg: ExperimentConfig, show_progress: bool = False) -> StatTable:
    """Run one experiment cell synchronously and return its statistics."""
    orchestrator = ExperimentOrchestrator(cfg, show_progress=show_progress)
    return asyncio.run(orchestrator.run()).table
