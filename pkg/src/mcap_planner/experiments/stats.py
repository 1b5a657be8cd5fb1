"""Per-step statistics over episodes and plot-ready result files."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from scipy import stats

from ..errors import InsufficientDataError, ResultsIOError
from .episode import EpisodeTrace


@dataclass(frozen=True)
class StatRow:
    """Means and confidence half-widths of both ratios at one step."""

    step: int
    mean_safe: float
    err_safe: float
    mean_burning: float
    err_burning: float

    def format(self) -> str:
        values = (self.mean_safe, self.err_safe, self.mean_burning, self.err_burning)
        return " ".join([str(self.step), *(repr(float(v)) for v in values)])


@dataclass
class StatTable:
    """Aggregated ratios, one row per step; ``episodes`` is not part of equality."""

    rows: list[StatRow]
    episodes: int = field(default=0, compare=False)

    def __len__(self) -> int:
        return len(self.rows)

    def max_half_width(self) -> float:
        if not self.rows:
            return 0.0
        return max(max(r.err_safe, r.err_burning) for r in self.rows)

    def meets(self, half_width: float) -> bool:
        """Whether every half-width is within the target."""
        return self.max_half_width() <= half_width

    def final(self) -> StatRow:
        return self.rows[-1]


def t_half_widths(samples: np.ndarray, confidence: float = 0.95) -> np.ndarray:
    """
    Student-t confidence half-widths of column means.

    Args:
        samples: Array of shape (episodes, steps)
        confidence: Two-sided confidence level

    Returns:
        One half-width per column
    """
    n = samples.shape[0]
    quantile = stats.t.ppf((1.0 + confidence) / 2.0, n - 1)
    return np.asarray(quantile * stats.sem(samples, axis=0, ddof=1), dtype=np.float64)


def aggregate(traces: Sequence[EpisodeTrace], confidence: float = 0.95) -> StatTable:
    """
    Mean and t-based confidence half-width of both ratios at every step.

    Raises:
        InsufficientDataError: with fewer than two traces, or traces that
            differ in length or step numbering
    """
    if len(traces) < 2:
        raise InsufficientDataError(f"need at least 2 traces, got {len(traces)}")
    steps = traces[0].steps
    for trace in traces[1:]:
        if trace.steps != steps:
            raise InsufficientDataError(
                f"trace of seed {trace.seed} has {len(trace)} steps, expected {len(steps)}"
            )
    if not steps:
        raise InsufficientDataError("traces contain no steps")

    safe = np.vstack([t.safe_ratios() for t in traces])
    burning = np.vstack([t.burning_ratios() for t in traces])
    safe_err = t_half_widths(safe, confidence)
    burning_err = t_half_widths(burning, confidence)
    safe_mean = safe.mean(axis=0)
    burning_mean = burning.mean(axis=0)

    rows = [
        StatRow(
            step=step,
            mean_safe=float(safe_mean[i]),
            err_safe=float(safe_err[i]),
            mean_burning=float(burning_mean[i]),
            err_burning=float(burning_err[i]),
        )
        for i, step in enumerate(steps)
    ]
    return StatTable(rows=rows, episodes=len(traces))


def write_results(table: StatTable, path: Union[str, Path]) -> None:
    """
    Write one space-separated line per step.

    Columns: step mean_safe err_safe mean_burning err_burning. Floats use
    their shortest exact representation, so equal tables give equal bytes.

    Raises:
        ResultsIOError: if the file cannot be written
    """
    file_path = Path(path)
    text = "".join(row.format() + "\n" for row in table.rows)
    try:
        file_path.parent.mkdir(parents=True, exist_ok=True)
        file_path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise ResultsIOError(file_path, e.strerror or str(e)) from e


def read_results(path: Union[str, Path]) -> StatTable:
    """
    Read a file written by :func:`write_results`.

    Raises:
        ResultsIOError: if the file is missing or a line is malformed
    """
    file_path = Path(path)
    try:
        lines = file_path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ResultsIOError(file_path, e.strerror or str(e)) from e

    rows: list[StatRow] = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 5:
            raise ResultsIOError(file_path, f"line {number}: expected 5 columns, got {len(fields)}")
        try:
            rows.append(StatRow(int(fields[0]), *(float(v) for v in fields[1:])))
        except ValueError as e:
            raise ResultsIOError(file_path, f"line {number}: {e}") from e
    return StatTable(rows=rows)
