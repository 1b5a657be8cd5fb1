"""Exception hierarchy for the MCAP planner."""

from __future__ import annotations

from pathlib import Path
from typing import Optional


class McapError(Exception):
    """Base class for all planner, language and domain errors."""


class ParseError(McapError):
    """
    Syntax error in MCAP program or query text.

    Attributes:
        line: 1-based line of the offending lexeme
        column: 1-based column of the offending lexeme
        expected: Description of the acceptable tokens
        found: The lexeme actually found ("<end of input>" at EOF)
    """

    def __init__(self, line: int, column: int, expected: str, found: str) -> None:
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        super().__init__(f"line {line}, column {column}: expected {expected}, found {found!r}")


class NotConditionFreeError(McapError):
    """A program handed to the term rewriter contains a state-dependent construct."""

    def __init__(self, construct: str) -> None:
        self.construct = construct
        super().__init__(f"program is not condition-free: contains {construct}")


class UnboundActionVariableError(McapError):
    """An action selected for execution still contains variables."""


class UnsafeQueryError(McapError):
    """A negated query literal is not ground once the positive literals are bound."""


class UnknownPredicateError(McapError):
    """A query uses a predicate the domain does not register."""


class PotBudgetExceededError(McapError):
    """Interpretation of a program exceeded its step budget."""


class NoChildrenError(McapError):
    """A search node operation needs children but the node has none."""


class ZeroCountError(McapError):
    """A value update was requested for a node that was never visited."""


class ContractViolation(McapError):
    """
    A generative domain broke one clause of the domain interface.

    Attributes:
        clause: Short name of the violated clause (e.g. "reward-determinism")
    """

    def __init__(self, clause: str, detail: str = "") -> None:
        self.clause = clause
        message = f"contract violated: {clause}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class InfeasibleConfigError(McapError):
    """A domain configuration cannot produce a valid initial state."""


class IllegalActionError(McapError):
    """An action was applied in a state where it is not legal."""


class InsufficientDataError(McapError):
    """Statistical aggregation was asked for with too few or ragged traces."""


class ResultsIOError(McapError):
    """Reading or writing a result file failed."""

    def __init__(self, path: Path, reason: Optional[str] = None) -> None:
        self.path = path
        super().__init__(f"{path}: {reason}" if reason else str(path))
