"""First-order terms shared by actions and queries."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Union

Term = Union[str, int]
"""A ground constant (lowercase identifier or integer) or a variable (uppercase identifier)."""

TermKey = tuple[int, Union[str, int]]


def is_variable(term: Term) -> bool:
    """Variables are identifiers starting with an uppercase letter."""
    return isinstance(term, str) and term[:1].isupper()


def term_key(term: Term) -> TermKey:
    """Total order over terms: integers before identifiers."""
    if isinstance(term, int):
        return (0, term)
    return (1, term)


def format_term(term: Term) -> str:
    return str(term)


def _format_call(name: str, args: tuple[Term, ...]) -> str:
    if not args:
        return name
    return f"{name}({', '.join(format_term(a) for a in args)})"


@dataclass(frozen=True)
class Substitution:
    """
    A finite mapping from variable names to ground terms.

    Stored as a sorted tuple of pairs so that substitutions are hashable and
    can be collected in sets.
    """

    bindings: tuple[tuple[str, Term], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, Term]) -> Substitution:
        for name, value in mapping.items():
            if not is_variable(name):
                raise ValueError(f"not a variable: {name!r}")
            if is_variable(value):
                raise ValueError(f"binding for {name} is not ground: {value!r}")
        return cls(tuple(sorted(mapping.items(), key=lambda kv: kv[0])))

    def get(self, name: str) -> Optional[Term]:
        for var, value in self.bindings:
            if var == name:
                return value
        return None

    def apply(self, term: Term) -> Term:
        if isinstance(term, str) and is_variable(term):
            bound = self.get(term)
            if bound is not None:
                return bound
        return term

    def merge(self, other: Substitution) -> Optional[Substitution]:
        """Union of two substitutions, or None if they disagree on a variable."""
        merged = dict(self.bindings)
        for name, value in other.bindings:
            if name in merged and merged[name] != value:
                return None
            merged[name] = value
        return Substitution.of(merged)

    def as_dict(self) -> dict[str, Term]:
        return dict(self.bindings)

    def __bool__(self) -> bool:
        return bool(self.bindings)

    def __str__(self) -> str:
        inner = ", ".join(f"{name} -> {format_term(value)}" for name, value in self.bindings)
        return "{" + inner + "}"


EMPTY_SUBSTITUTION = Substitution()


@dataclass(frozen=True)
class ActionTerm:
    """A (possibly non-ground) action such as ``lift(V)`` or ``noop``."""

    name: str
    args: tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("action name must be non-empty")

    @property
    def is_ground(self) -> bool:
        return not any(is_variable(a) for a in self.args)

    def substitute(self, theta: Substitution) -> ActionTerm:
        if not theta or self.is_ground:
            return self
        return ActionTerm(self.name, tuple(theta.apply(a) for a in self.args))

    def sort_key(self) -> tuple[str, tuple[TermKey, ...]]:
        return (self.name, tuple(term_key(a) for a in self.args))

    def __str__(self) -> str:
        return _format_call(self.name, self.args)


@dataclass(frozen=True)
class Literal:
    """A possibly negated query atom, e.g. ``!burning(P)``."""

    name: str
    args: tuple[Term, ...] = ()
    negated: bool = False

    @property
    def is_ground(self) -> bool:
        return not any(is_variable(a) for a in self.args)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(a for a in self.args if isinstance(a, str) and is_variable(a))

    def substitute(self, theta: Substitution) -> Literal:
        if not theta or self.is_ground:
            return self
        return Literal(self.name, tuple(theta.apply(a) for a in self.args), self.negated)

    def sort_key(self) -> tuple[bool, str, tuple[TermKey, ...]]:
        return (self.negated, self.name, tuple(term_key(a) for a in self.args))

    def __str__(self) -> str:
        prefix = "!" if self.negated else ""
        return prefix + _format_call(self.name, self.args)


@dataclass(frozen=True)
class Query:
    """
    A conjunction of literals; the empty conjunction is the constant ``true``.

    Conjunct order is significant: positive literals bind variables left to
    right and negated literals only filter.
    """

    literals: tuple[Literal, ...] = field(default=())

    @classmethod
    def of(cls, literals: Iterable[Literal]) -> Query:
        return cls(tuple(literals))

    @property
    def is_true(self) -> bool:
        return not self.literals

    @property
    def is_ground(self) -> bool:
        return all(lit.is_ground for lit in self.literals)

    def substitute(self, theta: Substitution) -> Query:
        if not theta:
            return self
        return Query(tuple(lit.substitute(theta) for lit in self.literals))

    def sort_key(self) -> tuple[tuple[bool, str, tuple[TermKey, ...]], ...]:
        return tuple(lit.sort_key() for lit in self.literals)

    def __str__(self) -> str:
        if self.is_true:
            return "true"
        return " & ".join(str(lit) for lit in self.literals)


TRUE_QUERY = Query()


def action(name: str, *args: Term) -> ActionTerm:
    """Shorthand constructor: ``action("lift", "v1")``."""
    return ActionTerm(name, tuple(args))


def atom(name: str, *args: Term, negated: bool = False) -> Literal:
    """Shorthand constructor for a query literal."""
    return Literal(name, tuple(args), negated)


def query(*literals: Literal) -> Query:
    """Shorthand constructor for a conjunctive query."""
    return Query(tuple(literals))
