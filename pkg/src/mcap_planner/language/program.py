"""Abstract syntax of MCAP programs and their canonical form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

from .terms import TRUE_QUERY, ActionTerm, Query, Term

SortKey = tuple[Any, ...]


class Program:
    """
    Base class of all program constructors.

    Programs are immutable values. Structural equality is dataclass equality;
    use :func:`program_equals` for equality modulo canonicalization.
    """

    __slots__ = ()

    def sort_key(self) -> SortKey:
        raise NotImplementedError

    def __lt__(self, other: Program) -> bool:
        return self.sort_key() < other.sort_key()


@dataclass(frozen=True)
class Epsilon(Program):
    """The empty program."""

    def sort_key(self) -> SortKey:
        return (0,)


@dataclass(frozen=True)
class AnyAction(Program):
    """Choice over every ground action applicable in the current state."""

    def sort_key(self) -> SortKey:
        return (1,)


@dataclass(frozen=True)
class Act(Program):
    action: ActionTerm

    def sort_key(self) -> SortKey:
        return (2, self.action.sort_key())


@dataclass(frozen=True)
class Seq(Program):
    first: Program
    second: Program

    def sort_key(self) -> SortKey:
        # Folded from the end of the chain; same value as the nested definition.
        firsts: list[Program] = []
        tail: Program = self
        while isinstance(tail, Seq):
            firsts.append(tail.first)
            tail = tail.second
        key = tail.sort_key()
        for first in reversed(firsts):
            key = (3, first.sort_key(), key)
        return key


@dataclass(frozen=True)
class Choice(Program):
    """Nondeterministic choice, n-ary. Canonical choices are sorted and duplicate-free."""

    options: tuple[Program, ...]

    def __post_init__(self) -> None:
        if not self.options:
            raise ValueError("choice needs at least one option")

    def sort_key(self) -> SortKey:
        return (4, tuple(o.sort_key() for o in self.options))


@dataclass(frozen=True)
class Par(Program):
    """Interleaving concurrency."""

    left: Program
    right: Program

    def sort_key(self) -> SortKey:
        return (5, self.left.sort_key(), self.right.sort_key())


@dataclass(frozen=True)
class Cond(Program):
    """``?(q){p}``: run p under every substitution that satisfies q."""

    query: Query
    body: Program

    def sort_key(self) -> SortKey:
        return (6, self.query.sort_key(), self.body.sort_key())


@dataclass(frozen=True)
class NegCond(Program):
    """``!?(q){p}``: run p only if q does not hold."""

    query: Query
    body: Program

    def sort_key(self) -> SortKey:
        return (7, self.query.sort_key(), self.body.sort_key())


@dataclass(frozen=True)
class Loop(Program):
    """``while(q){p}``. The body is kept folded; interpretation unrolls one step at a time."""

    query: Query
    body: Program

    def sort_key(self) -> SortKey:
        return (8, self.query.sort_key(), self.body.sort_key())


EPSILON = Epsilon()
ANY = AnyAction()


def act(name: str, *args: Term) -> Act:
    return Act(ActionTerm(name, tuple(args)))


def seq(*programs: Program) -> Program:
    """Right-associated sequence of the given programs (ε for none)."""
    if not programs:
        return EPSILON
    result = programs[-1]
    for p in reversed(programs[:-1]):
        result = Seq(p, result)
    return result


def choice(*programs: Program) -> Program:
    if len(programs) == 1:
        return programs[0]
    return Choice(tuple(programs))


def universal_program() -> Program:
    """``while (true) { any }``: every applicable action at every step."""
    return Loop(TRUE_QUERY, ANY)


def _seq(first: Program, second: Program) -> Program:
    # Both arguments canonical. ε is a left unit only, and in a canonical
    # chain it can only sit in the last position.
    parts: list[Program] = []
    while isinstance(first, Seq):
        parts.append(first.first)
        first = first.second
    parts.append(first)
    result = second
    for part in reversed(parts):
        if not isinstance(part, Epsilon):
            result = Seq(part, result)
    return result


def _choice(options: list[Program]) -> Program:
    flat: dict[SortKey, Program] = {}
    for option in options:
        members = option.options if isinstance(option, Choice) else (option,)
        for member in members:
            flat.setdefault(member.sort_key(), member)
    ordered = [flat[key] for key in sorted(flat)]
    if len(ordered) == 1:
        return ordered[0]
    return Choice(tuple(ordered))


def canonicalize(p: Program) -> Program:
    """
    Return the structural canonical form of a program.

    Sequences are right-associated with ε removed as a left unit, choices are
    flattened, sorted and deduplicated. The function is idempotent.
    """
    match p:
        case Epsilon() | AnyAction() | Act():
            return p
        case Seq():
            # Walked along the right spine; long action sequences stay off the stack.
            firsts: list[Program] = []
            tail: Program = p
            while isinstance(tail, Seq):
                firsts.append(tail.first)
                tail = tail.second
            result = canonicalize(tail)
            for first in reversed(firsts):
                result = _seq(canonicalize(first), result)
            return result
        case Choice(options):
            return _choice([canonicalize(o) for o in options])
        case Par(left, right):
            return Par(canonicalize(left), canonicalize(right))
        case Cond(q, body):
            return Cond(q, canonicalize(body))
        case NegCond(q, body):
            return NegCond(q, canonicalize(body))
        case Loop(q, body):
            return Loop(q, canonicalize(body))
    raise TypeError(f"not a program: {p!r}")


def program_equals(p1: Program, p2: Program) -> bool:
    """Syntactic equality after canonicalization."""
    return canonicalize(p1) == canonicalize(p2)


def is_condition_free(p: Program) -> bool:
    return first_conditional(p) is None


def first_conditional(p: Program) -> Union[str, None]:
    """Name of the first state-dependent construct found in p, if any."""
    match p:
        case Epsilon() | Act():
            return None
        case AnyAction():
            return "any"
        case Cond():
            return "?(...)"
        case NegCond():
            return "!?(...)"
        case Loop():
            return "while"
        case Seq(a, b) | Par(a, b):
            return first_conditional(a) or first_conditional(b)
        case Choice(options):
            for option in options:
                found = first_conditional(option)
                if found:
                    return found
            return None
    raise TypeError(f"not a program: {p!r}")


def program_size(p: Program) -> int:
    """Number of constructor nodes in p."""
    match p:
        case Epsilon() | AnyAction() | Act():
            return 1
        case Seq(a, b) | Par(a, b):
            return 1 + program_size(a) + program_size(b)
        case Choice(options):
            return 1 + sum(program_size(o) for o in options)
        case Cond(_, body) | NegCond(_, body) | Loop(_, body):
            return 1 + program_size(body)
    raise TypeError(f"not a program: {p!r}")
