"""Normal form of condition-free programs and the potential-set container."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from ..errors import NotConditionFreeError, UnboundActionVariableError
from .program import (
    EPSILON,
    Act,
    Choice,
    Epsilon,
    Par,
    Program,
    Seq,
    SortKey,
    _seq,
    canonicalize,
    choice,
    first_conditional,
)
from .terms import ActionTerm


@dataclass(frozen=True)
class NormalEntry:
    """One summand ``head ; tail`` of a program in normal form."""

    head: ActionTerm
    tail: Program

    def __post_init__(self) -> None:
        if not self.head.is_ground:
            raise UnboundActionVariableError(f"non-ground head action: {self.head}")

    def sort_key(self) -> tuple[object, SortKey]:
        return (self.head.sort_key(), self.tail.sort_key())

    def as_program(self) -> Program:
        return Seq(Act(self.head), self.tail)

    def __str__(self) -> str:
        from .parser import format_program

        return f"{self.head} ; {format_program(self.tail)}"


class PotentialSet:
    """
    Immutable set of normal-form entries.

    Tails are canonicalized on insertion and entries are kept sorted, so two
    sets are equal iff they contain the same (head, canonical tail) pairs and
    iteration order never depends on construction order or hashing.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[NormalEntry] = ()) -> None:
        unique: dict[tuple[object, SortKey], NormalEntry] = {}
        for entry in entries:
            canonical = NormalEntry(entry.head, canonicalize(entry.tail))
            unique.setdefault(canonical.sort_key(), canonical)
        self._entries: tuple[NormalEntry, ...] = tuple(unique[k] for k in sorted(unique))

    @classmethod
    def of(cls, pairs: Iterable[tuple[ActionTerm, Program]]) -> PotentialSet:
        return cls(NormalEntry(head, tail) for head, tail in pairs)

    @property
    def entries(self) -> tuple[NormalEntry, ...]:
        return self._entries

    def union(self, other: PotentialSet) -> PotentialSet:
        return PotentialSet(self._entries + other._entries)

    def __iter__(self) -> Iterator[NormalEntry]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __getitem__(self, index: int) -> NormalEntry:
        return self._entries[index]

    def __contains__(self, item: object) -> bool:
        if not isinstance(item, NormalEntry):
            return False
        return NormalEntry(item.head, canonicalize(item.tail)) in self._entries

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PotentialSet):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(self._entries)

    def __repr__(self) -> str:
        return "PotentialSet({" + ", ".join(str(e) for e in self._entries) + "})"


EMPTY_POTENTIAL = PotentialSet()


def par_absorbing(left: Program, right: Program) -> Program:
    """Interleaving that drops a finished (ε) operand."""
    if isinstance(left, Epsilon):
        return right
    if isinstance(right, Epsilon):
        return left
    return Par(left, right)


def sequence_tail(tail: Program, rest: Program) -> Program:
    """Canonical ``tail ; rest`` for an already canonical tail."""
    return _seq(tail, canonicalize(rest))


def reduce_to_normal_form(p: Program) -> PotentialSet:
    """
    Rewrite a condition-free program into its normal form.

    The result is the set of (head, tail) pairs whose choice is reachable from
    p with the rewrite rules

        ε;p = p                      p + p = p
        (p1 + p2);p = p1;p + p2;p    p;(p1 + p2) = p;p1 + p;p2
        p1 || (p2 + p3) = (p1 || p2) + (p1 || p3)
        (a1;p1) || (a2;p2) = a1;(p1 || a2;p2) + a2;(a1;p1 || p2)

    applied to the leading action position. ε yields the empty set.

    Raises:
        NotConditionFreeError: if p contains ?, !?, while or any
        UnboundActionVariableError: if an action is not ground
    """
    construct = first_conditional(p)
    if construct is not None:
        raise NotConditionFreeError(construct)
    return PotentialSet(_normal_entries(canonicalize(p)))


def _normal_entries(p: Program) -> list[NormalEntry]:
    match p:
        case Epsilon():
            return []
        case Act(a):
            return [NormalEntry(a, EPSILON)]
        case Seq(first, second):
            return [
                NormalEntry(e.head, sequence_tail(canonicalize(e.tail), second))
                for e in _normal_entries(first)
            ]
        case Choice(options):
            return [e for option in options for e in _normal_entries(option)]
        case Par(left, right):
            from_left = [
                NormalEntry(e.head, par_absorbing(e.tail, right)) for e in _normal_entries(left)
            ]
            from_right = [
                NormalEntry(e.head, par_absorbing(left, e.tail)) for e in _normal_entries(right)
            ]
            return from_left + from_right
    raise NotConditionFreeError(type(p).__name__)


def to_normal_program(entries: PotentialSet) -> Program:
    """The normal-form program Σ (a ; p') for a potential set (ε if empty)."""
    if not entries:
        return EPSILON
    return choice(*(e.as_program() for e in entries))


def action_sequences(p: Program, max_length: Optional[int] = None) -> set[tuple[ActionTerm, ...]]:
    """
    All maximal action sequences of a condition-free program.

    Expands the normal form recursively until every branch reaches ε. With
    ``max_length`` set, branches are cut at that many actions.
    """
    results: set[tuple[ActionTerm, ...]] = set()

    def walk(program: Program, prefix: tuple[ActionTerm, ...]) -> None:
        if max_length is not None and len(prefix) >= max_length:
            results.add(prefix)
            return
        entries = reduce_to_normal_form(program)
        if not entries:
            results.add(prefix)
            return
        for entry in entries:
            walk(entry.tail, prefix + (entry.head,))

    walk(p, ())
    return results
