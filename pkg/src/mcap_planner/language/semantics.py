"""Substitution, query solving and the potential-program function ``pot``."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, Callable, Iterable, Optional

from ..errors import PotBudgetExceededError, UnboundActionVariableError, UnsafeQueryError
from .normal_form import PotentialSet, NormalEntry, par_absorbing, sequence_tail
from .program import (
    EPSILON,
    Act,
    AnyAction,
    Choice,
    Cond,
    Epsilon,
    Loop,
    NegCond,
    Par,
    Program,
    Seq,
    canonicalize,
)
from .terms import (
    EMPTY_SUBSTITUTION,
    Literal,
    Query,
    Substitution,
    Term,
    is_variable,
)

if TYPE_CHECKING:
    from ..core.domain import GenerativeDomain

AtomEvaluator = Callable[[Literal], frozenset[Substitution]]


def substitute(theta: Substitution, p: Program) -> Program:
    """
    Replace every variable bound in theta, in action and query arguments.

    Unbound variables are left in place; programs never introduce binders, so
    no renaming is needed.
    """
    if not theta:
        return p
    match p:
        case Epsilon() | AnyAction():
            return p
        case Act(a):
            return Act(a.substitute(theta))
        case Seq(first, second):
            return Seq(substitute(theta, first), substitute(theta, second))
        case Choice(options):
            return Choice(tuple(substitute(theta, o) for o in options))
        case Par(left, right):
            return Par(substitute(theta, left), substitute(theta, right))
        case Cond(q, body):
            return Cond(q.substitute(theta), substitute(theta, body))
        case NegCond(q, body):
            return NegCond(q.substitute(theta), substitute(theta, body))
        case Loop(q, body):
            return Loop(q.substitute(theta), substitute(theta, body))
    raise TypeError(f"not a program: {p!r}")


def match_rows(lit: Literal, rows: Iterable[tuple[Term, ...]]) -> frozenset[Substitution]:
    """
    Match a literal's arguments against the ground tuples of a relation.

    Constants must match exactly, variables bind (consistently when repeated).
    A ground literal yields ``{∅}`` if some row matches, ``∅`` otherwise.
    """
    results: set[Substitution] = set()
    for row in rows:
        if len(row) != len(lit.args):
            continue
        binding: dict[str, Term] = {}
        for arg, value in zip(lit.args, row):
            if isinstance(arg, str) and is_variable(arg):
                if binding.setdefault(arg, value) != value:
                    break
            elif arg != value:
                break
        else:
            results.add(Substitution.of(binding))
    return frozenset(results)


def solve_query(q: Query, evaluate_atom: AtomEvaluator) -> frozenset[Substitution]:
    """
    Enumerate the substitutions under which a conjunctive query holds.

    Positive literals are evaluated left to right and joined; negated literals
    filter and must be ground once the preceding literals are bound.

    Raises:
        UnsafeQueryError: if a negated literal still has free variables
    """
    thetas: list[Substitution] = [EMPTY_SUBSTITUTION]
    for lit in q.literals:
        extended: dict[Substitution, None] = {}
        for theta in thetas:
            bound = lit.substitute(theta)
            if lit.negated:
                if not bound.is_ground:
                    raise UnsafeQueryError(f"negated literal {bound} is not ground in query {q}")
                positive = Literal(bound.name, bound.args)
                if not evaluate_atom(positive):
                    extended.setdefault(theta, None)
                continue
            for sigma in evaluate_atom(bound):
                merged = theta.merge(sigma)
                if merged is not None:
                    extended.setdefault(merged, None)
        thetas = list(extended)
        if not thetas:
            break
    return frozenset(thetas)


class _Interpreter:
    """One evaluation of ``pot``: holds the state, domain, flags and step budget."""

    def __init__(
        self,
        state: Any,
        domain: GenerativeDomain[Any],
        transparent_termination: bool,
        max_steps: Optional[int],
    ) -> None:
        self._state = state
        self._domain = domain
        self._transparent = transparent_termination
        self._max_steps = max_steps
        self._steps = 0
        self._queries: dict[Query, frozenset[Substitution]] = {}

    def _tick(self) -> None:
        self._steps += 1
        if self._max_steps is not None and self._steps > self._max_steps:
            raise PotBudgetExceededError(f"pot exceeded {self._max_steps} steps")

    def holds(self, q: Query) -> frozenset[Substitution]:
        cached = self._queries.get(q)
        if cached is None:
            cached = self._domain.eval_query(q, self._state)
            self._queries[q] = cached
        return cached

    def pot(self, p: Program) -> list[NormalEntry]:
        self._tick()
        match p:
            case Epsilon():
                return []
            case Act(a):
                if not a.is_ground:
                    raise UnboundActionVariableError(f"action {a} has unbound variables")
                return [NormalEntry(a, EPSILON)]
            case AnyAction():
                return [NormalEntry(a, EPSILON) for a in self._domain.ground_actions(self._state)]
            case Seq(first, second):
                entries = self._sequence(first, second)
                if self._transparent and self.can_terminate(first):
                    entries += self.pot(second)
                return entries
            case Choice(options):
                return [e for option in options for e in self.pot(option)]
            case Par(left, right):
                from_left = [
                    NormalEntry(e.head, par_absorbing(e.tail, right)) for e in self.pot(left)
                ]
                from_right = [
                    NormalEntry(e.head, par_absorbing(left, e.tail)) for e in self.pot(right)
                ]
                return from_left + from_right
            case Cond(q, body):
                return [e for theta in self.holds(q) for e in self.pot(substitute(theta, body))]
            case NegCond(q, body):
                return [] if self.holds(q) else self.pot(body)
            case Loop(q, body):
                # One unfolding: ?(q){body} ; while(q){body}. The loop in the
                # tail stays folded, and the zero-action fall-through into the
                # same loop is never taken.
                return self._sequence(Cond(q, body), p)
        raise TypeError(f"not a program: {p!r}")

    def _sequence(self, first: Program, second: Program) -> list[NormalEntry]:
        return [
            NormalEntry(e.head, sequence_tail(canonicalize(e.tail), second))
            for e in self.pot(first)
        ]

    def can_terminate(self, p: Program) -> bool:
        """Whether p may finish in the current state without executing an action."""
        self._tick()
        match p:
            case Epsilon():
                return True
            case Act() | AnyAction():
                return False
            case Seq(a, b) | Par(a, b):
                return self.can_terminate(a) and self.can_terminate(b)
            case Choice(options):
                return any(self.can_terminate(o) for o in options)
            case Cond(q, body):
                thetas = self.holds(q)
                if not thetas:
                    return True
                return any(self.can_terminate(substitute(t, body)) for t in thetas)
            case NegCond(q, body):
                return bool(self.holds(q)) or self.can_terminate(body)
            case Loop(q, _):
                return not self.holds(q)
        raise TypeError(f"not a program: {p!r}")


def pot(
    state: Any,
    p: Program,
    domain: GenerativeDomain[Any],
    *,
    transparent_termination: bool = False,
    max_steps: Optional[int] = None,
) -> PotentialSet:
    """
    Compute the potential programs of p in a state.

    Each entry pairs a ground action executable now with the program that
    remains after it. Conditionals are resolved against the state through the
    domain's query evaluation, ``any`` expands to the domain's ground actions,
    and loops are unrolled exactly once.

    Args:
        state: Current domain state
        p: Program to interpret
        domain: Domain providing ground actions and query evaluation
        transparent_termination: Let ``p ; p'`` continue with p' when p can
            terminate in the state (off: a finished or blocked p blocks p')
        max_steps: Optional bound on interpretation steps

    Returns:
        The potential set, empty when p is terminated or blocked

    Raises:
        UnboundActionVariableError: if a head action is not ground
        PotBudgetExceededError: if max_steps is exceeded
    """
    interpreter = _Interpreter(state, domain, transparent_termination, max_steps)
    return PotentialSet(interpreter.pot(p))


def can_terminate(state: Any, p: Program, domain: GenerativeDomain[Any]) -> bool:
    """Whether p can finish in state without acting (used by transparent termination)."""
    return _Interpreter(state, domain, True, None).can_terminate(p)
