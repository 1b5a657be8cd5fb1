"""The MCAP action programming language: syntax, normal form and interpretation."""

from .normal_form import (
    EMPTY_POTENTIAL,
    NormalEntry,
    PotentialSet,
    action_sequences,
    reduce_to_normal_form,
    to_normal_program,
)
from .parser import (
    PROGRAM_SUFFIX,
    SourceText,
    format_program,
    load_program,
    parse_program,
    parse_query,
)
from .program import (
    ANY,
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
    act,
    canonicalize,
    choice,
    is_condition_free,
    program_equals,
    seq,
    universal_program,
)
from .semantics import can_terminate, match_rows, pot, solve_query, substitute
from .terms import (
    EMPTY_SUBSTITUTION,
    TRUE_QUERY,
    ActionTerm,
    Literal,
    Query,
    Substitution,
    Term,
    action,
    atom,
    is_variable,
    query,
)

__all__ = [
    "ANY",
    "EMPTY_POTENTIAL",
    "EMPTY_SUBSTITUTION",
    "EPSILON",
    "PROGRAM_SUFFIX",
    "TRUE_QUERY",
    "Act",
    "ActionTerm",
    "AnyAction",
    "Choice",
    "Cond",
    "Epsilon",
    "Literal",
    "Loop",
    "NegCond",
    "NormalEntry",
    "Par",
    "PotentialSet",
    "Program",
    "Query",
    "Seq",
    "SourceText",
    "Substitution",
    "Term",
    "act",
    "action",
    "action_sequences",
    "atom",
    "can_terminate",
    "canonicalize",
    "choice",
    "format_program",
    "is_condition_free",
    "is_variable",
    "load_program",
    "match_rows",
    "parse_program",
    "parse_query",
    "pot",
    "program_equals",
    "query",
    "reduce_to_normal_form",
    "seq",
    "solve_query",
    "substitute",
    "to_normal_program",
    "universal_program",
]
