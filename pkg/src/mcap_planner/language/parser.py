"""Concrete syntax for MCAP programs: lark grammar, AST builder and formatter.

Operators bind ``;`` tightest, then ``||``, then ``+``. ``#`` starts a comment
that runs to the end of the line.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Optional, Union

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, UnexpectedToken, VisitError

from ..errors import ParseError
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
    canonicalize,
    seq,
)
from .terms import ActionTerm, Literal, Query, Term

PROGRAM_SUFFIX = ".mcap"

# Open brackets plus interleavings per bracket level.
MAX_NESTING = 200

GRAMMAR = r"""
    program: par ("+" par)*
    par: seq ("||" seq)*
    seq: atom (";" atom)*

    ?atom: "eps"                   -> eps
         | "any"                   -> any_action
         | action
         | "?" guard               -> cond
         | "!?" guard              -> neg_cond
         | "while" guard           -> loop
         | "(" program ")"

    guard: "(" query ")" "{" program "}"
    action: NAME [arguments]
    arguments: "(" term ("," term)* ")"
    term: NAME | VARIABLE | INT

    query: conjunct ("&" conjunct)*
    ?conjunct: "true"              -> true_literal
             | [NOT] NAME [arguments] -> literal

    NOT: "!"
    NAME: /[a-z_][A-Za-z0-9_]*/
    VARIABLE: /[A-Z][A-Za-z0-9_]*/
    INT: /[0-9]+/
    COMMENT: /#[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_PATTERN_NAMES = {
    "NAME": "a name",
    "VARIABLE": "a Variable",
    "INT": "an integer",
    "$END": "end of input",
}

_OPENERS = frozenset("({")
_CLOSERS = frozenset(")}")


@dataclass(frozen=True)
class SourceText:
    """Program text plus the name it is reported under."""

    text: str
    name: str = "<string>"


class ProgramBuilder(Transformer[Token, Any]):
    """Builds the AST bottom-up while the LALR parser reduces."""

    def program(self, options: list[Program]) -> Program:
        return options[0] if len(options) == 1 else Choice(tuple(options))

    def par(self, parts: list[Program]) -> Program:
        result = parts[0]
        for part in parts[1:]:
            result = Par(result, part)
        return result

    def seq(self, parts: list[Program]) -> Program:
        return seq(*parts)

    def eps(self, _: list[Any]) -> Program:
        return EPSILON

    def any_action(self, _: list[Any]) -> Program:
        return ANY

    def action(self, children: list[Any]) -> Program:
        name, args = children
        return Act(ActionTerm(str(name), args or ()))

    def arguments(self, terms: list[Term]) -> tuple[Term, ...]:
        return tuple(terms)

    def term(self, children: list[Token]) -> Term:
        (tok,) = children
        return int(tok) if tok.type == "INT" else str(tok)

    def guard(self, children: list[Any]) -> tuple[Query, Program]:
        q, body = children
        return q, body

    def cond(self, children: list[Any]) -> Program:
        return Cond(*children[-1])

    def neg_cond(self, children: list[Any]) -> Program:
        return NegCond(*children[-1])

    def loop(self, children: list[Any]) -> Program:
        return Loop(*children[-1])

    def query(self, conjuncts: list[Optional[Literal]]) -> Query:
        # "true" conjuncts are dropped; an all-true query is the empty conjunction.
        return Query(tuple(lit for lit in conjuncts if lit is not None))

    def true_literal(self, _: list[Any]) -> None:
        return None

    def literal(self, children: list[Any]) -> Literal:
        negated, name, args = children
        return Literal(str(name), args or (), negated is not None)


class ProgramParser:
    """LALR parser for programs and queries with ParseError diagnostics."""

    def __init__(self) -> None:
        self._lark = Lark(
            GRAMMAR,
            parser="lalr",
            lexer="basic",
            start=["program", "query"],
            transformer=ProgramBuilder(),
            maybe_placeholders=True,
        )

    def parse(self, src: Union[str, SourceText], start: str) -> Any:
        text = src.text if isinstance(src, SourceText) else src
        try:
            self._check_nesting(self._lark.lex(text))
            return self._lark.parse(text, start=start)
        except UnexpectedInput as exc:
            raise self._to_parse_error(exc) from None
        except VisitError as exc:
            raise exc.orig_exc from None

    def _check_nesting(self, tokens: Iterable[Token]) -> None:
        # Runs on the token stream so that no deep AST is ever built.
        levels = [0]
        for tok in tokens:
            if tok.value in _OPENERS:
                levels.append(0)
            elif tok.value in _CLOSERS and len(levels) > 1:
                levels.pop()
            elif tok.value == "||":
                levels[-1] += 1
            else:
                continue
            if len(levels) - 1 + sum(levels) > MAX_NESTING:
                raise ParseError(
                    tok.line or 1,
                    tok.column or 1,
                    f"at most {MAX_NESTING} levels of nesting",
                    str(tok.value),
                )

    def _to_parse_error(self, exc: UnexpectedInput) -> ParseError:
        line = exc.line if isinstance(exc.line, int) and exc.line > 0 else 1
        column = exc.column if isinstance(exc.column, int) and exc.column > 0 else 1
        if isinstance(exc, UnexpectedCharacters):
            return ParseError(line, column, self._describe(exc.allowed or ()), exc.char)
        if isinstance(exc, UnexpectedToken):
            found = "<end of input>" if exc.token.type == "$END" else str(exc.token.value)
            return ParseError(line, column, self._describe(exc.expected), found)
        return ParseError(line, column, "valid program text", "<unknown>")

    def _describe(self, names: Iterable[str]) -> str:
        labels = set()
        for name in names:
            if name in _PATTERN_NAMES:
                labels.add(_PATTERN_NAMES[name])
                continue
            pattern = self._lark.get_terminal(name).pattern
            labels.add(repr(pattern.value) if pattern.type == "str" else name)
        if not labels:
            return "a token"
        ordered = sorted(labels)
        return ordered[0] if len(ordered) == 1 else "one of " + ", ".join(ordered)


_PARSER = ProgramParser()


def parse_program(src: Union[str, SourceText]) -> Program:
    """
    Parse MCAP program text into an AST.

    Args:
        src: Program text or a SourceText carrying a name for diagnostics

    Returns:
        The parsed program (not canonicalized)

    Raises:
        ParseError: on any syntax violation, with line/column information
    """
    result = _PARSER.parse(src, "program")
    assert isinstance(result, Program)
    return result


def parse_query(src: Union[str, SourceText]) -> Query:
    """Parse a conjunctive query such as ``at_safe & carrying(V)``."""
    result = _PARSER.parse(src, "query")
    assert isinstance(result, Query)
    return result


def load_program(path: Union[str, Path]) -> Program:
    """Read and parse a ``.mcap`` file."""
    file_path = Path(path)
    raw = file_path.read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = raw.count(b"\n", 0, exc.start) + 1
        column = exc.start - (raw.rfind(b"\n", 0, exc.start) + 1) + 1
        raise ParseError(line, column, "UTF-8 text", f"byte 0x{raw[exc.start]:02x}") from None
    return parse_program(SourceText(text, name=str(file_path)))


def format_program(p: Program) -> str:
    """Canonical text with every compound parenthesized; ``parse_program`` inverts it."""
    return _format(canonicalize(p))


def _seq_chain(p: Seq) -> list[Program]:
    parts: list[Program] = []
    current: Program = p
    while isinstance(current, Seq):
        parts.append(current.first)
        current = current.second
    parts.append(current)
    return parts


def _format(p: Program) -> str:
    match p:
        case Epsilon():
            return "eps"
        case AnyAction():
            return "any"
        case Act(action):
            return str(action)
        case Seq():
            return "(" + " ; ".join(_format(part) for part in _seq_chain(p)) + ")"
        case Choice(options):
            return "(" + " + ".join(_format(o) for o in options) + ")"
        case Par(left, right):
            return f"({_format(left)} || {_format(right)})"
        case Cond(q, body):
            return f"?({q}) {{ {_format(body)} }}"
        case NegCond(q, body):
            return f"!?({q}) {{ {_format(body)} }}"
        case Loop(q, body):
            return f"while ({q}) {{ {_format(body)} }}"
    raise TypeError(f"not a program: {p!r}")
