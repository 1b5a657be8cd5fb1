"""Tests for program syntax, canonical form, normal form and the parser."""

import itertools

import pytest

from src.mcap_planner.core import RandomSource
from src.mcap_planner.errors import NotConditionFreeError, ParseError
from src.mcap_planner.language import (
    ANY,
    EPSILON,
    TRUE_QUERY,
    Act,
    ActionTerm,
    AnyAction,
    Choice,
    Cond,
    Epsilon,
    Literal,
    Loop,
    NegCond,
    Par,
    Program,
    Query,
    Seq,
    Term,
    act,
    action,
    action_sequences,
    atom,
    canonicalize,
    format_program,
    is_condition_free,
    load_program,
    parse_program,
    parse_query,
    program_equals,
    query,
    reduce_to_normal_form,
    seq,
    to_normal_program,
)
from src.mcap_planner.language.parser import MAX_NESTING
from src.mcap_planner.language.program import program_size
from tests.conftest import ROOT

A, B, C, D = act("a"), act("b"), act("c"), act("d")


def heads_and_tails(entries) -> set[tuple[str, object]]:
    return {(str(e.head), e.tail) for e in entries}


class TestCanonicalForm:
    """Tests for canonicalize and program_equals."""

    def test_epsilon_is_left_unit(self):
        """ε;a reduces to a."""
        assert canonicalize(Seq(EPSILON, A)) == A

    def test_duplicate_choice_collapses(self):
        """a + a reduces to a."""
        assert canonicalize(Choice((A, A))) == A

    def test_choice_sorted(self):
        """Choice options follow the fixed term order."""
        assert canonicalize(Choice((B, A))) == Choice((A, B))

    def test_choice_flattened(self):
        """Nested choices merge into one."""
        nested = Choice((C, Choice((B, A))))
        assert canonicalize(nested) == Choice((A, B, C))

    def test_choice_is_a_set(self):
        assert program_equals(Choice((A, B)), Choice((B, A)))

    def test_sequence_right_associated(self):
        assert program_equals(Seq(Seq(A, B), C), Seq(A, Seq(B, C)))

    def test_epsilon_not_a_right_unit(self):
        """Only ε;p = p is a rewrite rule; p;ε stays distinct."""
        assert not program_equals(A, Seq(A, EPSILON))

    def test_idempotent(self):
        """Canonicalizing twice changes nothing."""
        p = Par(Choice((Seq(Seq(B, A), EPSILON), A)), Seq(EPSILON, Choice((D, C, D))))
        once = canonicalize(p)
        assert canonicalize(once) == once

    def test_program_size(self):
        assert program_size(Seq(A, Choice((B, C)))) == 5

    def test_condition_free(self):
        assert is_condition_free(Par(A, Seq(B, C)))
        assert not is_condition_free(Seq(A, ANY))
        assert not is_condition_free(Loop(TRUE_QUERY, A))


class TestNormalForm:
    """Tests for reduce_to_normal_form."""

    def test_epsilon_has_no_entries(self):
        assert len(reduce_to_normal_form(EPSILON)) == 0

    def test_single_action(self):
        entries = reduce_to_normal_form(A)
        assert heads_and_tails(entries) == {("a", EPSILON)}

    def test_choice_of_sequences(self):
        """(a + b);c distributes over the choice."""
        entries = reduce_to_normal_form(Seq(Choice((A, B)), C))
        assert heads_and_tails(entries) == {("a", C), ("b", C)}

    def test_par_of_two_actions(self):
        """a1 || a2 = a1;a2 + a2;a1."""
        a1, a2 = act("a1"), act("a2")
        entries = reduce_to_normal_form(Par(a1, a2))
        assert heads_and_tails(entries) == {("a1", a2), ("a2", a1)}

    def test_par_of_sequences(self):
        """(a1;p1) || (a2;p2) interleaves at the first action."""
        a1, p1, a2, p2 = act("a1"), act("p1"), act("a2"), act("p2")
        left, right = Seq(a1, p1), Seq(a2, p2)
        entries = reduce_to_normal_form(Par(left, right))
        assert heads_and_tails(entries) == {
            ("a1", Par(p1, right)),
            ("a2", Par(left, p2)),
        }

    def test_par_of_three_actions(self):
        """Three single actions give 3 entries and all 6 interleavings."""
        p = Par(Par(A, B), C)
        assert len(reduce_to_normal_form(p)) == 3
        sequences = action_sequences(p)
        expected = {tuple(action(n) for n in perm) for perm in itertools.permutations("abc")}
        assert sequences == expected

    def test_rejects_conditionals(self):
        with pytest.raises(NotConditionFreeError):
            reduce_to_normal_form(Seq(A, ANY))
        with pytest.raises(NotConditionFreeError):
            reduce_to_normal_form(Cond(query(atom("at_safe")), A))

    def test_normal_program_round_trip(self):
        """The normal program has the same normal form as the original."""
        p = Seq(Choice((A, B)), Par(C, D))
        entries = reduce_to_normal_form(p)
        assert reduce_to_normal_form(to_normal_program(entries)) == entries

    def test_normal_program_of_empty_set(self):
        assert to_normal_program(reduce_to_normal_form(EPSILON)) == EPSILON

    def test_max_length_cuts_sequences(self):
        sequences = action_sequences(seq(A, B, C), max_length=2)
        assert sequences == {(action("a"), action("b"))}


def language(p) -> set[tuple[str, ...]]:
    """Brute-force language of a condition-free program, by structure."""
    match p:
        case Epsilon():
            return {()}
        case Act(a):
            return {(str(a),)}
        case Seq(first, second):
            return {x + y for x in language(first) for y in language(second)}
        case Choice(options):
            return set().union(*(language(o) for o in options))
        case Par(left, right):
            return {w for x in language(left) for y in language(right) for w in shuffles(x, y)}
    raise TypeError(p)


def shuffles(x: tuple[str, ...], y: tuple[str, ...]) -> set[tuple[str, ...]]:
    if not x:
        return {y}
    if not y:
        return {x}
    return {(x[0],) + w for w in shuffles(x[1:], y)} | {(y[0],) + w for w in shuffles(x, y[1:])}


def programs(depth: int, leaves: tuple) -> list:
    """Every program built from the leaves with at most ``depth`` nested binary constructors."""
    if depth == 0:
        return list(leaves)
    smaller = programs(depth - 1, leaves)
    built = list(smaller)
    for left, right in itertools.product(smaller, repeat=2):
        built.extend([Seq(left, right), Choice((left, right)), Par(left, right)])
    return built


class TestNormalFormOracle:
    """Recursive expansion of the normal form against an independent language oracle."""

    def test_depth_one_over_three_actions(self):
        for p in programs(1, (A, B, C)):
            expanded = {tuple(str(a) for a in s) for s in action_sequences(p)}
            assert expanded == language(p), format_program(p)

    def test_depth_two_sample(self):
        """A deterministic sample of deeper programs over four actions."""
        candidates = programs(2, (A, B, C, D))
        for p in candidates[::97]:
            expanded = {tuple(str(a) for a in s) for s in action_sequences(p)}
            assert expanded == language(p), format_program(p)


class TestParser:
    """Tests for parse_program, parse_query and format_program."""

    def test_parse_epsilon(self):
        assert parse_program("eps") == EPSILON

    def test_precedence(self):
        """';' binds tighter than '+'."""
        a1, a2, a3 = act("a1"), act("a2"), act("a3")
        assert parse_program("a1 ; a2 + a3") == Choice((Seq(a1, a2), a3))

    def test_par_between_seq_and_choice(self):
        assert parse_program("a ; b || c + d") == Choice((Par(Seq(A, B), C), D))

    def test_loop_with_condition(self):
        p = parse_program("while (true) { ?(safe(self)) { drop(V) } }")
        assert p == Loop(TRUE_QUERY, Cond(query(atom("safe", "self")), act("drop", "V")))

    def test_negated_condition_and_literals(self):
        p = parse_program("!?(burning(P) & !safe(P)) { any }")
        expected_query = query(atom("burning", "P"), atom("safe", "P", negated=True))
        assert p == NegCond(expected_query, ANY)

    def test_integer_arguments(self):
        assert parse_program("move(3)") == Act(ActionTerm("move", (3,)))

    def test_comments_ignored(self):
        assert parse_program("# comment\na # trailing\n") == A

    def test_parse_query_true(self):
        assert parse_query("true") == TRUE_QUERY
        assert parse_query("true & at_safe") == query(atom("at_safe"))

    def test_format_examples(self):
        assert format_program(EPSILON) == "eps"
        assert format_program(Choice((A, B))) == "(a + b)"
        assert format_program(Loop(query(atom("q")), A)) == "while (q) { a }"

    @pytest.mark.parametrize(
        "text",
        [
            "a ; b ; c",
            "(a + b) ; (c || d)",
            "while (true) { any }",
            "?(carrying(V) & at_safe) { drop(V) } + !?(at_safe) { move(p1) }",
            "eps ; a || eps",
        ],
    )
    def test_format_parse_inverse(self, text):
        """Formatting then parsing gives back the canonical program."""
        p = parse_program(text)
        assert parse_program(format_program(p)) == canonicalize(p)

    def test_error_position(self):
        with pytest.raises(ParseError) as excinfo:
            parse_program("a ;\n  + b")
        assert excinfo.value.line == 2
        assert excinfo.value.column == 3
        assert excinfo.value.found == "+"

    def test_error_at_end(self):
        with pytest.raises(ParseError) as excinfo:
            parse_program("while (true) { a")
        assert excinfo.value.found == "<end of input>"

    def test_error_unknown_character(self):
        with pytest.raises(ParseError):
            parse_program("a $ b")

    def test_true_is_not_a_program(self):
        with pytest.raises(ParseError):
            parse_program("true")

    def test_bundled_programs_parse(self):
        """The shipped program files parse and the rescue file matches the built strategy."""
        from src.mcap_planner.domains import rescue_program

        rescue = load_program(ROOT / "programs" / "rescue.mcap")
        assert program_equals(rescue, rescue_program())
        assert load_program(ROOT / "programs" / "universal.mcap") == Loop(TRUE_QUERY, ANY)
        interleave = load_program(ROOT / "programs" / "interleave.mcap")
        assert is_condition_free(interleave)


class TestParserLimits:
    """Diagnostics for malformed, deep and very long input."""

    def test_expected_tokens_listed(self):
        with pytest.raises(ParseError) as excinfo:
            parse_program("a ; ; b")
        assert (excinfo.value.line, excinfo.value.column) == (1, 5)
        assert "'while'" in excinfo.value.expected
        assert "a name" in excinfo.value.expected

    def test_moderate_nesting_parses(self):
        assert parse_program("(" * 50 + "a" + ")" * 50) == A

    def test_deep_parentheses_rejected(self):
        with pytest.raises(ParseError) as excinfo:
            parse_program("(" * 3000 + "a" + ")" * 3000)
        assert excinfo.value.column == MAX_NESTING + 1
        assert excinfo.value.found == "("

    def test_deep_conditionals_rejected(self):
        with pytest.raises(ParseError):
            parse_program("?(q) { " * 300 + "a" + " }" * 300)

    def test_long_interleaving_rejected(self):
        with pytest.raises(ParseError):
            parse_program(" || ".join(["a"] * 500))

    def test_long_sequence_formats_flat(self):
        text = " ; ".join(["a"] * 2000)
        formatted = format_program(parse_program(text))
        assert formatted == f"({text})"
        assert format_program(parse_program(formatted)) == formatted

    def test_long_sequence_canonicalizes(self):
        long_seq = seq(EPSILON, *([A, B] * 1000))
        canonical = canonicalize(long_seq)
        assert canonical.first == A
        assert format_program(canonical) == "(" + " ; ".join(["a", "b"] * 1000) + ")"

    def test_program_file_not_utf8(self, tmp_path):
        path = tmp_path / "latin.mcap"
        path.write_bytes(b"a ;\n\xe9b")
        with pytest.raises(ParseError) as excinfo:
            load_program(path)
        assert (excinfo.value.line, excinfo.value.column) == (2, 1)
        assert excinfo.value.found == "byte 0xe9"


NAMES = ("a", "b", "move", "lift")
TERMS: tuple[Term, ...] = ("p1", "v0", "V", "P", 0, 7)
PREDICATE_NAMES = ("at_safe", "carrying", "burning")


def random_call_args(rng: RandomSource) -> tuple[Term, ...]:
    return tuple(rng.choice(TERMS) for _ in range(rng.integers(0, 3)))


def random_query(rng: RandomSource) -> Query:
    return Query(
        tuple(
            Literal(rng.choice(PREDICATE_NAMES), random_call_args(rng), rng.random() < 0.3)
            for _ in range(rng.integers(0, 3))
        )
    )


def random_ast(rng: RandomSource, depth: int) -> Program:
    """Random program over all nine constructors."""
    if depth == 0 or rng.random() < 0.15:
        leaf = rng.integers(0, 3)
        if leaf == 0:
            return EPSILON
        if leaf == 1:
            return ANY
        return Act(ActionTerm(rng.choice(NAMES), random_call_args(rng)))
    kind = rng.integers(0, 6)
    if kind == 0:
        return Seq(random_ast(rng, depth - 1), random_ast(rng, depth - 1))
    if kind == 1:
        return Choice(tuple(random_ast(rng, depth - 1) for _ in range(rng.integers(2, 4))))
    if kind == 2:
        return Par(random_ast(rng, depth - 1), random_ast(rng, depth - 1))
    guarded = (Cond, NegCond, Loop)[kind - 3]
    return guarded(random_query(rng), random_ast(rng, depth - 1))


class TestRandomPrograms:
    """Properties of canonicalize and the formatter on seeded random programs."""

    @pytest.mark.parametrize("seed", range(5))
    def test_format_parse_round_trip(self, seed):
        rng = RandomSource(seed)
        for _ in range(60):
            p = random_ast(rng, 6)
            assert program_equals(parse_program(format_program(p)), p), format_program(p)

    @pytest.mark.parametrize("seed", range(5))
    def test_canonicalize_idempotent(self, seed):
        rng = RandomSource(100 + seed)
        for _ in range(60):
            once = canonicalize(random_ast(rng, 6))
            assert canonicalize(once) == once

    def test_generator_covers_every_constructor(self):
        rng = RandomSource(0)
        seen: set[type] = set()
        stack = [random_ast(rng, 6) for _ in range(60)]
        while stack:
            p = stack.pop()
            seen.add(type(p))
            match p:
                case Seq(first, second) | Par(first, second):
                    stack += [first, second]
                case Choice(options):
                    stack += list(options)
                case Cond(_, body) | NegCond(_, body) | Loop(_, body):
                    stack.append(body)
        assert seen == {Epsilon, AnyAction, Act, Seq, Choice, Par, Cond, NegCond, Loop}
