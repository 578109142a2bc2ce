from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdl.bench import CORPUS_DIR
from pdl.kb import Constant, DefaultRule, DefaultTheory, Literal, StrictRule, Variable, lit
from pdl.parser import ParseError, format_theory, parse_kb, parse_literal, tokenize

ROW_ONE = ("penguin(tweety). bird(X) :- penguin(X). -flies(X) :- penguin(X). "
           "default d0 [order=1]: bird(X) : flies(X) / flies(X).")


def test_row_one_text():
    theory = parse_kb(ROW_ONE)
    assert theory.facts == {lit("penguin", "tweety")}
    assert len(theory.strict_rules) == 2 and len(theory.defaults) == 1
    d = theory.defaults[0]
    assert (d.name, d.order) == ("d0", 1)
    assert d.justifications == (Literal("flies", (Variable("X"),)),)


def test_empty_input():
    assert parse_kb("") == DefaultTheory()
    assert parse_kb("# only a comment\n") == DefaultTheory()


def test_disjunctive_fact():
    theory = parse_kb("broken(left) | broken(right).")
    (d,) = theory.disjunctive_facts
    assert d.disjuncts == (lit("broken", "left"), lit("broken", "right"))
    assert theory.constants == {Constant("left"), Constant("right")}


def test_true_prerequisite_and_multiple_justifications():
    theory = parse_kb("default u: true : useable(X), -broken(X) / useable(X).")
    d = theory.defaults[0]
    assert d.prerequisite == ()
    assert [str(j) for j in d.justifications] == ["useable(X)", "-broken(X)"]


def test_missing_order_defaults_to_zero():
    assert parse_kb("default d: p(X) : q(X) / q(X).").defaults[0].order == 0


def test_decimal_order_is_exact():
    assert parse_kb("default d [order=2.5]: p(X) : q(X) / q(X).").defaults[0].order == Fraction(5, 2)


def test_negated_literal_in_strict_body_after_turnstile():
    theory = parse_kb("p(X) :- -q(X).")
    assert theory.strict_rules[0].body == (Literal("q", (Variable("X"),), True),)


def test_default_with_negated_prerequisite():
    d = parse_kb("default d: -sunny(X) : snow(X) / snow(X).").defaults[0]
    assert d.prerequisite == (Literal("sunny", (Variable("X"),), True),)


def test_strict_rules_get_sequential_names():
    theory = parse_kb("q(X) :- p(X). r(X) :- q(X).")
    assert [r.name for r in theory.strict_rules] == ["s#1", "s#2"]


@pytest.mark.parametrize("text, fragment, line, column", [
    ("p(X).", "ground", 1, 1),
    ("p(a) | q(X).", "ground", 1, 1),
    ("q(Y) :- p(X).", "unsafe", 1, 1),
    ("p(a)\nq(b).", "'.'", 2, 1),
    ("p(a).\n  default d: p(X) : q(X) / q(X).\ndefault d: p(X) : r(X) / r(X).", "duplicate", 3, 9),
    ("p(a) ~ q.", "unexpected character", 1, 6),
    ("default d [prio=1]: p(X) : q(X) / q(X).", "order", 1, 12),
    ("default d: p(X) : q(X) q(X).", "'/'", 1, 24),
])
def test_errors_carry_spans(text, fragment, line, column):
    with pytest.raises(ParseError) as err:
        parse_kb(text)
    assert fragment in err.value.message
    assert (err.value.span.line, err.value.span.column) == (line, column)


def test_first_error_wins():
    with pytest.raises(ParseError) as err:
        parse_kb("p(X).\nq(Y) :- r(Z).")
    assert err.value.span.line == 1


def test_spans_are_ordered_and_disjoint():
    tokens = tokenize(ROW_ONE)
    for a, b in zip(tokens, tokens[1:]):
        assert a.span.end <= b.span.start


def test_parse_literal():
    assert parse_literal("-flies(tweety)") == lit("flies", "tweety", negative=True)
    with pytest.raises(ParseError):
        parse_literal("flies(X)")
    with pytest.raises(ParseError):
        parse_literal("flies(tweety) extra")
    assert parse_literal("flies(X)", ground=False).args == (Variable("X"),)


@pytest.mark.parametrize("path", sorted(CORPUS_DIR.glob("*.bdl")), ids=lambda p: p.stem)
def test_corpus_round_trips(path):
    theory = parse_kb(path.read_text())
    assert parse_kb(format_theory(theory)) == theory


preds = st.sampled_from(["p", "q", "takesPlace"])
cnames = st.sampled_from(["a", "b", "tweety"])
vnames = st.sampled_from(["X", "Y"])


@st.composite
def theories(draw):
    def ground():
        return Literal(draw(preds), tuple(Constant(c) for c in draw(st.lists(cnames, min_size=1, max_size=2))),
                       draw(st.booleans()))

    def open_lit(vs):
        return Literal(draw(preds), tuple(Variable(v) for v in vs), draw(st.booleans()))

    facts = frozenset(draw(st.lists(st.builds(ground), max_size=3)))
    rules = []
    for i in range(draw(st.integers(0, 2))):
        vs = draw(st.lists(vnames, min_size=1, max_size=2))
        rules.append(StrictRule(open_lit(vs), (open_lit(vs),), f"s#{i + 1}"))
    defaults = []
    for i in range(draw(st.integers(0, 3))):
        vs = draw(st.lists(vnames, min_size=1, max_size=2))
        pre = tuple(open_lit(vs) for _ in range(draw(st.integers(0, 2))))
        order = Fraction(draw(st.integers(0, 40)), draw(st.sampled_from([1, 2, 4])))
        defaults.append(DefaultRule(f"d{i}", pre, (open_lit(vs),), (open_lit(vs),), order))
    return DefaultTheory(facts, frozenset(), tuple(rules), tuple(defaults))


@settings(max_examples=150)
@given(theories())
def test_pretty_print_round_trip(theory):
    text = format_theory(theory)
    once = parse_kb(text)
    assert once == theory
    assert format_theory(once) == text
    assert parse_kb(format_theory(once)) == once
