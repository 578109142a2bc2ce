from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pdl.kb import (INF, Constant, DefaultRule, DefaultTheory, GroundingLimitError,
                    Literal, StrictRule, Variable, complement, format_order,
                    ground_defaults, lit, match, substitute)
from pdl.parser import parse_kb, parse_literal

X, Y = Variable("X"), Variable("Y")

names = st.sampled_from(["p", "q", "bird", "friend"])
consts = st.sampled_from([Constant(c) for c in ("a", "b", "tweety")])
terms = st.one_of(consts, st.sampled_from([X, Y]))


@st.composite
def literals(draw, ground=False):
    args = draw(st.lists(consts if ground else terms, min_size=1, max_size=3))
    return Literal(draw(names), tuple(args), draw(st.booleans()))


def test_complement_examples():
    assert complement(lit("flies", "tweety")) == lit("flies", "tweety", negative=True)
    assert complement(parse_literal("-flies(tweety)")) == parse_literal("flies(tweety)")
    assert str(complement(lit("pacifist", "nixon"))) == "-pacifist(nixon)"


@given(literals())
def test_complement_is_fixed_point_free_involution(l):
    assert complement(complement(l)) == l
    assert complement(l) != l
    assert complement(l).atom == l.atom


def test_match_examples():
    assert match(Literal("bird", (X,)), lit("bird", "tweety")) == {X: Constant("tweety")}
    assert match(Literal("bird", (X,)), lit("penguin", "tweety")) is None
    assert match(Literal("friend", (X, Y)), lit("friend", "tom", "bob")) == \
        {X: Constant("tom"), Y: Constant("bob")}


def test_match_respects_polarity_and_repeated_variables():
    assert match(Literal("bird", (X,)), lit("bird", "a", negative=True)) is None
    assert match(Literal("f", (X, X)), lit("f", "a", "b")) is None
    assert match(Literal("f", (X, X)), lit("f", "a", "a")) == {X: Constant("a")}


@given(literals(), literals(ground=True))
def test_match_substitution_reproduces_fact(pattern, fact):
    sigma = match(pattern, fact)
    if sigma is not None:
        assert substitute(pattern, sigma) == fact


def test_strict_rule_safety():
    StrictRule(Literal("bird", (X,)), (Literal("penguin", (X,)),), "s1")
    with pytest.raises(ValueError):
        StrictRule(Literal("bird", (Y,)), (Literal("penguin", (X,)),), "s1")


def test_default_rule_validation():
    with pytest.raises(ValueError):
        DefaultRule("d", (), (), (lit("p", "a"),))
    with pytest.raises(ValueError):
        DefaultRule("d", (), (lit("p", "a"),), (lit("p", "a"),), Fraction(-1))
    assert DefaultRule("d", (), (lit("p", "a"),), (lit("p", "a"),)).order == 0


def test_theory_rejects_duplicate_names_and_open_facts():
    d = DefaultRule("d", (), (lit("p", "a"),), (lit("p", "a"),))
    with pytest.raises(ValueError):
        DefaultTheory(defaults=(d, d))
    with pytest.raises(ValueError):
        DefaultTheory(facts=frozenset({Literal("p", (X,))}))


def test_ground_defaults_row_one(corpus):
    instances = ground_defaults(corpus("01_basic"))
    assert len(instances) == 1
    inst = instances[0]
    assert inst.prerequisite == (lit("bird", "tweety"),)
    assert inst.conclusions == (lit("flies", "tweety"),)
    assert inst.order == 1 and inst.key == ("d0", (("X", "tweety"),))


def test_ground_defaults_empty_domain():
    theory = parse_kb("default d: p(X) : q(X) / q(X).")
    assert ground_defaults(theory) == ()


def test_ground_defaults_friendship_count(corpus):
    # four constants, three variables
    assert len(ground_defaults(corpus("02_transitivity"))) == 4 ** 3


def test_grounding_limit_names_rule(corpus):
    with pytest.raises(GroundingLimitError) as err:
        ground_defaults(corpus("02_transitivity"), max_instances=10)
    assert err.value.rule == "friendship"


@given(st.lists(st.sampled_from(["a", "b", "c", "d"]), min_size=1, max_size=4))
def test_grounding_stays_within_named_constants(names):
    text = " ".join(f"p({n})." for n in names) + " default d: p(X) : q(X, Y) / q(X, Y)."
    theory = parse_kb(text)
    for inst in ground_defaults(theory):
        mentioned = {a for l in inst.prerequisite + inst.conclusions for a in l.args}
        assert mentioned <= theory.constants


def test_format_order():
    assert format_order(INF) == "inf"
    assert format_order(Fraction(3)) == "3"
    assert format_order(Fraction(5, 2)) == "2.5"
    assert format_order(Fraction(1, 3)) == "1/3"


def test_priority_is_totally_ordered_with_infinity_on_top():
    assert Fraction(10 ** 9) < INF
    assert sorted([INF, Fraction(1), Fraction(0)]) == [0, 1, INF]
