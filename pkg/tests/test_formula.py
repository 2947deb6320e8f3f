import pytest
from hypothesis import given, settings, strategies as st

from chainrep.errors import InputError, ParseError
from chainrep.formula import (And, AtLeast, Equal, ExistsFO, ExistsSO, ForallFO,
                              In, Less, NameSupply, Not, Or, Pred, Signature,
                              all_vars, conj, disj, exists_wrap, expand_macros,
                              free_set_variables, free_variables,
                              ith_lex_selector, lex_less, mk_false, mk_true,
                              order_case_split, parse, render, substitute)
from chainrep.randgen import random_formula
from chainrep.oracle import evaluate, satisfying_tuples
from chainrep.words import Word
import random


def test_parse_atoms(sig1):
    assert parse("x < y", sig1) == Less("x", "y")
    assert parse("x = y", sig1) == Equal("x", "y")
    assert parse("P1(x)", sig1) == Pred("P1", "x")
    assert parse("Z(x)", sig1) == In("Z", "x")


def test_parse_precedence(sig1):
    f = parse("~P1(x) & P1(y) | P1(x)", sig1)
    assert f == Or(And(Not(Pred("P1", "x")), Pred("P1", "y")), Pred("P1", "x"))
    g = parse("P1(x) -> P1(y) -> P1(x)", sig1)
    # implication associates right
    assert g == parse("P1(x) -> (P1(y) -> P1(x))", sig1)


def test_quantifier_body_extends_right(sig1):
    f = parse("ex v. P1(v) & v < x", sig1)
    assert f == ExistsFO("v", And(Pred("P1", "v"), Less("v", "x")))


def test_parse_errors(sig1):
    for text in ("x <", "P9(x)", "ex. P1(x)", "(P1(x)", "x ? y", ""):
        with pytest.raises(ParseError):
            parse(text, sig1)
    try:
        parse("x < < y", sig1)
    except ParseError as e:
        assert e.pos >= 0


def test_free_variables_first_occurrence(sig1):
    f = parse("y < x & (ex z. z < x)", sig1)
    assert free_variables(f) == ("y", "x")
    assert free_set_variables(parse("Z(x) & Y(x)", sig1)) == ("Z", "Y")


def test_substitute_avoids_capture(sig1):
    f = parse("ex z. z < x", sig1)
    g = substitute(f, {"x": "z"})
    w = Word(sig1, (0, 0))
    assert evaluate(g, w, fo={"z": 1}) is True
    assert evaluate(g, w, fo={"z": 0}) is False


def test_conj_disj_units(sig1):
    assert evaluate(conj([]), Word(sig1, ()), {}) is True
    assert evaluate(disj([]), Word(sig1, ()), {}) is False
    assert conj([Less("x", "y")]) == Less("x", "y")


def test_exists_wrap(sig1):
    f = exists_wrap(("x", "y"), Less("x", "y"))
    assert f == ExistsFO("x", ExistsFO("y", Less("x", "y")))


def test_expand_macros_atleast(sig1):
    f = expand_macros(AtLeast(2, "v", Pred("P1", "v")))
    w1 = Word(sig1, (1, 1))
    w2 = Word(sig1, (1, 0))
    assert evaluate(f, w1, {}) is True
    assert evaluate(f, w2, {}) is False
    assert evaluate(expand_macros(AtLeast(0, "v", mk_false())), Word(sig1, ()), {})


def test_name_supply_fresh():
    supply = NameSupply({"x", "y0"})
    a = supply.fresh("y")
    b = supply.fresh("y")
    assert a != b and a not in {"x", "y0"} and b not in {"x", "y0"}


def test_order_case_split_pair(sig1):
    f = parse("x < y | P1(x)", sig1)
    cases = order_case_split(f, ("x", "y"))
    shapes = sorted(tuple(len(c) for c in case.classes) for case in cases)
    assert shapes == [(1, 1), (1, 1), (2,)]
    for case in cases:
        assert len(case.representatives) == len(case.classes)
    # every pair assignment satisfies exactly one constraint, where the case
    # formula agrees with f
    w = Word(sig1, (1, 0, 1))
    for a in range(3):
        for b in range(3):
            env = {"x": a, "y": b}
            live = [c for c in cases if evaluate(c.constraint, w, fo=env)]
            assert len(live) == 1
            case = live[0]
            rep_env = {r: env[cls[0]]
                       for cls, r in zip(case.classes, case.representatives)}
            assert evaluate(case.formula, w, fo=rep_env) == evaluate(f, w, fo=env)


def test_order_case_split_counts(sig1):
    f = parse("P1(x)", sig1)
    # ordered Bell numbers: weak orderings of n elements
    assert len(order_case_split(f, ("x",))) == 1
    assert len(order_case_split(f, ("x", "y"))) == 3
    assert len(order_case_split(f, ("x", "y", "z"))) == 13


def test_lex_less_semantics(sig1):
    f = lex_less(("x", "y"), ("u", "v"))
    w = Word(sig1, (0,) * 3)
    for a in range(3):
        for b in range(3):
            for c in range(3):
                for d in range(3):
                    got = evaluate(f, w, fo={"x": a, "y": b, "u": c, "v": d})
                    assert got == ((a, b) < (c, d))


def test_ith_lex_selector(sig1):
    f = parse("P1(x)", sig1)
    w = Word(sig1, (1, 0, 1, 1))
    hits = [t[0] for t in satisfying_tuples(f, w, ("x",))]
    assert hits == [0, 2, 3]
    for i in (1, 2, 3):
        sel = ith_lex_selector(f, ("x",), i)
        got = [t[0] for t in satisfying_tuples(sel, w, ("x",))]
        assert got == [hits[i - 1]]
    sel4 = ith_lex_selector(f, ("x",), 4)
    assert satisfying_tuples(sel4, w, ("x",)) == []
    with pytest.raises(InputError):
        ith_lex_selector(f, ("x",), 0)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, 2))
def test_render_parse_round_trip(seed, n_preds):
    sig = Signature(tuple(f"P{i + 1}" for i in range(n_preds)))
    f = random_formula(random.Random(seed), sig, ("x", "y"), rank=3)
    assert parse(render(f), sig) == f


def test_render_spacing_stable(sig1):
    f = parse("(x<y)&( ~ P1( x ) )", sig1)
    assert render(f) == "x < y & ~P1(x)"
    assert all_vars(f) == frozenset({"x", "y"})


def test_signature_validation():
    with pytest.raises(InputError):
        Signature(("P1", "P1"))
    with pytest.raises(InputError):
        Signature(("lower",))
