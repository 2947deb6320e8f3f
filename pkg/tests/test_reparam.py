import itertools

import pytest

from chainrep.errors import InputError
from chainrep.formula import Signature, mk_false, parse, render
from chainrep.oracle import (check_canonical_form, check_reparameterization,
                             evaluate, satisfying_tuples)
from chainrep.reparam import (ERRATUM_NOTES, TypeAlgebra, combine_disjuncts,
                              compose, decide_dimension, eliminable_pairs,
                              eliminate_variable, local_normal_form,
                              minimal_reparameterization)
from chainrep.words import MarkedWord, all_words
from conftest import battery

# a formula whose two families disagree on which mark can go: the split
# into guarded groups is the only route down to dimension 1
GROUP_TEXT = "((~ex z. z < x) | (~ex z. y < z)) & x < y"
# satisfiable only at the two ends of a word: dimension 0 with two fibers
ENDS_TEXT = "(~ex z. z < x) | (~ex z. x < z)"


def test_dimension_battery():
    for name, sig, f, variables, want in battery():
        rep = minimal_reparameterization(f, sig, variables)
        assert rep.dimension == want, name
        assert len(rep.domain_vars) == len(variables)


def test_unsat_rep(sig1):
    rep = minimal_reparameterization(parse("x < x", sig1), sig1, ("x",))
    assert rep.dimension == 0 and rep.bound == 0
    assert rep.g == mk_false()


def test_battery_contract_small():
    for name, sig, f, variables, _ in battery():
        rep = minimal_reparameterization(f, sig, variables)
        assert check_reparameterization(rep, 4), name
        assert check_canonical_form(rep, 4), name


def test_refined_bound_is_exact(sig1):
    rep = minimal_reparameterization(parse(ENDS_TEXT, sig1), sig1, ("x",))
    assert rep.dimension == 0
    assert rep.bound == 2
    report = check_reparameterization(rep, 5)
    assert report and report.max_fiber == 2


def test_group_split(sig1):
    f = parse(GROUP_TEXT, sig1)
    rep = minimal_reparameterization(f, sig1, ("x", "y"))
    assert rep.dimension == 1
    assert check_reparameterization(rep, 3)
    assert check_canonical_form(rep, 3)


def test_decide_dimension(sig1):
    f = parse("x < y", sig1)
    assert not decide_dimension(f, sig1, ("x", "y"), 1)
    assert decide_dimension(f, sig1, ("x", "y"), 2)
    assert decide_dimension(f, sig1, ("x", "y"), 3)
    with pytest.raises(InputError):
        decide_dimension(f, sig1, ("x", "y"), -1)


def test_free_vars_must_be_marked(sig1):
    with pytest.raises(InputError):
        minimal_reparameterization(parse("x < y", sig1), sig1, ("x",))


def test_segment_types_shape(sig1):
    f = parse("x < y", sig1)
    algebra = TypeAlgebra.build(f, sig1, ("x", "y"))
    for w in all_words(sig1, 4):
        for marks in itertools.combinations(range(len(w)), 2):
            taus = algebra.segment_types(MarkedWord(w, marks))
            assert len(taus) == 3


def test_accepts_chain_matches_oracle():
    for name, sig, f, variables, _ in battery():
        algebra = TypeAlgebra.build(f, sig, variables)
        for w in all_words(sig, 4):
            for marks in itertools.combinations(range(len(w)), len(variables)):
                mw = MarkedWord(w, marks)
                want = evaluate(f, w, fo=dict(zip(variables, marks)))
                got = algebra.accepts_chain(algebra.segment_types(mw))
                assert got == want, (name, str(mw))


def test_accepts_chain_sentence(sig1):
    algebra = TypeAlgebra.build(parse("ex v. P1(v)", sig1), sig1, ())
    for w in all_words(sig1, 4):
        got = algebra.accepts_chain(algebra.segment_types(MarkedWord(w, ())))
        assert got == evaluate(parse("ex v. P1(v)", sig1), w)


def test_normal_form_covers_exactly(sig1):
    # every marking's type tuple appears in exactly the disjunct it realizes,
    # and a tuple is listed iff some marking realizes it (on small words)
    f = parse("P1(x) & ex v. x < v", sig1)
    algebra = TypeAlgebra.build(f, sig1, ("x",))
    listed = {d.types for d in local_normal_form(algebra)}
    seen = set()
    for w in all_words(sig1, 5):
        for p in range(len(w)):
            mw = MarkedWord(w, (p,))
            taus = algebra.segment_types(mw)
            sat = evaluate(f, w, fo={"x": p})
            assert (taus in listed) == sat, str(mw)
            if sat:
                seen.add(taus)
    assert seen == listed


def test_eliminable_pairs_mark_indexing(sig1):
    # the pair decided for mark i meets at the mark: (tau_{i-1}, tau_i)
    f = parse(GROUP_TEXT, sig1)
    algebra = TypeAlgebra.build(f, sig1, ("x", "y"))
    firsts = set()
    for d in local_normal_form(algebra):
        pairs = eliminable_pairs(algebra, d)
        assert all(1 <= i <= 2 for i in pairs)
        if pairs:
            firsts.add(pairs[0])
    # the two families disagree on the first eliminable mark
    assert firsts == {1, 2}


def test_eliminate_variable_equalities(sig1):
    # dropping x_i: the image keeps the other coordinates in order
    f = parse("(x < y) & (y < z)", sig1)
    rep = eliminate_variable(f, sig1, ("x", "y", "z"), 2, n_families=1,
                             monoid_size=2)
    assert rep.dimension == 2
    assert rep.bound == 1 * 6  # families x ramsey_bound(2)
    for w in all_words(sig1, 4):
        for tup in satisfying_tuples(rep.g, w, rep.domain_vars + rep.image_vars):
            x, u = tup[:3], tup[3:]
            assert u == (x[0], x[2])


def test_compose_multiplies_bounds(sig1):
    f = parse("(x < y) & (y < z)", sig1)
    first = eliminate_variable(f, sig1, ("x", "y", "z"), 2, 1, 2)
    u0, u1 = first.image_vars
    inner = minimal_reparameterization(parse(f"{u0} < {u1}", sig1), sig1,
                                       first.image_vars, refine=False)
    both = compose(first, inner)
    assert both.bound == first.bound * inner.bound
    assert both.domain_vars == first.domain_vars
    assert both.image_vars == inner.image_vars


def test_combine_disjuncts_bounds_add(sig1):
    a = minimal_reparameterization(parse("~ex z. z < x", sig1), sig1, ("x",),
                                   refine=False)
    b = minimal_reparameterization(parse("~ex z. x < z", sig1), sig1, ("x",),
                                   refine=False)
    guards = [parse("P1(x)", sig1), parse("~P1(x)", sig1)]
    combined = combine_disjuncts(parse("x = x", sig1), sig1, ("x",),
                                 list(zip(guards, [a, b])))
    assert combined.bound == a.bound + b.bound
    assert len(combined.image_vars) == max(a.dimension, b.dimension)


def test_erratum_notes_present():
    assert len(ERRATUM_NOTES) == 2
    for note in ERRATUM_NOTES:
        assert isinstance(note, str) and note


def test_provenance_tree(sig1):
    rep = minimal_reparameterization(parse(GROUP_TEXT, sig1), sig1, ("x", "y"))
    dump = rep.provenance.dump()
    assert "group" in dump or "eliminate" in dump
    assert rep.describe().startswith("dimension 1")
