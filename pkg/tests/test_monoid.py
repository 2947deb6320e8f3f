import random

import pytest

from chainrep.compiler import compile
from chainrep.errors import ResourceLimitError
from chainrep.formula import parse
from chainrep.monoid import (is_pumpable, mark_shadow, ramsey_bound,
                             transition_monoid)
from chainrep.words import Word
from conftest import battery


def build(sig, text):
    return transition_monoid(compile(parse(text, sig), sig))


def test_laws_exhaustive(sig1, sig2):
    for sig, text in ((sig1, "ex v. P1(v)"), (sig1, "atleast 2 v. P1(v)"),
                      (sig2, "all v. (P1(v) -> ex u. (v < u & P2(u)))")):
        m = build(sig, text)
        assert m.size <= 50
        e = m.identity
        for a in range(m.size):
            assert m.multiply(a, e) == a and m.multiply(e, a) == a
            for b in range(m.size):
                for c in range(m.size):
                    assert m.multiply(m.multiply(a, b), c) == \
                        m.multiply(a, m.multiply(b, c))


def test_morphism_random_words(sig1):
    m = build(sig1, "atleast 2 v. P1(v)")
    rng = random.Random(11)
    for _ in range(300):
        u = [rng.randrange(2) for _ in range(rng.randrange(5))]
        v = [rng.randrange(2) for _ in range(rng.randrange(5))]
        assert m.image_of_word(u + v) == \
            m.multiply(m.image_of_word(u), m.image_of_word(v))


def test_witnesses_map_back(sig1):
    m = build(sig1, "ex v. (P1(v) & ex u. (v < u & ~P1(u)))")
    for a in range(m.size):
        assert m.image_of_word(m.witness[a]) == a
        if m.nonempty_witness[a] is not None:
            assert len(m.nonempty_witness[a]) >= 1
            assert m.image_of_word(m.nonempty_witness[a]) == a
    # identity: empty witness, and nonempty realizability is separate
    assert m.witness[m.identity] == ()


def test_idempotents(sig1):
    m = build(sig1, "atleast 3 v. P1(v)")
    for a in m.idempotents():
        assert m.multiply(a, a) == a
    assert m.identity in m.idempotents()


def test_mark_shadow_structure(sig1):
    dfa = compile(parse("P1(x)", sig1), sig1, ("x",))
    shadow = mark_shadow(dfa)
    # plain alphabet, doubled states: row 0 reads its letter marked, row 1
    # plain, and every step lands in row 1
    assert shadow.n_letters == dfa.n_letters // 2
    assert len(shadow.delta) == 2 * len(dfa.delta)
    k = dfa.sig.k
    for q in range(len(dfa.delta)):
        for a in range(shadow.n_letters):
            assert shadow.delta[2 * q][a] == 2 * dfa.delta[q][a | 1 << k] + 1
            assert shadow.delta[2 * q + 1][a] == 2 * dfa.delta[q][a] + 1


def test_shadow_monoid_identity_never_nonempty(sig1):
    for name, sig, f, variables, _ in battery():
        if not variables:
            continue
        m = transition_monoid(mark_shadow(compile(f, sig, variables)))
        assert m.nonempty_witness[m.identity] is None, name


def test_is_pumpable_contract(sig1):
    m = build(sig1, "atleast 2 v. P1(v)")
    for tb in range(m.size):
        for te in range(m.size):
            e = is_pumpable(m, tb, te)
            if e is None:
                # indeed no qualifying idempotent
                for cand in m.idempotents():
                    assert m.nonempty_witness[cand] is None or \
                        m.multiply(tb, cand) != tb or m.multiply(cand, te) != te
            else:
                assert m.is_idempotent(e)
                assert m.nonempty_witness[e] is not None
                assert m.multiply(tb, e) == tb and m.multiply(e, te) == te


def test_pumpable_prefers_short_witness(sig1):
    m = build(sig1, "ex v. P1(v)")
    e = is_pumpable(m, m.image_of_word([0]), m.image_of_word([0]))
    assert e is not None and len(m.nonempty_witness[e]) == 1


def test_monoid_budget(sig1):
    dfa = compile(parse("atleast 3 v. P1(v)", sig1), sig1)
    with pytest.raises(ResourceLimitError):
        transition_monoid(dfa, budget=2)


def test_ramsey_bounds():
    assert [ramsey_bound(c) for c in (1, 2, 3, 4)] == [3, 6, 17, 66]
    with pytest.raises(Exception):
        ramsey_bound(0)
