import dataclasses

import pytest

from chainrep.errors import ChainrepError, InputError, ResourceLimitError
from chainrep.formula import Signature
from chainrep.interp import (Component, apply_interpretation, check_equivalence,
                             parse_interpretation, reduce_interpretation)
from chainrep.words import Word

SUCC = """
signature P1
component pairs dim=2
universe x < y & ~ex z. (x < z & z < y)
relation E/2 on (pairs, pairs) := x = x & y = u & v = v
"""

TWO = """
signature P1, P2
component ones dim=1
universe P1(x)
component flag dim=0
universe ex v. P2(v)
relation E/2 on (ones, ones) := x < y
relation M/1 on (flag,) := ~ex q. q < q
"""

ENDS = """
signature P1
component ends dim=1
universe (~ex z. z < x) | (~ex z. x < z)
relation L/2 on (ends, ends) := x < y
"""


def test_parse_round_trip():
    spec = parse_interpretation(SUCC)
    again = parse_interpretation(spec.dump())
    assert again.dump() == spec.dump()
    assert [c.name for c in spec.components] == ["pairs"]
    assert spec.arities() == {"E": 2}


def test_parse_errors():
    bad = [
        "component a dim=1\nuniverse P1(x)",          # no signature
        "signature P1\ncomponent a dim=1",             # missing universe
        "signature P1\nuniverse P1(x)",                # universe w/o component
        "signature P1\ncomponent a dim=2\nuniverse P1(x)",  # arity mismatch
        "signature P1\ncomponent a dim=1\nuniverse P1(x)\n"
        "component a dim=1\nuniverse P1(x)",           # duplicate name
        "signature P1\ncomponent a dim=1\nuniverse P1(x)\n"
        "relation R/2 on (a) := x < y",                # arity vs slots
        "signature P1\ncomponent a dim=1\nuniverse P1(x)\n"
        "relation R/1 on (a) := x < y",                # variable count
        "signature P1\ncomponent a dim=1\nuniverse Z(x)",  # free set variable
        "signature P1\nnonsense P1(x)",                # unknown directive
    ]
    for text in bad:
        with pytest.raises(InputError):
            parse_interpretation(text)


def test_apply_single_component(sig1):
    spec = parse_interpretation(
        "signature P1\ncomponent a dim=1\nuniverse P1(x)\n"
        "relation E/2 on (a, a) := x < y\n")
    st = apply_interpretation(spec, Word(sig1, (1, 0, 1)))
    assert st.elements == (("a", (0,)), ("a", (2,)))
    assert st.relation("E") == ((("a", (0,)), ("a", (2,))),)


def test_apply_unsat_universe_empty(sig1):
    spec = parse_interpretation(
        "signature P1\ncomponent a dim=1\nuniverse x < x\n")
    st = apply_interpretation(spec, Word(sig1, (1, 1)))
    assert st.elements == ()
    assert "empty" in st.dump()


def test_apply_dim0_component(sig1):
    spec = parse_interpretation(
        "signature P1\ncomponent a dim=0\nuniverse ex v. P1(v)\n")
    assert apply_interpretation(spec, Word(sig1, (0, 1))).elements == (("a", ()),)
    assert apply_interpretation(spec, Word(sig1, (0, 0))).elements == ()


def test_apply_signature_mismatch(sig1, sig2):
    spec = parse_interpretation(SUCC)
    with pytest.raises(InputError):
        apply_interpretation(spec, Word(sig2, (0,)))


def test_reduce_successor_pairs():
    spec = parse_interpretation(SUCC)
    red = reduce_interpretation(spec, 1)
    assert [(c.name, c.dim) for c in red.spec.components] == [("pairs.1", 1)]
    assert red.parts[0].rep.bound == 1
    assert check_equivalence(spec, red, 4)


def test_reduce_two_components():
    spec = parse_interpretation(TWO)
    red = reduce_interpretation(spec, 1)
    names = [c.name for c in red.spec.components]
    assert names == ["ones.1", "flag.1"]
    assert check_equivalence(spec, red, 3)


def test_reduce_with_multiple_copies():
    spec = parse_interpretation(ENDS)
    red = reduce_interpretation(spec, 0)
    assert [c.name for c in red.spec.components] == ["ends.1", "ends.2"]
    assert all(c.dim == 0 for c in red.spec.components)
    assert check_equivalence(spec, red, 4)


def test_reduce_refuses_insufficient_dim():
    spec = parse_interpretation(
        "signature P1\ncomponent pairs dim=2\nuniverse x < y\n")
    with pytest.raises(InputError) as e:
        reduce_interpretation(spec, 1)
    assert "pairs" in str(e.value) and "2" in str(e.value)


def test_reduce_unsat_component_vanishes(sig1):
    spec = parse_interpretation(
        "signature P1\ncomponent a dim=1\nuniverse x < x\n"
        "relation E/2 on (a, a) := x < y\n")
    red = reduce_interpretation(spec, 0)
    assert red.spec.components == ()
    assert check_equivalence(spec, red, 3)


def test_equivalence_detects_corruption():
    spec = parse_interpretation(ENDS)
    red = reduce_interpretation(spec, 0)
    fixed = []
    for c in red.spec.components:
        if c.name == "ends.2":
            # corrupt the index formula: both copies now select the first
            fixed.append(Component(c.name, c.dim,
                                   red.spec.component("ends.1").universe,
                                   c.variables))
        else:
            fixed.append(c)
    bad = dataclasses.replace(red, spec=dataclasses.replace(
        red.spec, components=tuple(fixed)))
    report = check_equivalence(spec, bad, 3)
    assert not report
    assert report.failure


def test_equivalence_spec_vs_itself():
    spec = parse_interpretation(TWO)
    red = reduce_interpretation(spec, 1)
    # reduction of an already-small spec relabels components (q, 1)
    assert all(p.index == 1 for p in red.parts)
    assert check_equivalence(spec, red, 3)


def test_equivalence_signature_mismatch():
    spec = parse_interpretation(SUCC)
    other = parse_interpretation(
        "signature P1\ncomponent pairs dim=2\n"
        "universe x < y & ~ex z. (x < z & z < y)\n"
        "relation F/2 on (pairs, pairs) := x = x & y = u & v = v\n")
    red = reduce_interpretation(other, 1)
    with pytest.raises(InputError):
        check_equivalence(spec, red, 2)
