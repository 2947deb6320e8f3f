import pytest

from chainrep.errors import ChainrepError, InputError, ResourceLimitError
from chainrep.formula import parse
from chainrep.growth import (brute_growth, growth_degree, growth_lower_witness,
                             growth_upper_check, no_decrement_witness,
                             pump_witness)
from chainrep.oracle import count_in_set
from conftest import battery


def test_growth_degree_matches_dimension():
    for name, sig, f, variables, want in battery():
        assert growth_degree(f, sig, variables) == want, name


def test_pump_witness_counts(sig1):
    f = parse("P1(x)", sig1)
    for n in range(4):
        w = pump_witness(f, sig1, "x", n)
        assert w.claimed_tuple_count == n + 1
        assert w.oracle_count() >= n + 1
        assert len(w.positions) == n + 1
    with pytest.raises(InputError):
        pump_witness(f, sig1, "x", -1)
    with pytest.raises(InputError):
        pump_witness(parse("x < x", sig1), sig1, "x", 1)


def test_no_decrement_counts(sig1):
    # 2N choices per variable stay independent: count is (2N)^k from a pool
    # of at most 2Nk positions
    cases = [("P1(x)", ("x",)), ("x < y", ("x", "y")),
             ("(x < y) & (y < z)", ("x", "y", "z"))]
    for text, variables in cases:
        f = parse(text, sig1)
        k = len(variables)
        for N in (1, 2, 3):
            w = no_decrement_witness(f, sig1, variables, N)
            assert len(w.positions) <= 2 * N * k
            assert w.claimed_tuple_count == (2 * N) ** k
            assert w.oracle_count() >= (2 * N) ** k, (text, N)


def test_no_decrement_needs_marks(sig1):
    with pytest.raises(InputError):
        no_decrement_witness(parse("ex v. P1(v)", sig1), sig1, (), 2)
    with pytest.raises(InputError):
        no_decrement_witness(parse("P1(x)", sig1), sig1, ("x",), 0)


def test_lower_witness_battery():
    for name, sig, f, variables, d in battery():
        if name == "unsatisfiable":
            with pytest.raises(InputError):
                growth_lower_witness(f, sig, variables, 2)
            continue
        for n in (1, 3):
            w = growth_lower_witness(f, sig, variables, n)
            assert w.claimed_tuple_count == n ** d, name
            assert w.oracle_count() >= n ** d, name
            assert len(w.positions) >= 1


def test_lower_witness_pool_is_valid(sig1):
    f = parse("x < y", sig1)
    w = growth_lower_witness(f, sig1, ("x", "y"), 3)
    assert all(0 <= p < len(w.word) for p in w.positions)
    # the oracle count really is a count over the pool
    assert w.oracle_count() == count_in_set(f, w.word, w.positions, ("x", "y"))


def test_lower_witness_needs_positive_n(sig1):
    with pytest.raises(InputError):
        growth_lower_witness(parse("P1(x)", sig1), sig1, ("x",), 0)


def test_brute_growth_exact_pair(sig1):
    f = parse("x < y", sig1)
    for n in (0, 1, 2, 3, 4):
        assert brute_growth(f, sig1, ("x", "y"), n, 6) == n * (n - 1) // 2


def test_brute_growth_simple(sig1):
    assert brute_growth(parse("P1(x)", sig1), sig1, ("x",), 2, 4) == 2
    assert brute_growth(parse("x < x", sig1), sig1, ("x",), 3, 4) == 0
    assert brute_growth(parse("ex v. P1(v)", sig1), sig1, (), 1, 3) == 1


def test_upper_check_battery():
    for name, sig, f, variables, _ in battery():
        for n in (1, 2, 3):
            assert growth_upper_check(f, sig, variables, n, 6), (name, n)


def test_witness_dump_mentions_pool(sig1):
    w = no_decrement_witness(parse("P1(x)", sig1), sig1, ("x",), 2)
    text = w.dump()
    assert "pool" in text and "claimed" in text
