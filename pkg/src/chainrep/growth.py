"""Growth of satisfying-tuple counts against the size of a position pool.

For f(x1..xk) and a set S of positions, count the satisfying tuples drawn
entirely from S.  The maximum over words and pools of size at most n grows
like n**d where d is the minimal reparameterization dimension; the
constructions here produce concrete words and pools witnessing the lower
side, and a brute-force counter bounds the upper side on small words.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ChainrepError, InputError, ResourceLimitError
from .formula import Formula, Signature, exists_wrap
from .compiler import DEFAULT_STATE_BUDGET, compile as compile_dfa, shortest_accepted
from .monoid import DEFAULT_MONOID_BUDGET, is_pumpable
from .oracle import count_in_set, evaluate, satisfying_tuples
from .reparam import (Disjunct, TypeAlgebra, _mentions_so, local_normal_form,
                      minimal_reparameterization)
from .words import Word, all_words


@dataclass(frozen=True)
class WitnessStructure:
    """A word and position pool realizing a claimed number of tuples.

    claimed_tuple_count is the lower bound the construction guarantees;
    oracle_count() recounts it from scratch.
    """

    formula: Formula
    variables: tuple[str, ...]
    word: Word
    positions: tuple[int, ...]
    claimed_tuple_count: int
    construction: str

    def oracle_count(self) -> int:
        return count_in_set(self.formula, self.word, self.positions, self.variables)

    def dump(self) -> str:
        return "\n".join([
            f"word={self.word.render()}",
            f"pool={{{', '.join(map(str, self.positions))}}} size={len(self.positions)}",
            f"claimed={self.claimed_tuple_count}",
            f"construction={self.construction}",
        ])


def growth_degree(f: Formula, sig: Signature, variables, *,
                  budget_states: int = DEFAULT_STATE_BUDGET,
                  budget_monoid: int = DEFAULT_MONOID_BUDGET) -> int:
    """Exponent of the polynomial growth of tuple counts in pool size."""
    rep = minimal_reparameterization(f, sig, variables, refine=False,
                                     budget_states=budget_states,
                                     budget_monoid=budget_monoid)
    return rep.dimension


def brute_growth(f: Formula, sig: Signature, variables, n: int, max_len: int) -> int:
    """Exact maximum of tuple counts over words up to max_len and pools up to n."""
    variables = tuple(variables)
    best = 0
    for word in all_words(sig, max_len):
        tuples = [tuple(t) for t in satisfying_tuples(f, word, variables)]
        if not tuples:
            continue
        supports = [frozenset(t) for t in tuples]
        pool = range(len(word))
        for size in range(min(n, len(word)) + 1):
            for S in itertools.combinations(pool, size):
                inside = frozenset(S)
                best = max(best, sum(1 for s in supports if s <= inside))
    return best


def growth_upper_check(f: Formula, sig: Signature, variables, n: int, max_len: int, *,
                       budget_states: int = DEFAULT_STATE_BUDGET,
                       budget_monoid: int = DEFAULT_MONOID_BUDGET) -> bool:
    """Brute counts stay below bound * n**dimension on small words."""
    rep = minimal_reparameterization(f, sig, variables, refine=False,
                                     budget_states=budget_states,
                                     budget_monoid=budget_monoid)
    got = brute_growth(f, sig, variables, n, max_len)
    if rep.bound == 0:
        return got == 0
    return got <= rep.bound * n ** rep.dimension


def _all_pumpable_family(algebra: TypeAlgebra):
    """First family pumpable at every mark, with one idempotent per mark."""
    for fam in local_normal_form(algebra):
        es = []
        for i in range(1, algebra.arity + 1):
            e = is_pumpable(algebra.monoid, fam.types[i - 1], fam.types[i])
            if e is None:
                break
            es.append(e)
        else:
            return fam, es
    return None


def _blocks_word(monoid, fam: Disjunct, es, copies: int):
    """W0 + (E1*copies + W1) + ... and the per-block copy geometry.

    Returns the letter list plus, per block, the start of its copy run,
    the copy length, and the start of its closing witness.
    """
    letters = list(monoid.witness[fam.types[0]])
    geometry = []
    for i, e in enumerate(es, start=1):
        unit = monoid.nonempty_witness[e]
        run = len(letters)
        letters.extend(unit * copies)
        geometry.append((run, len(unit), len(letters)))
        letters.extend(monoid.nonempty_witness[fam.types[i]])
    return letters, geometry


def pump_witness(f: Formula, sig: Signature, var: str, n: int, *,
                 budget_states: int = DEFAULT_STATE_BUDGET,
                 budget_monoid: int = DEFAULT_MONOID_BUDGET) -> WitnessStructure:
    """n+1 satisfying positions on one word, by repeating an idempotent.

    Needs some family of f whose single mark is pumpable; each copy start
    and the closing witness start then satisfies f.
    """
    if n < 0:
        raise InputError("need n >= 0")
    algebra = TypeAlgebra.build(f, sig, (var,), budget_states, budget_monoid)
    found = _all_pumpable_family(algebra)
    if found is None:
        raise InputError("no family of the formula pumps at its mark")
    fam, es = found
    letters, geometry = _blocks_word(algebra.monoid, fam, es, n)
    run, unit, tail = geometry[0]
    positions = tuple(run + j * unit for j in range(n)) + (tail,)
    return WitnessStructure(
        f, (var,), Word(sig, tuple(letters)), positions, n + 1,
        f"family {fam.types}: prefix + {n} copies of idempotent {es[0]} + closing witness")


def no_decrement_witness(f: Formula, sig: Signature, variables, N: int, *,
                         budget_states: int = DEFAULT_STATE_BUDGET,
                         budget_monoid: int = DEFAULT_MONOID_BUDGET) -> WitnessStructure:
    """(2N)**k tuples from a pool of 2Nk positions, one block per mark.

    Witnesses that a family pumping at every mark keeps all k coordinates
    essential: any reparameterization below width k would need fibers
    growing with N.
    """
    variables = tuple(variables)
    k = len(variables)
    if k == 0:
        raise InputError("need at least one variable")
    if N < 1:
        raise InputError("need N >= 1")
    algebra = TypeAlgebra.build(f, sig, variables, budget_states, budget_monoid)
    found = _all_pumpable_family(algebra)
    if found is None:
        raise InputError("every family of the formula has a non-pumping mark")
    fam, es = found
    letters, geometry = _blocks_word(algebra.monoid, fam, es, 2 * N)
    positions = tuple(run + j * unit
                      for run, unit, _ in geometry for j in range(2 * N))
    return WitnessStructure(
        f, variables, Word(sig, tuple(letters)), positions, (2 * N) ** k,
        f"family {fam.types}: {k} blocks of {2 * N} idempotent copies; "
        f"any copy-start choice per block is a satisfying tuple")


def growth_lower_witness(f: Formula, sig: Signature, variables, n: int, *,
                         budget_states: int = DEFAULT_STATE_BUDGET,
                         budget_monoid: int = DEFAULT_MONOID_BUDGET) -> WitnessStructure:
    """A word and pool of size O(n) carrying at least n**d satisfying tuples.

    d is the minimal reparameterization dimension.  Follows the image of a
    minimal map: some image family pumps at every mark, so each of its d
    marks slides over n extra idempotent copies independently, and the
    fibers transport along.  The pool keeps, in every copy, the offsets one
    base fiber occupies, plus its fixed positions outside the copy runs.
    """
    variables = tuple(variables)
    k = len(variables)
    if n < 1:
        raise InputError("need n >= 1")
    rep = minimal_reparameterization(f, sig, variables, refine=False,
                                     budget_states=budget_states,
                                     budget_monoid=budget_monoid)
    if rep.bound == 0:
        raise InputError("formula is unsatisfiable")
    d = rep.dimension
    if d == 0:
        got = shortest_accepted(compile_dfa(f, sig, variables, budget_states))
        if got is None:
            raise ChainrepError("satisfiable formula with empty automaton")
        if k == 0:
            return WitnessStructure(f, variables, got, (), 1,
                                    "closed formula: shortest accepted word")
        return WitnessStructure(f, variables, got.word, got.marks, 1,
                                "dimension 0: one satisfying tuple suffices")
    if _mentions_so(rep.g):
        raise ResourceLimitError(
            "the image map mentions set quantifiers; its fiber search "
            "does not finish in reasonable time", subject="oracle")
    psi = exists_wrap(rep.domain_vars, rep.g)
    algebra = TypeAlgebra.build(psi, sig, rep.image_vars, budget_states, budget_monoid)
    found = _all_pumpable_family(algebra)
    if found is None:
        raise InputError("minimal image admits no family pumping at every mark")
    fam, es = found
    monoid = algebra.monoid
    m = 2 * k + 3
    r = k + 2
    # base word with m copies per block; marks at the r-th copy starts
    base_letters, base_geom = _blocks_word(monoid, fam, es, m)
    base = Word(sig, tuple(base_letters))
    marks = tuple(run + (r - 1) * unit for run, unit, _ in base_geom)
    assign = dict(zip(rep.image_vars, marks))
    fiber = None
    for xs in itertools.product(range(len(base)), repeat=k):
        assign.update(zip(rep.domain_vars, xs))
        if evaluate(rep.g, base, fo=assign):
            fiber = xs
            break
    if fiber is None:
        raise ChainrepError("image family has no fiber on its base word")
    # classify the base fiber: offsets inside copy runs recur in every
    # copy of the grown word, positions outside shift with their block
    grown_letters, grown_geom = _blocks_word(monoid, fam, es, m + n)
    copy_offsets = [set() for _ in range(d)]
    pool = set()
    for a in fiber:
        for i, (run, unit, tail) in enumerate(base_geom):
            if run <= a < tail:
                copy_offsets[i].add((a - run) % unit)
                break
        else:
            pool.add(_shifted(a, base_geom, n))
    for i, (run, unit, _) in enumerate(grown_geom):
        for c in range(m + n):
            for o in copy_offsets[i]:
                pool.add(run + c * unit + o)
    return WitnessStructure(
        f, variables, Word(sig, tuple(grown_letters)), tuple(sorted(pool)),
        n ** d,
        f"image family {fam.types}: {d} blocks of {m + n} idempotent copies; "
        f"marks slide over the last {n} copies per block and fibers follow")


def _shifted(a: int, base_geom, n: int) -> int:
    """Position of a base point outside all copy runs once each run grows by n."""
    out = a
    for _, unit, tail in base_geom:
        if a >= tail:
            out += n * unit
    return out
