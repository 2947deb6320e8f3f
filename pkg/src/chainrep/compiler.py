"""Compilation of formulas to deterministic finite automata.

Internally the classical construction is used: every variable, first- or
second-order, gets its own 0/1 track next to the label bits, and the usual
closure operations (product, complement within valid markings, track
projection with subset determinization, partition-refinement minimization)
are applied bottom-up.  The invariant maintained throughout is that an
automaton accepts exactly the encodings in which every first-order track
carries a single mark and the formula holds.

Publicly, automata for a formula with marked variables x1..xm read words
over an alphabet with ONE shared mark bit: the i-th marked position, left
to right, is the value of xi.  The final compilation step intersects with
the strict-ascending track order and then merges all tracks into the shared
bit.  Only assignments with x1 < ... < xm are representable; pipelines that
need other orderings split into order cases first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError, ResourceLimitError
from .formula import (And, AtLeast, Equal, ExistsFO, ExistsSO, ForallFO,
                      ForallSO, Formula, Implies, In, Less, NameSupply, Not,
                      Or, Pred, Signature, conj, disj, expand_macros,
                      free_set_variables, free_variables, is_fo_name, mk_false,
                      mk_true)
from .words import MarkedWord, Word, render_letter

DEFAULT_STATE_BUDGET = 10**6

# hard cap on delta entries of any intermediate automaton, to keep memory sane
_TRANSITION_CAP = 16_000_000


@dataclass(frozen=True)
class Dfa:
    """Total deterministic automaton over label letters, optionally marked.

    Letters are integers: bits 0..k-1 are the labels in signature order;
    for a marked automaton bit k is the shared mark bit.
    """

    sig: Signature
    marked: bool
    init: int
    delta: tuple[tuple[int, ...], ...]
    accepting: frozenset[int]

    @property
    def n_states(self) -> int:
        return len(self.delta)

    @property
    def n_letters(self) -> int:
        return 1 << (self.sig.k + (1 if self.marked else 0))

    def letter_name(self, letter: int) -> str:
        k = self.sig.k
        name = render_letter(self.sig, letter & ((1 << k) - 1))
        if self.marked and letter >> k & 1:
            name += "*"
        return name

    def run(self, w) -> bool:
        """Acceptance of a Word (or MarkedWord when the automaton is marked)."""
        if isinstance(w, MarkedWord):
            if not self.marked:
                if w.marks:
                    raise InputError("plain automaton cannot read marks")
                w = w.word
        elif self.marked:
            w = MarkedWord(w, ())
        q = self.init
        if self.marked:
            marks = set(w.marks)
            for i, mask in enumerate(w.word.letters):
                letter = mask | ((i in marks) << self.sig.k)
                q = self.delta[q][letter]
        else:
            for mask in w.letters:
                q = self.delta[q][mask]
        return q in self.accepting

    def dump(self) -> str:
        alphabet = ", ".join(self.letter_name(a) for a in range(self.n_letters))
        acc = ",".join(str(q) for q in sorted(self.accepting))
        lines = [f"dfa states={self.n_states} init={self.init} "
                 f"accepting=[{acc}] alphabet=[{alphabet}]"]
        for q in range(self.n_states):
            for a in range(self.n_letters):
                lines.append(f"{q} {self.letter_name(a)} {self.delta[q][a]}")
        return "\n".join(lines)


@dataclass
class _Auto:
    """Internal total DFA over label bits plus one track per variable."""

    sig: Signature
    fo: tuple[str, ...]
    so: tuple[str, ...]
    n_letters: int
    init: int
    delta: list[list[int]]
    accepting: set[int]

    @property
    def n(self) -> int:
        return len(self.delta)

    def fo_bit(self, v: str) -> int:
        return self.sig.k + self.fo.index(v)

    def so_bit(self, s: str) -> int:
        return self.sig.k + len(self.fo) + self.so.index(s)


def _n_letters(sig, fo, so):
    return 1 << (sig.k + len(fo) + len(so))


class _Builder:
    def __init__(self, sig: Signature, budget: int):
        self.sig = sig
        self.budget = budget

    def _check(self, n: int, n_letters: int = 0):
        if n > self.budget:
            raise ResourceLimitError(
                f"state budget exceeded ({n} > {self.budget})",
                budget=self.budget, subject="states")
        if n_letters and n * n_letters > _TRANSITION_CAP:
            raise ResourceLimitError(
                f"transition table too large ({n} states x {n_letters} letters)",
                budget=_TRANSITION_CAP, subject="transitions")

    # ----- small automata -----

    def _fresh(self, fo, so, n_states, init, accepting) -> _Auto:
        nl = _n_letters(self.sig, fo, so)
        self._check(n_states)
        delta = [[0] * nl for _ in range(n_states)]
        return _Auto(self.sig, tuple(fo), tuple(so), nl, init, delta, set(accepting))

    def exactly_one(self, fo, so, v: str) -> _Auto:
        """Valid marking of one first-order track: a single 1 on it."""
        a = self._fresh(fo, so, 3, 0, {1})
        bit = a.fo_bit(v)
        for letter in range(a.n_letters):
            hit = letter >> bit & 1
            a.delta[0][letter] = 1 if hit else 0
            a.delta[1][letter] = 2 if hit else 1
            a.delta[2][letter] = 2
        return a

    def atom_less(self, x: str, y: str) -> _Auto:
        fo = tuple(sorted({x, y}))
        if x == y:
            a = self.exactly_one(fo, (), x)
            a.accepting = set()
            return a
        a = self._fresh(fo, (), 4, 0, {2})
        bx, by = a.fo_bit(x), a.fo_bit(y)
        for letter in range(a.n_letters):
            hx, hy = letter >> bx & 1, letter >> by & 1
            a.delta[0][letter] = 3 if hy else (1 if hx else 0)
            a.delta[1][letter] = 3 if hx else (2 if hy else 1)
            a.delta[2][letter] = 3 if (hx or hy) else 2
            a.delta[3][letter] = 3
        return a

    def atom_equal(self, x: str, y: str) -> _Auto:
        if x == y:
            return self.exactly_one((x,), (), x)
        fo = tuple(sorted({x, y}))
        a = self._fresh(fo, (), 3, 0, {1})
        bx, by = a.fo_bit(x), a.fo_bit(y)
        for letter in range(a.n_letters):
            hx, hy = letter >> bx & 1, letter >> by & 1
            a.delta[0][letter] = 1 if (hx and hy) else (2 if (hx or hy) else 0)
            a.delta[1][letter] = 2 if (hx or hy) else 1
            a.delta[2][letter] = 2
        return a

    def atom_pred(self, name: str, x: str) -> _Auto:
        p = self.sig.index(name)
        a = self._fresh((x,), (), 3, 0, {1})
        bx = a.fo_bit(x)
        for letter in range(a.n_letters):
            hx = letter >> bx & 1
            lab = letter >> p & 1
            a.delta[0][letter] = (1 if lab else 2) if hx else 0
            a.delta[1][letter] = 2 if hx else 1
            a.delta[2][letter] = 2
        return a

    def atom_in(self, s: str, x: str) -> _Auto:
        a = self._fresh((x,), (s,), 3, 0, {1})
        bx, bs = a.fo_bit(x), a.so_bit(s)
        for letter in range(a.n_letters):
            hx = letter >> bx & 1
            hs = letter >> bs & 1
            a.delta[0][letter] = (1 if hs else 2) if hx else 0
            a.delta[1][letter] = 2 if hx else 1
            a.delta[2][letter] = 2
        return a

    # ----- closure operations -----

    def extend(self, a: _Auto, fo_add=(), so_add=()) -> _Auto:
        nfo = tuple(sorted(set(a.fo) | set(fo_add)))
        nso = tuple(sorted(set(a.so) | set(so_add)))
        if nfo == a.fo and nso == a.so:
            return a
        nl = _n_letters(self.sig, nfo, nso)
        k = self.sig.k
        remap = []
        for letter in range(nl):
            old = letter & ((1 << k) - 1)
            for j, v in enumerate(a.fo):
                old |= (letter >> (k + nfo.index(v)) & 1) << (k + j)
            for j, s in enumerate(a.so):
                old |= (letter >> (k + len(nfo) + nso.index(s)) & 1) << (k + len(a.fo) + j)
            remap.append(old)
        out = _Auto(self.sig, nfo, nso, nl, a.init,
                    [[a.delta[q][remap[letter]] for letter in range(nl)]
                     for q in range(a.n)],
                    set(a.accepting))
        for v in nfo:
            if v not in a.fo:
                out = self.product(out, self.exactly_one(nfo, nso, v), "and")
        return out

    def align(self, a: _Auto, b: _Auto) -> tuple[_Auto, _Auto]:
        a2 = self.extend(a, b.fo, b.so)
        b2 = self.extend(b, a.fo, a.so)
        return a2, b2

    def product(self, a: _Auto, b: _Auto, op: str) -> _Auto:
        assert a.fo == b.fo and a.so == b.so
        nl = a.n_letters
        index = {(a.init, b.init): 0}
        order = [(a.init, b.init)]
        delta = []
        i = 0
        while i < len(order):
            qa, qb = order[i]
            row = []
            for letter in range(nl):
                t = (a.delta[qa][letter], b.delta[qb][letter])
                if t not in index:
                    index[t] = len(order)
                    order.append(t)
                    self._check(len(order), nl)
                row.append(index[t])
            delta.append(row)
            i += 1
        if op == "and":
            accepting = {i for i, (qa, qb) in enumerate(order)
                         if qa in a.accepting and qb in b.accepting}
        else:
            accepting = {i for i, (qa, qb) in enumerate(order)
                         if qa in a.accepting or qb in b.accepting}
        return _Auto(self.sig, a.fo, a.so, nl, 0, delta, accepting)

    def complement(self, a: _Auto) -> _Auto:
        out = _Auto(self.sig, a.fo, a.so, a.n_letters, a.init,
                    [row[:] for row in a.delta],
                    set(range(a.n)) - a.accepting)
        for v in a.fo:
            out = self.product(out, self.exactly_one(a.fo, a.so, v), "and")
        return self.minimize(out)

    def project(self, a: _Auto, kind: str, name: str) -> _Auto:
        k = self.sig.k
        if kind == "fo":
            bit = a.fo_bit(name)
            nfo = tuple(v for v in a.fo if v != name)
            nso = a.so
        else:
            bit = a.so_bit(name)
            nfo = a.fo
            nso = tuple(s for s in a.so if s != name)
        nl = a.n_letters >> 1
        low = (1 << bit) - 1
        expand = [(letter & low) | ((letter & ~low) << 1) for letter in range(nl)]
        index = {frozenset({a.init}): 0}
        order = [frozenset({a.init})]
        delta = []
        i = 0
        while i < len(order):
            cur = order[i]
            row = []
            for letter in range(nl):
                l0 = expand[letter]
                l1 = l0 | (1 << bit)
                t = frozenset(a.delta[q][l] for q in cur for l in (l0, l1))
                if t not in index:
                    index[t] = len(order)
                    order.append(t)
                    self._check(len(order), nl)
                row.append(index[t])
            delta.append(row)
            i += 1
        accepting = {i for i, s in enumerate(order) if s & a.accepting}
        out = _Auto(self.sig, nfo, nso, nl, 0, delta, accepting)
        return self.minimize(out)

    def minimize(self, a: _Auto) -> _Auto:
        # trim to reachable states first
        reach = [a.init]
        seen = {a.init}
        i = 0
        while i < len(reach):
            q = reach[i]
            for t in a.delta[q]:
                if t not in seen:
                    seen.add(t)
                    reach.append(t)
            i += 1
        ids = {q: i for i, q in enumerate(reach)}
        delta = [[ids[t] for t in a.delta[q]] for q in reach]
        accepting = {ids[q] for q in reach if q in a.accepting}
        n = len(reach)
        # Moore partition refinement
        cls = [1 if q in accepting else 0 for q in range(n)]
        while True:
            sigs = {}
            new = [0] * n
            for q in range(n):
                key = (cls[q], tuple(cls[t] for t in delta[q]))
                if key not in sigs:
                    sigs[key] = len(sigs)
                new[q] = sigs[key]
            if new == cls:
                break
            cls = new
        m = max(cls) + 1
        if m == n:
            out_delta, out_acc, out_init = delta, accepting, ids[a.init]
        else:
            rep = {}
            for q in range(n):
                rep.setdefault(cls[q], q)
            # stable ids by first representative
            order = sorted(rep, key=lambda c: rep[c])
            newid = {c: i for i, c in enumerate(order)}
            out_delta = [[newid[cls[delta[rep[c]][letter]]]
                          for letter in range(a.n_letters)] for c in order]
            out_acc = {newid[c] for c in order if rep[c] in accepting}
            out_init = newid[cls[ids[a.init]]]
        return _Auto(self.sig, a.fo, a.so, a.n_letters, out_init,
                     out_delta, out_acc)

    def ascending(self, fo, so, ordered_vars) -> _Auto:
        """Marks of ordered_vars appear one by one, in order, at distinct
        positions."""
        m = len(ordered_vars)
        a = self._fresh(fo, so, m + 2, 0, {m})
        dead = m + 1
        bits = [a.fo_bit(v) for v in ordered_vars]
        for letter in range(a.n_letters):
            hits = [j for j, b in enumerate(bits) if letter >> b & 1]
            for q in range(m + 1):
                if not hits:
                    a.delta[q][letter] = q
                elif hits == [q]:
                    a.delta[q][letter] = q + 1
                else:
                    a.delta[q][letter] = dead
            a.delta[dead][letter] = dead
        return a

    # ----- recursive construction -----

    def build(self, f: Formula) -> _Auto:
        match f:
            case Less(x, y):
                return self.atom_less(x, y)
            case Equal(x, y):
                return self.atom_equal(x, y)
            case Pred(name, x):
                return self.atom_pred(name, x)
            case In(s, x):
                return self.atom_in(s, x)
            case Not(g):
                return self.complement(self.build(g))
            case And(l, r):
                a, b = self.align(self.build(l), self.build(r))
                return self.minimize(self.product(a, b, "and"))
            case Or(l, r):
                a, b = self.align(self.build(l), self.build(r))
                return self.minimize(self.product(a, b, "or"))
            case Implies(l, r):
                return self.build(Or(Not(l), r))
            case ExistsFO(v, g):
                a = self.extend(self.build(g), fo_add=(v,))
                return self.project(a, "fo", v)
            case ForallFO(v, g):
                return self.build(Not(ExistsFO(v, Not(g))))
            case ExistsSO(s, g):
                a = self.extend(self.build(g), so_add=(s,))
                return self.project(a, "so", s)
            case ForallSO(s, g):
                return self.build(Not(ExistsSO(s, Not(g))))
        raise InputError(f"cannot compile {f!r}")

    def to_public(self, a: _Auto, ordered_vars) -> Dfa:
        k = self.sig.k
        if not ordered_vars:
            assert not a.fo and not a.so
            a = self.minimize(a)
            init, delta, accepting = _bfs_renumber(a.init, a.delta, a.accepting)
            return Dfa(self.sig, False, init, delta, frozenset(accepting))
        a = self.product(a, self.ascending(a.fo, a.so, ordered_vars), "and")
        a = self.minimize(a)
        # merge all tracks into the shared mark bit
        nl = 1 << (k + 1)
        track_mask = ((a.n_letters - 1) >> k) << k
        groups: list[list[int]] = [[] for _ in range(nl)]
        for letter in range(a.n_letters):
            lab = letter & ((1 << k) - 1)
            mark = 1 if letter & track_mask else 0
            groups[lab | mark << k].append(letter)
        index = {frozenset({a.init}): 0}
        order = [frozenset({a.init})]
        delta = []
        i = 0
        while i < len(order):
            cur = order[i]
            row = []
            for pub in range(nl):
                t = frozenset(a.delta[q][letter] for q in cur for letter in groups[pub])
                if t not in index:
                    index[t] = len(order)
                    order.append(t)
                    self._check(len(order), nl)
                row.append(index[t])
            delta.append(row)
            i += 1
        accepting = {i for i, s in enumerate(order) if s & a.accepting}
        out = self.minimize(_Auto(self.sig, (), (), nl, 0, delta, accepting))
        init, delta2, acc2 = _bfs_renumber(out.init, out.delta, out.accepting)
        return Dfa(self.sig, True, init, delta2, frozenset(acc2))


def _bfs_renumber(init, delta, accepting):
    order = [init]
    ids = {init: 0}
    i = 0
    while i < len(order):
        q = order[i]
        for t in delta[q]:
            if t not in ids:
                ids[t] = len(order)
                order.append(t)
        i += 1
    out_delta = tuple(tuple(ids[t] for t in delta[q]) for q in order)
    out_acc = {ids[q] for q in order if q in accepting}
    return 0, out_delta, out_acc


def compile(f: Formula, sig: Signature, marked_vars=(),
            budget_states: int = DEFAULT_STATE_BUDGET) -> Dfa:
    """Compile a formula to a DFA over (optionally marked) label letters.

    marked_vars lists the free first-order variables in the order their
    marks appear in a word; assignments are therefore restricted to strictly
    ascending tuples.  Free variables must be covered by marked_vars; free
    set variables are not allowed.
    """
    marked_vars = tuple(marked_vars)
    for v in marked_vars:
        if not is_fo_name(v):
            raise InputError(f"bad marked variable {v!r}")
    if len(set(marked_vars)) != len(marked_vars):
        raise InputError("marked variables must be distinct")
    f = expand_macros(f)
    if free_set_variables(f):
        raise InputError("formula has free set variables")
    extra = [v for v in free_variables(f) if v not in marked_vars]
    if extra:
        raise InputError(f"free variables {extra} are not marked")
    builder = _Builder(sig, budget_states)
    a = builder.build(f)
    a = builder.extend(a, fo_add=marked_vars)
    return builder.to_public(a, marked_vars)


def minimize_dfa(dfa: Dfa, budget_states: int = DEFAULT_STATE_BUDGET) -> Dfa:
    """Language-preserving minimization of an already built automaton."""
    builder = _Builder(dfa.sig, budget_states)
    a = _Auto(dfa.sig, (), (), dfa.n_letters, dfa.init,
              [list(row) for row in dfa.delta], set(dfa.accepting))
    out = builder.minimize(a)
    init, delta, acc = _bfs_renumber(out.init, out.delta, out.accepting)
    return Dfa(dfa.sig, dfa.marked, init, delta, frozenset(acc))


def dfa_empty(dfa: Dfa) -> bool:
    """True when the automaton accepts no word at all."""
    seen = {dfa.init}
    queue = [dfa.init]
    i = 0
    while i < len(queue):
        q = queue[i]
        if q in dfa.accepting:
            return False
        for t in dfa.delta[q]:
            if t not in seen:
                seen.add(t)
                queue.append(t)
        i += 1
    return True


def dfa_equivalent(a: Dfa, b: Dfa) -> bool:
    if a.sig != b.sig or a.marked != b.marked:
        raise InputError("automata are over different alphabets")
    seen = {(a.init, b.init)}
    queue = [(a.init, b.init)]
    i = 0
    while i < len(queue):
        qa, qb = queue[i]
        if (qa in a.accepting) != (qb in b.accepting):
            return False
        for letter in range(a.n_letters):
            t = (a.delta[qa][letter], b.delta[qb][letter])
            if t not in seen:
                seen.add(t)
                queue.append(t)
        i += 1
    return True


def shortest_accepted(dfa: Dfa):
    """Shortlex-first accepted word, as a Word or MarkedWord, or None."""
    if dfa.init in dfa.accepting:
        path = []
    else:
        back = {dfa.init: None}
        queue = [dfa.init]
        i = 0
        goal = None
        while i < len(queue) and goal is None:
            q = queue[i]
            for letter in range(dfa.n_letters):
                t = dfa.delta[q][letter]
                if t not in back:
                    back[t] = (q, letter)
                    if t in dfa.accepting:
                        goal = t
                        break
                    queue.append(t)
            i += 1
        if goal is None:
            return None
        path = []
        q = goal
        while back[q] is not None:
            q, letter = back[q]
            path.append(letter)
        path.reverse()
    k = dfa.sig.k
    if not dfa.marked:
        return Word(dfa.sig, tuple(path))
    letters = tuple(letter & ((1 << k) - 1) for letter in path)
    marks = tuple(i for i, letter in enumerate(path) if letter >> k & 1)
    return MarkedWord(Word(dfa.sig, letters), marks)


def project_mark(dfa: Dfa) -> Dfa:
    """Forget the mark bit: accept words that admit some accepted marking."""
    if not dfa.marked:
        raise InputError("automaton has no mark bit")
    k = dfa.sig.k
    nl = 1 << k
    index = {frozenset({dfa.init}): 0}
    order = [frozenset({dfa.init})]
    delta = []
    i = 0
    while i < len(order):
        cur = order[i]
        row = []
        for lab in range(nl):
            t = frozenset(dfa.delta[q][letter] for q in cur
                          for letter in (lab, lab | 1 << k))
            if t not in index:
                index[t] = len(order)
                order.append(t)
            row.append(index[t])
        delta.append(row)
        i += 1
    accepting = {i for i, s in enumerate(order) if s & dfa.accepting}
    builder = _Builder(dfa.sig, DEFAULT_STATE_BUDGET)
    out = builder.minimize(_Auto(dfa.sig, (), (), nl, 0, delta, accepting))
    init, delta2, acc2 = _bfs_renumber(out.init, out.delta, out.accepting)
    return Dfa(dfa.sig, False, init, delta2, frozenset(acc2))


def dfa_to_formula(dfa: Dfa, variables=(), supply: NameSupply | None = None) -> Formula:
    """A formula whose satisfying assignments are the accepted markings.

    For a marked automaton the free variables name the marks in ascending
    order; a plain automaton yields a sentence.  The run is encoded by
    ceil(log2 n) set variables holding the state bits after each position,
    pinned down inductively, so the formula is costly to evaluate but exact.
    """
    variables = tuple(variables)
    if dfa.marked and len(set(variables)) != len(variables):
        raise InputError("variables must be distinct")
    if not dfa.marked and variables:
        raise InputError("plain automaton takes no variables")
    if supply is None:
        supply = NameSupply(set(variables))
    n = dfa.n_states
    k = dfa.sig.k
    nbits = max(1, math.ceil(math.log2(n))) if n > 1 else 1
    zs = [f"Z{j}" for j in range(nbits)]
    p = supply.fresh("p")
    q = supply.fresh("q")
    r = supply.fresh("r")

    def state_bits(var, state):
        parts = []
        for j in range(nbits):
            atom = In(zs[j], var)
            parts.append(atom if state >> j & 1 else Not(atom))
        return conj(parts)

    def letter_test(var, letter):
        parts = []
        for i, name in enumerate(dfa.sig.preds):
            atom = Pred(name, var)
            parts.append(atom if letter >> i & 1 else Not(atom))
        if dfa.marked:
            marked_here = disj([Equal(var, v) for v in variables])
            if letter >> k & 1:
                parts.append(marked_here)
            else:
                parts.append(Not(marked_here))
        return conj(parts)

    is_first = Not(ExistsFO(q, Less(q, p)))
    is_last = Not(ExistsFO(q, Less(p, q)))
    first_rule = ForallFO(p, Implies(
        is_first,
        disj([And(letter_test(p, a), state_bits(p, dfa.delta[dfa.init][a]))
              for a in range(dfa.n_letters)])))
    succ = And(Less(p, q), Not(ExistsFO(r, And(Less(p, r), Less(r, q)))))
    step_rule = ForallFO(p, ForallFO(q, Implies(
        succ,
        disj([conj([state_bits(p, s), letter_test(q, a),
                    state_bits(q, dfa.delta[s][a])])
              for s in range(n) for a in range(dfa.n_letters)]))))
    last_rule = ForallFO(p, Implies(
        is_last,
        disj([state_bits(p, s) for s in sorted(dfa.accepting)])))
    run = conj([first_rule, step_rule, last_rule])
    for z in reversed(zs):
        run = ExistsSO(z, run)
    empty = Not(ExistsFO(p, Equal(p, p)))
    empty_ok = mk_true() if (dfa.init in dfa.accepting and not variables) else mk_false()
    if variables:
        # with at least one mark the word cannot be empty
        return And(ExistsFO(p, Equal(p, p)), run)
    return Or(And(empty, empty_ok), And(Not(empty), run))
