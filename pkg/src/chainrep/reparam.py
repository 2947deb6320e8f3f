"""Bounded-fiber reparameterizations of formulas with marked variables.

The dimension of a formula f(x1..xk) measures how many coordinates are
really free in its satisfying tuples: a reparameterization trades the k
domain variables for d image variables through a map with fibers of bounded
size, definable inside the same logic.  The machinery here finds a map of
minimal dimension by eliminating, one at a time, marks whose adjacent
segment pair cannot absorb pumping, and proves minimality implicitly: when
every tuple family pumps at every mark, the tuple count grows like n**k and
no smaller image can cover it.

Most of the work happens per order case (a fixed weak ordering of the
domain tuple), where satisfying assignments are strictly ascending markings
of a word and the type algebra of segments applies.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, ResourceLimitError
from .formula import (And, AtLeast, Equal, ExistsFO, ExistsSO, ForallFO, ForallSO,
                      Formula, In, NameSupply, Not, Or, Implies, Signature, all_vars,
                      conj, disj, exists_wrap, free_variables, mk_false,
                      order_case_split, substitute)
from .compiler import (DEFAULT_STATE_BUDGET, Dfa, compile as compile_dfa, dfa_empty,
                       dfa_to_formula, minimize_dfa)
from .monoid import (DEFAULT_MONOID_BUDGET, TypeMonoid, is_pumpable, mark_shadow,
                     ramsey_bound, transition_monoid)
from .words import MarkedWord

DEFAULT_REFINE_CAP = 8

# refinement compiles are best-effort: keep them cheap and fall back to the
# certificate bound instead of grinding on guard-heavy maps
_REFINE_STATE_BUDGET = 20_000

# Two conventions in this module that are easy to get wrong, spelled out
# because published variants of the misprinted form circulate.
ERRATUM_NOTES = (
    "Eliminability of the i-th mark is decided on the segment pair"
    " (tau[i-1], tau[i]), the two intervals meeting at that mark; indexing"
    " the test as (tau[i], tau[i+1]) runs out of range at the last mark and"
    " pairs each mark with the wrong intervals.",
    "After deleting the i-th variable the image equalities read u_j = x_j"
    " for j < i and u_j = x_{j+1} for j >= i; the variant u_j = x_{j-1} for"
    " j > i leaves u_i unconstrained and refers to the deleted variable.",
)


@dataclass(frozen=True)
class Step:
    """Node of a provenance tree recording how a reparameterization arose."""

    kind: str
    detail: str = ""
    children: tuple["Step", ...] = ()

    def dump(self, indent: int = 0) -> str:
        line = "  " * indent + self.kind + (f": {self.detail}" if self.detail else "")
        return "\n".join([line] + [c.dump(indent + 1) for c in self.children])


@dataclass(frozen=True)
class Disjunct:
    """One family of the local normal form: a (k+1)-tuple of segment types."""

    types: tuple[int, ...]


@dataclass
class TypeAlgebra:
    """A compiled formula together with the monoid acting on its segments.

    For arity zero the monoid is the plain transition monoid of the
    sentence automaton; otherwise it is the transition monoid of the
    mark-shadow doubling, whose row-0 entries see their first letter as
    marked.
    """

    formula: Formula
    sig: Signature
    variables: tuple[str, ...]
    dfa: Dfa
    shadow: Dfa | None
    monoid: TypeMonoid

    @classmethod
    def build(cls, formula, sig, variables,
              budget_states: int = DEFAULT_STATE_BUDGET,
              budget_monoid: int = DEFAULT_MONOID_BUDGET,
              dfa: Dfa | None = None) -> "TypeAlgebra":
        variables = tuple(variables)
        if dfa is None:
            dfa = compile_dfa(formula, sig, variables, budget_states)
        if variables:
            shadow = mark_shadow(dfa)
            monoid = transition_monoid(shadow, budget_monoid)
        else:
            shadow = None
            monoid = transition_monoid(dfa, budget_monoid)
        return cls(formula, sig, variables, dfa, shadow, monoid)

    @property
    def arity(self) -> int:
        return len(self.variables)

    def segment_types(self, mw: MarkedWord) -> tuple[int, ...]:
        """Types of the k+1 segments a marking cuts its word into.

        Segment 0 is the (possibly empty) prefix before the first mark;
        segment i starts at the i-th mark inclusive and is never empty.
        """
        if len(mw.marks) != self.arity:
            raise InputError(f"expected {self.arity} marks, got {len(mw.marks)}")
        letters = mw.word.letters
        m = self.monoid
        if not self.variables:
            return (m.image_of_word(letters),)
        cuts = list(mw.marks) + [len(letters)]
        out = [m.image_of_word(letters[:cuts[0]])]
        for j in range(len(mw.marks)):
            out.append(m.image_of_word(letters[cuts[j]:cuts[j + 1]]))
        return tuple(out)

    def accepts_chain(self, taus) -> bool:
        """Whether markings with these segment types satisfy the formula.

        Runs the chain through the shadow monoid: the prefix acts on row 1,
        each later segment enters on row 0 so its first letter is read as
        marked.  Segments after the prefix must be realizable nonempty.
        """
        taus = tuple(taus)
        if len(taus) != self.arity + 1:
            raise InputError(f"expected {self.arity + 1} types, got {len(taus)}")
        m = self.monoid
        if not self.variables:
            return m.apply(taus[0], self.dfa.init) in self.dfa.accepting
        q = m.elements[taus[0]][2 * self.dfa.init + 1] >> 1
        for t in taus[1:]:
            if m.nonempty_witness[t] is None:
                return False
            q = m.elements[t][2 * q] >> 1
        return q in self.dfa.accepting


@dataclass(frozen=True)
class Reparameterization:
    """A fiber-bounded definable map from domain tuples to image tuples.

    g relates domain and image variables; over each word, every satisfying
    assignment of source gets exactly one image, only satisfying
    assignments get one, and at most `bound` of them share it.
    """

    source: Formula
    signature: Signature
    domain_vars: tuple[str, ...]
    image_vars: tuple[str, ...]
    g: Formula
    bound: int
    provenance: Step

    @property
    def dimension(self) -> int:
        return len(self.image_vars)

    def describe(self) -> str:
        head = (f"dimension {self.dimension}, bound {self.bound}, "
                f"{', '.join(self.domain_vars) or 'no domain'} -> "
                f"{', '.join(self.image_vars) or 'point'}")
        return head + "\n" + self.provenance.dump()


def local_normal_form(algebra: TypeAlgebra) -> tuple[Disjunct, ...]:
    """All accepted segment-type tuples, in monoid-index lexicographic order.

    The prefix type ranges over the whole monoid; later coordinates only
    over nonempty-realizable elements.  Every strictly ascending satisfying
    marking has its segment types in exactly one disjunct, and every
    disjunct is realized by some marking.
    """
    m = algebra.monoid
    a = algebra.dfa
    k = algebra.arity
    if k == 0:
        return tuple(Disjunct((t,)) for t in range(m.size)
                     if m.apply(t, a.init) in a.accepting)
    ne = [t for t in range(m.size) if m.nonempty_witness[t] is not None]
    # reach[i] = shadow-row states from which i more segments can accept
    reach: list[set[int]] = [set() for _ in range(k + 1)]
    reach[k] = set(a.accepting)
    for i in range(k, 0, -1):
        prev = set()
        for q in range(a.n_states):
            for t in ne:
                if m.elements[t][2 * q] >> 1 in reach[i]:
                    prev.add(q)
                    break
        reach[i - 1] = prev
    out: list[Disjunct] = []
    prefix: list[int] = []

    def descend(i: int, q: int):
        if i == k:
            out.append(Disjunct(tuple(prefix)))
            return
        for t in ne:
            q2 = m.elements[t][2 * q] >> 1
            if q2 in reach[i + 1]:
                prefix.append(t)
                descend(i + 1, q2)
                prefix.pop()

    for t0 in range(m.size):
        q1 = m.elements[t0][2 * a.init + 1] >> 1
        if q1 in reach[0]:
            prefix.append(t0)
            descend(0, q1)
            prefix.pop()
    return tuple(out)


def eliminable_pairs(algebra: TypeAlgebra, disjunct: Disjunct) -> tuple[int, ...]:
    """1-based mark indices whose adjacent segment pair admits no pumping."""
    out = []
    for i in range(1, algebra.arity + 1):
        if is_pumpable(algebra.monoid, disjunct.types[i - 1], disjunct.types[i]) is None:
            out.append(i)
    return tuple(out)


def _unsat_rep(source: Formula, sig: Signature, domain_vars) -> Reparameterization:
    return Reparameterization(source, sig, tuple(domain_vars), (), mk_false(), 0,
                              Step("empty", "no satisfying assignment on any word"))


def eliminate_variable(source: Formula, sig: Signature, domain_vars, index: int,
                       n_families: int, monoid_size: int,
                       supply: NameSupply | None = None) -> Reparameterization:
    """One elimination step: drop the index-th domain variable (1-based).

    The map keeps the others, u_j = x_j below the index and u_j = x_{j+1}
    from it on.  Valid when no family of source pumps at that mark; the
    fiber over an image is then below n_families * ramsey_bound(monoid_size),
    since a longer run of candidate positions for the dropped mark would
    yield a pumping idempotent for the adjacent segment pair.
    """
    domain_vars = tuple(domain_vars)
    k = len(domain_vars)
    if not 1 <= index <= k:
        raise InputError(f"index {index} out of range for {k} variables")
    if supply is None:
        supply = NameSupply(all_vars(source) | set(domain_vars))
    us = tuple(supply.fresh("u") for _ in range(k - 1))
    eqs = [Equal(us[j], domain_vars[j] if j < index - 1 else domain_vars[j + 1])
           for j in range(k - 1)]
    bound = n_families * ramsey_bound(monoid_size)
    return Reparameterization(
        source, sig, domain_vars, us, conj([source] + eqs), bound,
        Step("eliminate", f"variable {index} of {k}; "
                          f"bound {n_families} families x B({monoid_size})"))


def compose(first: Reparameterization, second: Reparameterization) -> Reparameterization:
    """first then second; fibers multiply.

    second's domain must match first's image up to renaming, and its image
    must not collide with first's image names.
    """
    mids = tuple(first.image_vars)
    if tuple(second.domain_vars) == mids:
        g2 = second.g
    else:
        if len(second.domain_vars) != len(mids):
            raise InputError("composition arity mismatch")
        if set(mids) & set(second.image_vars):
            raise InputError("variable collision in composition")
        g2 = substitute(second.g, dict(zip(second.domain_vars, mids)))
    g = exists_wrap(mids, And(first.g, g2))
    return Reparameterization(
        first.source, first.signature, first.domain_vars, second.image_vars,
        g, first.bound * second.bound,
        Step("compose", f"{first.bound} x {second.bound}",
             (first.provenance, second.provenance)))


def combine_disjuncts(source: Formula, sig: Signature, domain_vars, parts,
                      supply: NameSupply | None = None) -> Reparameterization:
    """First-match union of guarded reparameterizations over one domain.

    parts are (guard, rep) pairs whose guards cover the source domain; the
    j-th branch fires when its guard holds and no earlier one does.  All
    branches share one image tuple of the widest width: narrower images are
    padded by repeating their last variable, and a zero-width satisfiable
    branch pins every image variable to the first domain variable.  Bounds
    add up.
    """
    parts = list(parts)
    domain_vars = tuple(domain_vars)
    if not domain_vars:
        raise InputError("combine needs at least one domain variable")
    if not parts:
        return _unsat_rep(source, sig, domain_vars)
    for _, rep in parts:
        if tuple(rep.domain_vars) != domain_vars:
            raise InputError("parts disagree on domain variables")
    if supply is None:
        names = set(domain_vars) | all_vars(source)
        for guard, rep in parts:
            names |= all_vars(guard) | all_vars(rep.g) | set(rep.image_vars)
        supply = NameSupply(names)
    width = max(len(rep.image_vars) for _, rep in parts)
    ys = tuple(supply.fresh("y") for _ in range(width))
    branches = []
    negs: list[Formula] = []
    total = 0
    children = []
    for guard, rep in parts:
        mj = len(rep.image_vars)
        gj = substitute(rep.g, dict(zip(rep.image_vars, ys[:mj])), supply) if mj else rep.g
        pieces = list(negs) + [guard, gj]
        if mj < width:
            base = ys[mj - 1] if mj else domain_vars[0]
            pieces += [Equal(ys[t], base) for t in range(mj, width)]
        branches.append(conj(pieces))
        negs.append(Not(guard))
        total += rep.bound
        children.append(rep.provenance)
    return Reparameterization(
        source, sig, domain_vars, ys, disj(branches), total,
        Step("combine", f"{len(parts)} guarded branches", tuple(children)))


def _type_tuple_dfa(algebra: TypeAlgebra, disjuncts,
                    budget_states: int = DEFAULT_STATE_BUDGET) -> Dfa:
    """Marked automaton accepting exactly the markings with these type tuples.

    Tracks (segments consumed, running segment type, families still
    consistent) while reading; a marked letter closes the current segment
    and opens the next.  The result is minimized.
    """
    m = algebra.monoid
    k = algebra.arity
    if k == 0:
        raise InputError("type tuples of a sentence have no marks to guard")
    families = [d.types for d in disjuncts]
    nl = 1 << (algebra.sig.k + 1)
    mark_bit = 1 << algebra.sig.k
    dead = "dead"
    start = (0, m.identity, frozenset(range(len(families))))
    index = {start: 0, dead: 1}
    order = [start, dead]
    rows = []
    i = 0
    while i < len(order):
        cur = order[i]
        row = []
        for letter in range(nl):
            if cur == dead:
                row.append(1)
                continue
            seg, elem, alive = cur
            lab = letter & (mark_bit - 1)
            if letter & mark_bit:
                if seg == k:
                    row.append(1)
                    continue
                alive2 = frozenset(d for d in alive if families[d][seg] == elem)
                nxt = (seg + 1, m.letter_image[lab], alive2) if alive2 else dead
            else:
                nxt = (seg, m.multiply(elem, m.letter_image[lab]), alive)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                if len(order) > budget_states:
                    raise ResourceLimitError(
                        f"state budget exceeded ({len(order)} > {budget_states})",
                        budget=budget_states, subject="states")
            row.append(index[nxt])
        rows.append(row)
        i += 1
    accepting = frozenset(
        j for j, st in enumerate(order)
        if st != dead and st[0] == k and any(families[d][k] == st[1] for d in st[2]))
    raw = Dfa(algebra.sig, True, 0, tuple(tuple(r) for r in rows), accepting)
    return minimize_dfa(raw, budget_states)


def _case_rep(case_formula: Formula, sig: Signature, ys, supply: NameSupply,
              budget_states: int, budget_monoid: int, dfa: Dfa) -> Reparameterization:
    """Reparameterize one order case, valid under its ascending pattern."""
    ys = tuple(ys)
    kc = len(ys)
    algebra = TypeAlgebra.build(case_formula, sig, ys, budget_states, budget_monoid, dfa=dfa)
    families = local_normal_form(algebra)
    elim = [eliminable_pairs(algebra, d) for d in families]
    rigid = next((d for d, e in zip(families, elim) if not e), None)
    if rigid is not None:
        # some family pumps at every mark: the tuple count already grows
        # like n**kc, so the identity map is as small as it gets
        img = tuple(supply.fresh("y") for _ in range(kc))
        g = conj([case_formula] + [Equal(img[j], ys[j]) for j in range(kc)])
        return Reparameterization(
            case_formula, sig, ys, img, g, 1,
            Step("rigid", f"family {rigid.types} pumps at every mark; "
                          f"width {kc} is minimal"))
    shared = set(range(1, kc + 1))
    for e in elim:
        shared &= set(e)
    if shared:
        i = min(shared)
        step = eliminate_variable(case_formula, sig, ys, i,
                                  len(families), algebra.monoid.size, supply)
        return _descend(step, sig, supply, budget_states, budget_monoid)
    # no mark is eliminable across every family: split the families by
    # their first eliminable mark and guard each group by its type tuples
    groups: dict[int, list[Disjunct]] = {}
    for d, e in zip(families, elim):
        groups.setdefault(e[0], []).append(d)
    parts = []
    for i in sorted(groups):
        guard_dfa = _type_tuple_dfa(algebra, groups[i], budget_states)
        gamma = dfa_to_formula(guard_dfa, ys, supply)
        step = eliminate_variable(And(case_formula, gamma), sig, ys, i,
                                  len(groups[i]), algebra.monoid.size, supply)
        parts.append((gamma, _descend(step, sig, supply, budget_states, budget_monoid)))
    return combine_disjuncts(case_formula, sig, ys, parts, supply)


def _descend(step: Reparameterization, sig: Signature, supply: NameSupply,
             budget_states: int, budget_monoid: int) -> Reparameterization:
    """Recurse on the image of one elimination step and glue the maps."""
    psi = exists_wrap(step.domain_vars, step.g)
    inner = _minrep(psi, sig, step.image_vars, supply, budget_states, budget_monoid)
    return compose(step, inner)


def _minrep(f: Formula, sig: Signature, xs, supply: NameSupply,
            budget_states: int, budget_monoid: int) -> Reparameterization:
    xs = tuple(xs)
    if not xs:
        dfa = compile_dfa(f, sig, (), budget_states)
        if dfa_empty(dfa):
            return _unsat_rep(f, sig, xs)
        return Reparameterization(f, sig, (), (), f, 1,
                                  Step("base", "satisfiable sentence"))
    parts = []
    for case in order_case_split(f, xs):
        dfa = compile_dfa(case.formula, sig, case.representatives, budget_states)
        if dfa_empty(dfa):
            continue
        inner = _case_rep(case.formula, sig, case.representatives, supply,
                          budget_states, budget_monoid, dfa)
        pattern = "<".join("=".join(c) for c in case.classes)
        lifted = Reparameterization(
            f, sig, xs, inner.image_vars, inner.g, inner.bound,
            Step("case", pattern, (inner.provenance,)))
        parts.append((case.constraint, lifted))
    if not parts:
        return _unsat_rep(f, sig, xs)
    if len(parts) == 1:
        guard, rep = parts[0]
        return Reparameterization(f, sig, xs, rep.image_vars,
                                  And(guard, rep.g), rep.bound, rep.provenance)
    return combine_disjuncts(f, sig, xs, parts, supply)


def _mentions_so(f: Formula) -> bool:
    match f:
        case ExistsSO(_, _) | ForallSO(_, _) | In(_, _):
            return True
        case Not(g) | ExistsFO(_, g) | ForallFO(_, g) | AtLeast(_, _, g):
            return _mentions_so(g)
        case And(a, b) | Or(a, b) | Implies(a, b):
            return _mentions_so(a) or _mentions_so(b)
    return False


def _refine_bound(rep: Reparameterization, budget_states: int,
                  cap: int) -> Reparameterization:
    """Tighten the certificate bound to the exact maximal fiber size.

    Checks, for growing i, the sentence "some word carries i distinct
    domain tuples sharing one image"; the first empty one pins the bound.
    Gives up (keeping the certificate) past the cap, when a check blows
    the budget, or when the map mentions set quantifiers, whose product
    constructions are too heavy for a best-effort tightening.
    """
    k = len(rep.domain_vars)
    if k == 0 or rep.bound <= 1 or _mentions_so(rep.g):
        return rep
    budget_states = min(budget_states, _REFINE_STATE_BUDGET)
    supply = NameSupply(all_vars(rep.g) | set(rep.domain_vars) | set(rep.image_vars))
    xs = tuple(rep.domain_vars)
    hi = min(cap + 1, rep.bound)
    for i in range(2, hi + 1):
        copies = [tuple(supply.fresh("x") for _ in xs) for _ in range(i)]
        pieces = [substitute(rep.g, dict(zip(xs, cp)), supply) for cp in copies]
        for a in range(i):
            for b in range(a + 1, i):
                pieces.append(disj([Not(Equal(copies[a][t], copies[b][t]))
                                    for t in range(k)]))
        flat = [v for cp in copies for v in cp]
        sentence = exists_wrap(list(rep.image_vars) + flat, conj(pieces))
        try:
            dfa = compile_dfa(sentence, rep.signature, (), budget_states)
        except ResourceLimitError:
            return rep
        if dfa_empty(dfa):
            return Reparameterization(
                rep.source, rep.signature, rep.domain_vars, rep.image_vars,
                rep.g, i - 1,
                Step("refine", f"exact bound {i - 1}", (rep.provenance,)))
    return rep


def minimal_reparameterization(f: Formula, sig: Signature, marked_vars=None, *,
                               budget_states: int = DEFAULT_STATE_BUDGET,
                               budget_monoid: int = DEFAULT_MONOID_BUDGET,
                               refine: bool = True,
                               refine_cap: int = DEFAULT_REFINE_CAP) -> Reparameterization:
    """Minimal-dimension reparameterization of f over its marked variables.

    Splits into order cases, reduces each case by eliminating marks whose
    segment pairs cannot pump (splitting families by guards when they
    disagree on where), and recurses on the image.  The returned bound is a
    product/sum certificate; with refine it is tightened to the exact
    maximal fiber size whenever that is at most refine_cap and the check
    stays within budget.
    """
    if marked_vars is None:
        marked_vars = free_variables(f)
    marked_vars = tuple(marked_vars)
    extra = [v for v in free_variables(f) if v not in marked_vars]
    if extra:
        raise InputError(f"free variables {extra} are not marked")
    supply = NameSupply(all_vars(f) | set(marked_vars))
    rep = _minrep(f, sig, marked_vars, supply, budget_states, budget_monoid)
    if refine and rep.bound > 1:
        rep = _refine_bound(rep, budget_states, refine_cap)
    return rep


def decide_dimension(f: Formula, sig: Signature, marked_vars, dim: int, *,
                     budget_states: int = DEFAULT_STATE_BUDGET,
                     budget_monoid: int = DEFAULT_MONOID_BUDGET) -> bool:
    """Whether f admits a reparameterization of dimension at most dim."""
    if dim < 0:
        raise InputError("dimension must be nonnegative")
    rep = minimal_reparameterization(f, sig, marked_vars, refine=False,
                                     budget_states=budget_states,
                                     budget_monoid=budget_monoid)
    return rep.dimension <= dim
