"""Point interpretations of relational structures inside words.

An interpretation names components, each carrying a dimension and a
universe formula; an output element is a component tag plus a satisfying
tuple of positions.  Relation rules give, per output symbol and per tuple
of components, a formula over the concatenated coordinates.  Only
injective interpretations are supported: elements are the tuples
themselves, with no quotient.

Spec files are plain text, one directive per line, with # comments:

    signature P1 P2
    component pairs dim=2
    universe P1(x) & x < y
    relation E/2 on (pairs, pairs) := x < u

Each universe line attaches to the component declared above it.  The free
first-order variables of a formula, in order of first occurrence, are the
coordinates: a universe needs exactly dim of them, a relation formula
exactly the sum of its components' dimensions.  A formula that must use
its variables out of occurrence order can pin the order first with
vacuous atoms such as "x = x & ...".

reduce_interpretation rebuilds an equivalent interpretation whose
components all have dimension at most d, replacing each component q by
copies (q, i): the i-th preimage, in position-lexicographic order, of an
image of q's minimal reparameterization.  check_equivalence replays the
bookkeeping as an explicit bijection on small words.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ChainrepError, InputError, ResourceLimitError
from .formula import (Formula, NameSupply, Signature, all_vars, conj, exists_wrap,
                      free_set_variables, free_variables, ith_lex_selector, parse,
                      render, substitute)
from .compiler import DEFAULT_STATE_BUDGET
from .monoid import DEFAULT_MONOID_BUDGET
from .oracle import CheckReport, evaluate, satisfying_tuples
from .reparam import Reparameterization, minimal_reparameterization
from .words import Word, all_words

# components with more preimage copies than this produce unusably wide
# reduced specs long before they produce answers
MAX_COMPONENT_COPIES = 64


@dataclass(frozen=True)
class Component:
    name: str
    dim: int
    universe: Formula
    variables: tuple[str, ...]


@dataclass(frozen=True)
class RelationRule:
    relation: str
    components: tuple[str, ...]
    formula: Formula
    variables: tuple[str, ...]


@dataclass(frozen=True)
class InterpretationSpec:
    signature: Signature
    components: tuple[Component, ...]
    rules: tuple[RelationRule, ...]

    def component(self, name: str) -> Component:
        for c in self.components:
            if c.name == name:
                return c
        raise InputError(f"unknown component {name!r}")

    def arities(self) -> dict[str, int]:
        return {r.relation: len(r.components) for r in self.rules}

    def dump(self) -> str:
        lines = [f"signature {' '.join(self.signature.preds)}"]
        for c in self.components:
            lines.append(f"component {c.name} dim={c.dim}")
            lines.append(f"universe {render(c.universe)}")
        for r in self.rules:
            lines.append(f"relation {r.relation}/{len(r.components)} "
                         f"on ({', '.join(r.components)}) := {render(r.formula)}")
        return "\n".join(lines)


def _validated(sig, components, rules) -> InterpretationSpec:
    seen = set()
    for c in components:
        if c.name in seen:
            raise InputError(f"component {c.name!r} declared twice")
        seen.add(c.name)
        if c.dim < 0:
            raise InputError(f"component {c.name!r} has negative dimension")
        if free_set_variables(c.universe):
            raise InputError(f"universe of {c.name!r} has free set variables")
        if len(c.variables) != c.dim:
            raise InputError(
                f"universe of {c.name!r} uses {len(c.variables)} variables, "
                f"dimension says {c.dim}")
    spec = InterpretationSpec(sig, tuple(components), tuple(rules))
    arities: dict[str, int] = {}
    keys = set()
    for r in rules:
        arities.setdefault(r.relation, len(r.components))
        if arities[r.relation] != len(r.components):
            raise InputError(f"relation {r.relation!r} used at two arities")
        key = (r.relation, r.components)
        if key in keys:
            raise InputError(
                f"relation {r.relation!r} on {r.components} given twice")
        keys.add(key)
        if free_set_variables(r.formula):
            raise InputError(f"relation {r.relation!r} has free set variables")
        want = sum(spec.component(q).dim for q in r.components)
        if len(r.variables) != want:
            raise InputError(
                f"relation {r.relation!r} on {r.components} uses "
                f"{len(r.variables)} variables, components supply {want}")
    return spec


def parse_interpretation(text: str, sig: Signature | None = None) -> InterpretationSpec:
    """Read a spec file; a signature line overrides the sig argument."""
    components: list[Component] = []
    rules: list[RelationRule] = []
    pending: str | None = None
    pending_dim = 0
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "signature":
            sig = Signature(tuple(rest.replace(",", " ").split()))
            continue
        if head == "component":
            if pending is not None:
                raise InputError(f"component {pending!r} has no universe line")
            name, _, dim_part = rest.partition(" ")
            dim_part = dim_part.strip()
            if not name or not dim_part.startswith("dim="):
                raise InputError(f"bad component line: {line!r}")
            try:
                pending_dim = int(dim_part[4:])
            except ValueError:
                raise InputError(f"bad dimension in {line!r}") from None
            pending = name
            continue
        if sig is None:
            raise InputError("signature line must come before formulas")
        if head == "universe":
            if pending is None:
                raise InputError("universe line without a component")
            f = parse(rest, sig)
            components.append(Component(pending, pending_dim, f, free_variables(f)))
            pending = None
            continue
        if head == "relation":
            decl, sep, body = rest.partition(":=")
            if not sep:
                raise InputError(f"relation line misses ':=': {line!r}")
            name_part, _, on_part = decl.partition(" on ")
            name, _, arity_part = name_part.strip().partition("/")
            on_part = on_part.strip()
            if not name or not arity_part.isdigit() or not (
                    on_part.startswith("(") and on_part.endswith(")")):
                raise InputError(f"bad relation line: {line!r}")
            comps = tuple(q.strip() for q in on_part[1:-1].split(",") if q.strip())
            if len(comps) != int(arity_part):
                raise InputError(
                    f"relation {name!r} declares arity {arity_part} "
                    f"but lists {len(comps)} components")
            f = parse(body.strip(), sig)
            rules.append(RelationRule(name, comps, f, free_variables(f)))
            continue
        raise InputError(f"unknown directive {head!r}")
    if pending is not None:
        raise InputError(f"component {pending!r} has no universe line")
    if sig is None:
        raise InputError("no signature given")
    return _validated(sig, components, rules)


Element = tuple[str, tuple[int, ...]]


@dataclass(frozen=True)
class Structure:
    """A materialized output: tagged tuples and relations between them."""

    elements: tuple[Element, ...]
    relations: tuple[tuple[str, tuple[tuple[Element, ...], ...]], ...]

    def relation(self, name: str) -> tuple[tuple[Element, ...], ...]:
        for n, tuples in self.relations:
            if n == name:
                return tuples
        return ()

    def dump(self) -> str:
        lines = [f"element {c}({', '.join(map(str, t))})" for c, t in self.elements]
        for name, tuples in self.relations:
            for tup in tuples:
                args = ", ".join(f"{c}({', '.join(map(str, t))})" for c, t in tup)
                lines.append(f"relation {name}: {args}")
        return "\n".join(lines) if lines else "(empty structure)"


def apply_interpretation(spec: InterpretationSpec, word: Word) -> Structure:
    """Materialize the output structure on one word by direct evaluation."""
    if word.sig != spec.signature:
        raise InputError("word and spec use different signatures")
    per_comp: dict[str, list[Element]] = {}
    for c in spec.components:
        per_comp[c.name] = [(c.name, tup)
                            for tup in satisfying_tuples(c.universe, word, c.variables)]
    elements = tuple(e for c in spec.components for e in per_comp[c.name])
    relations: dict[str, set] = {r.relation: set() for r in spec.rules}
    for rule in spec.rules:
        pools = [per_comp[q] for q in rule.components]
        sat = set(satisfying_tuples(rule.formula, word, rule.variables))
        for combo in itertools.product(*pools):
            flat = tuple(p for _, tup in combo for p in tup)
            if flat in sat:
                relations[rule.relation].add(combo)
    packed = tuple((name, tuple(sorted(relations[name])))
                   for name in sorted(relations))
    return Structure(elements, packed)


@dataclass(frozen=True)
class ReducedComponent:
    name: str
    source: str
    index: int
    rep: Reparameterization
    selector: Formula


@dataclass(frozen=True)
class ReducedInterpretation:
    """A reduced spec plus the bookkeeping tying it back to its source."""

    source: InterpretationSpec
    spec: InterpretationSpec
    parts: tuple[ReducedComponent, ...]

    def part(self, name: str) -> ReducedComponent:
        for p in self.parts:
            if p.name == name:
                return p
        raise InputError(f"unknown reduced component {name!r}")

    def fibers(self, source_name: str, word: Word) -> dict[tuple, list[tuple]]:
        """Image tuple -> its preimage tuples in lexicographic order."""
        rep = next((p.rep for p in self.parts if p.source == source_name), None)
        if rep is None:
            raise InputError(f"no copies of component {source_name!r}")
        xs, ys = rep.domain_vars, rep.image_vars
        k = len(xs)
        out: dict[tuple, list[tuple]] = {}
        for tup in satisfying_tuples(rep.g, word, xs + ys):
            out.setdefault(tup[k:], []).append(tup[:k])
        for fiber in out.values():
            fiber.sort()
        return out

    def bijection(self, word: Word, fibers=None) -> dict[Element, Element]:
        """Reduced element -> source element, per the preimage bookkeeping."""
        out: dict[Element, Element] = {}
        cache: dict[str, dict] = dict(fibers) if fibers else {}
        for name, tup in apply_interpretation(self.spec, word).elements:
            part = self.part(name)
            if part.source not in cache:
                cache[part.source] = self.fibers(part.source, word)
            fiber = cache[part.source].get(tup, [])
            if len(fiber) < part.index:
                raise ChainrepError(
                    f"element {name}{tup} expects preimage {part.index}, "
                    f"fiber has {len(fiber)}")
            out[(name, tup)] = (part.source, fiber[part.index - 1])
        return out


def reduce_interpretation(spec: InterpretationSpec, d: int, *,
                          budget_states: int = DEFAULT_STATE_BUDGET,
                          budget_monoid: int = DEFAULT_MONOID_BUDGET) -> ReducedInterpretation:
    """Equivalent interpretation with all component dimensions at most d.

    Component q splits into (q, i) for i up to the preimage bound of a
    minimal reparameterization of its universe: the (q, i) elements are the
    images owning at least i preimages, standing for the i-th one.  Errors
    when some universe needs dimension above d.
    """
    if d < 0:
        raise InputError("dimension must be nonnegative")
    reps: dict[str, Reparameterization] = {}
    for c in spec.components:
        rep = minimal_reparameterization(c.universe, spec.signature, c.variables,
                                         budget_states=budget_states,
                                         budget_monoid=budget_monoid)
        if rep.dimension > d:
            raise InputError(
                f"component {c.name!r} needs dimension {rep.dimension}, "
                f"target is {d}")
        if rep.bound > MAX_COMPONENT_COPIES:
            raise ResourceLimitError(
                f"component {c.name!r} would split into {rep.bound} copies",
                budget=MAX_COMPONENT_COPIES, subject="component copies")
        reps[c.name] = rep
    parts: list[ReducedComponent] = []
    new_components: list[Component] = []
    copies: dict[str, list[str]] = {}
    for c in spec.components:
        rep = reps[c.name]
        copies[c.name] = []
        supply = NameSupply(all_vars(rep.g) | set(rep.domain_vars) | set(rep.image_vars))
        for i in range(1, rep.bound + 1):
            name = f"{c.name}.{i}"
            selector = ith_lex_selector(rep.g, rep.domain_vars, i, supply) \
                if rep.domain_vars else rep.g
            universe = exists_wrap(rep.domain_vars, selector)
            parts.append(ReducedComponent(name, c.name, i, rep, selector))
            new_components.append(Component(name, rep.dimension, universe,
                                            rep.image_vars))
            copies[c.name].append(name)
    new_rules: list[RelationRule] = []
    for rule in spec.rules:
        for combo in itertools.product(*(copies[q] for q in rule.components)):
            new_rules.append(_reduced_rule(spec, rule, combo,
                                           [next(p for p in parts if p.name == n)
                                            for n in combo]))
    reduced = _validated(spec.signature, new_components, new_rules)
    return ReducedInterpretation(spec, reduced, tuple(parts))


def _reduced_rule(spec: InterpretationSpec, rule: RelationRule, combo,
                  combo_parts) -> RelationRule:
    """Relation formula on reduced components: the original relation holds
    between the chosen preimages of the slots' images."""
    names = set()
    for p in combo_parts:
        names |= all_vars(p.rep.g) | set(p.rep.domain_vars) | set(p.rep.image_vars)
    names |= all_vars(rule.formula) | set(rule.variables)
    supply = NameSupply(names)
    slot_xs: list[tuple[str, ...]] = []
    slot_ys: list[tuple[str, ...]] = []
    selectors = []
    for p in combo_parts:
        xs = tuple(supply.fresh("x") for _ in p.rep.domain_vars)
        ys = tuple(supply.fresh("y") for _ in p.rep.image_vars)
        ren = dict(zip(p.rep.domain_vars + p.rep.image_vars, xs + ys))
        selectors.append(substitute(p.selector, ren, supply))
        slot_xs.append(xs)
        slot_ys.append(ys)
    flat_xs = [v for xs in slot_xs for v in xs]
    inner = substitute(rule.formula, dict(zip(rule.variables, flat_xs)), supply)
    body = conj(selectors + [inner])
    formula = exists_wrap(flat_xs, body)
    variables = tuple(v for ys in slot_ys for v in ys)
    return RelationRule(rule.relation, tuple(combo), formula, variables)


def check_equivalence(spec: InterpretationSpec, reduced: ReducedInterpretation,
                      max_len: int = 4) -> CheckReport:
    """Replay the reduction's bijection on every word up to max_len.

    Checks that the map from reduced to source elements is well defined,
    bijective, and preserves and reflects every relation; also that no
    fiber exceeds its component's copy count.  Reports the first failure.
    """
    src_arities = spec.arities()
    for name, arity in reduced.spec.arities().items():
        if src_arities.get(name) != arity:
            raise InputError("interpretations have different output signatures")
    words = 0
    max_fiber = 0
    for word in all_words(spec.signature, max_len):
        words += 1
        a = apply_interpretation(spec, word)
        b = apply_interpretation(reduced.spec, word)
        # components reduced to zero copies have no fibers; any element they
        # still produce surfaces below as a missed source element
        with_parts = [c for c in spec.components
                      if any(p.source == c.name for p in reduced.parts)]
        fibers = {c.name: reduced.fibers(c.name, word) for c in with_parts}
        try:
            pi = reduced.bijection(word, fibers)
        except ChainrepError as e:
            return CheckReport(False, words, max_fiber, f"word {word}: {e}")
        for c in with_parts:
            sizes = [len(f) for f in fibers[c.name].values()]
            if sizes:
                max_fiber = max(max_fiber, max(sizes))
                bound = next(p.rep.bound for p in reduced.parts
                             if p.source == c.name)
                if max(sizes) > bound:
                    return CheckReport(False, words, max_fiber,
                                       f"word {word}: component {c.name!r} has a "
                                       f"fiber of {max(sizes)}, bound {bound}")
        image = sorted(pi.values())
        if len(set(pi.values())) != len(pi):
            return CheckReport(False, words, max_fiber,
                               f"word {word}: bijection is not injective")
        if image != sorted(a.elements):
            return CheckReport(False, words, max_fiber,
                               f"word {word}: bijection misses source elements")
        if len(b.elements) != len(pi):
            return CheckReport(False, words, max_fiber,
                               f"word {word}: unmapped reduced elements")
        for name in {r.relation for r in spec.rules}:
            want = set(a.relation(name))
            got = {tuple(pi[e] for e in tup) for tup in b.relation(name)}
            if want != got:
                extra = got - want
                missing = want - got
                return CheckReport(
                    False, words, max_fiber,
                    f"word {word}: relation {name!r} differs "
                    f"(missing {sorted(missing)}, extra {sorted(extra)})")
    return CheckReport(True, words, max_fiber)
