"""Monadic second-order formulas over finite labelled linear orders.

Concrete syntax, loosest to tightest binding:

    ex x. f     all x. f     EX X. f     ALL X. f     atleast 3 x. f
    f -> g
    f | g
    f & g
    ~f
    x < y    x = y    P1(x)    X(x)

Quantifier bodies extend as far right as possible.  First-order variables
start with a lowercase letter, set variables with an uppercase letter.  A
name applied like a predicate resolves against the signature; an applied
name of shape P<digits> that is not in the signature is rejected instead of
being treated as a set variable.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .errors import InputError, ParseError

KEYWORDS = frozenset({"ex", "all", "EX", "ALL", "atleast"})

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_NUMBERED_PRED_RE = re.compile(r"P\d+\Z")


def is_fo_name(name: str) -> bool:
    return bool(_NAME_RE.match(name)) and name[0].islower() and name not in KEYWORDS


def is_so_name(name: str) -> bool:
    return bool(_NAME_RE.match(name)) and name[0].isupper() and name not in KEYWORDS


@dataclass(frozen=True)
class Signature:
    """Ordered tuple of unary predicate names labelling positions."""

    preds: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "preds", tuple(self.preds))
        seen = set()
        for name in self.preds:
            if not is_so_name(name):
                raise InputError(f"bad predicate name {name!r}")
            if name in seen:
                raise InputError(f"duplicate predicate {name!r}")
            seen.add(name)

    @property
    def k(self) -> int:
        return len(self.preds)

    def index(self, name: str) -> int:
        try:
            return self.preds.index(name)
        except ValueError:
            raise InputError(f"unknown predicate {name!r}") from None

    @classmethod
    def of_size(cls, k: int) -> "Signature":
        return cls(tuple(f"P{i + 1}" for i in range(k)))

    @classmethod
    def from_text(cls, text: str) -> "Signature":
        names = [part.strip() for part in text.split(",") if part.strip()]
        return cls(tuple(names))


class Formula:
    """Base class for AST nodes."""

    __slots__ = ()

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Less(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Equal(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Pred(Formula):
    name: str
    var: str


@dataclass(frozen=True)
class In(Formula):
    setvar: str
    var: str


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ExistsFO(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForallFO(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ExistsSO(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForallSO(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class AtLeast(Formula):
    """At least `count` distinct positions satisfy the body."""

    count: int
    var: str
    body: Formula


_TOKEN_RE = re.compile(r"->|[()<=~&|.]|\d+|[A-Za-z][A-Za-z0-9_]*")


def _tokenize(text: str) -> list[tuple[str, int]]:
    toks = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", text, i)
        toks.append((m.group(), i))
        i = m.end()
    return toks


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.text = text
        self.sig = sig
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, expected=None):
        if self.i >= len(self.toks):
            msg = "unexpected end of input"
            if expected is not None:
                msg += f", expected {expected!r}"
            raise ParseError(msg, self.text, len(self.text))
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", self.text, pos)
        self.i += 1
        return tok, pos

    def expr(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.expr())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok in ("ex", "all"):
            self.take()
            v, pos = self.take()
            if not is_fo_name(v):
                raise ParseError(f"expected a first-order variable, found {v!r}", self.text, pos)
            self.take(".")
            body = self.expr()
            return ExistsFO(v, body) if tok == "ex" else ForallFO(v, body)
        if tok in ("EX", "ALL"):
            self.take()
            v, pos = self.take()
            if not is_so_name(v):
                raise ParseError(f"expected a set variable, found {v!r}", self.text, pos)
            if v in self.sig.preds or _NUMBERED_PRED_RE.match(v):
                raise ParseError(f"{v!r} is reserved for predicates", self.text, pos)
            self.take(".")
            body = self.expr()
            return ExistsSO(v, body) if tok == "EX" else ForallSO(v, body)
        if tok == "atleast":
            self.take()
            num, pos = self.take()
            if not num.isdigit():
                raise ParseError(f"expected a count, found {num!r}", self.text, pos)
            v, vpos = self.take()
            if not is_fo_name(v):
                raise ParseError(f"expected a first-order variable, found {v!r}", self.text, vpos)
            self.take(".")
            return AtLeast(int(num), v, self.expr())
        return self.atom()

    def atom(self) -> Formula:
        if self.peek() == "(":
            self.take()
            f = self.expr()
            self.take(")")
            return f
        name, pos = self.take()
        if not name[0].isalpha():
            raise ParseError(f"unexpected token {name!r}", self.text, pos)
        if name in KEYWORDS:
            raise ParseError(f"unexpected keyword {name!r}", self.text, pos)
        if self.peek() == "(":
            if not name[0].isupper():
                raise ParseError(f"{name!r} cannot be applied, predicates and set variables are uppercase", self.text, pos)
            self.take()
            arg, apos = self.take()
            if not is_fo_name(arg):
                raise ParseError(f"expected a first-order variable, found {arg!r}", self.text, apos)
            self.take(")")
            if name in self.sig.preds:
                return Pred(name, arg)
            if _NUMBERED_PRED_RE.match(name):
                raise ParseError(f"unknown predicate {name!r}", self.text, pos)
            return In(name, arg)
        if name[0].isupper():
            raise ParseError(f"set variable {name!r} must be applied to a position", self.text, pos)
        rel, rpos = self.take()
        if rel not in ("<", "="):
            raise ParseError(f"expected '<' or '=' after {name!r}, found {rel!r}", self.text, rpos)
        other, opos = self.take()
        if not is_fo_name(other):
            raise ParseError(f"expected a first-order variable, found {other!r}", self.text, opos)
        return Less(name, other) if rel == "<" else Equal(name, other)


def parse(text: str, sig: Signature) -> Formula:
    p = _Parser(text, sig)
    f = p.expr()
    if p.peek() is not None:
        tok, pos = p.toks[p.i]
        raise ParseError(f"trailing input {tok!r}", text, pos)
    return f


def _render(f: Formula, ctx: int) -> str:
    match f:
        case Less(a, b):
            s, prec = f"{a} < {b}", 5
        case Equal(a, b):
            s, prec = f"{a} = {b}", 5
        case Pred(name, v) | In(name, v):
            s, prec = f"{name}({v})", 5
        case Not(g):
            s, prec = "~" + _render(g, 4), 4
        case And(a, b):
            s, prec = _render(a, 3) + " & " + _render(b, 4), 3
        case Or(a, b):
            s, prec = _render(a, 2) + " | " + _render(b, 3), 2
        case Implies(a, b):
            s, prec = _render(a, 2) + " -> " + _render(b, 1), 1
        case ExistsFO(v, g):
            s, prec = f"ex {v}. " + _render(g, 0), 0
        case ForallFO(v, g):
            s, prec = f"all {v}. " + _render(g, 0), 0
        case ExistsSO(v, g):
            s, prec = f"EX {v}. " + _render(g, 0), 0
        case ForallSO(v, g):
            s, prec = f"ALL {v}. " + _render(g, 0), 0
        case AtLeast(n, v, g):
            s, prec = f"atleast {n} {v}. " + _render(g, 0), 0
        case _:
            raise InputError(f"not a formula: {f!r}")
    if prec < ctx:
        return "(" + s + ")"
    return s


def render(f: Formula) -> str:
    """Canonical text for f.  parse(render(f)) == f."""
    return _render(f, 0)


def free_variables(f: Formula) -> tuple[str, ...]:
    """Free first-order variables in order of first occurrence."""
    out: list[str] = []

    def go(node, bound):
        match node:
            case Less(a, b) | Equal(a, b):
                for v in (a, b):
                    if v not in bound and v not in out:
                        out.append(v)
            case Pred(_, v) | In(_, v):
                if v not in bound and v not in out:
                    out.append(v)
            case Not(g):
                go(g, bound)
            case And(a, b) | Or(a, b) | Implies(a, b):
                go(a, bound)
                go(b, bound)
            case ExistsFO(v, g) | ForallFO(v, g) | AtLeast(_, v, g):
                go(g, bound | {v})
            case ExistsSO(_, g) | ForallSO(_, g):
                go(g, bound)

    go(f, frozenset())
    return tuple(out)


def free_set_variables(f: Formula) -> tuple[str, ...]:
    """Free set variables in order of first occurrence."""
    out: list[str] = []

    def go(node, bound):
        match node:
            case In(s, _):
                if s not in bound and s not in out:
                    out.append(s)
            case Not(g):
                go(g, bound)
            case And(a, b) | Or(a, b) | Implies(a, b):
                go(a, bound)
                go(b, bound)
            case ExistsFO(_, g) | ForallFO(_, g) | AtLeast(_, _, g):
                go(g, bound)
            case ExistsSO(s, g) | ForallSO(s, g):
                go(g, bound | {s})

    go(f, frozenset())
    return tuple(out)


def all_vars(f: Formula) -> frozenset[str]:
    """Every variable name occurring in f, free or bound, either order."""
    out: set[str] = set()

    def go(node):
        match node:
            case Less(a, b) | Equal(a, b):
                out.add(a)
                out.add(b)
            case Pred(_, v):
                out.add(v)
            case In(s, v):
                out.add(s)
                out.add(v)
            case Not(g):
                go(g)
            case And(a, b) | Or(a, b) | Implies(a, b):
                go(a)
                go(b)
            case (ExistsFO(v, g) | ForallFO(v, g) | ExistsSO(v, g)
                  | ForallSO(v, g) | AtLeast(_, v, g)):
                out.add(v)
                go(g)

    go(f)
    return frozenset(out)


def quantifier_rank(f: Formula) -> int:
    match f:
        case Less() | Equal() | Pred() | In():
            return 0
        case Not(g):
            return quantifier_rank(g)
        case And(a, b) | Or(a, b) | Implies(a, b):
            return max(quantifier_rank(a), quantifier_rank(b))
        case ExistsFO(_, g) | ForallFO(_, g) | ExistsSO(_, g) | ForallSO(_, g):
            return 1 + quantifier_rank(g)
        case AtLeast(n, _, g):
            return n + quantifier_rank(g)
    raise InputError(f"not a formula: {f!r}")


class NameSupply:
    """Deterministic fresh-name generator avoiding a given set of names."""

    def __init__(self, avoid=()):
        self._avoid = set(avoid)
        self._counters: dict[str, int] = {}

    def fresh(self, prefix: str = "u") -> str:
        n = self._counters.get(prefix, 0)
        while True:
            cand = f"{prefix}{n}"
            n += 1
            if cand not in self._avoid:
                self._counters[prefix] = n
                self._avoid.add(cand)
                return cand

    def reserve(self, names):
        self._avoid.update(names)


def substitute(f: Formula, mapping: dict[str, str], supply: NameSupply | None = None) -> Formula:
    """Rename free first-order variables, avoiding capture by renaming binders."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return f
    for k, v in mapping.items():
        if not is_fo_name(k) or not is_fo_name(v):
            raise InputError("substitute only renames first-order variables")
    if supply is None:
        supply = NameSupply(all_vars(f) | set(mapping) | set(mapping.values()))
    return _subst(f, mapping, supply)


def _subst_binder(v, g, m, supply):
    live = {k: w for k, w in m.items() if k != v}
    if live:
        fvs = set(free_variables(g))
        live = {k: w for k, w in live.items() if k in fvs}
    if not live:
        return v, g
    if v in live.values():
        nv = supply.fresh(v)
        g = _subst(g, {v: nv}, supply)
        v = nv
    return v, _subst(g, live, supply)


def _subst(f, m, supply):
    match f:
        case Less(a, b):
            return Less(m.get(a, a), m.get(b, b))
        case Equal(a, b):
            return Equal(m.get(a, a), m.get(b, b))
        case Pred(p, v):
            return Pred(p, m.get(v, v))
        case In(s, v):
            return In(s, m.get(v, v))
        case Not(g):
            return Not(_subst(g, m, supply))
        case And(a, b):
            return And(_subst(a, m, supply), _subst(b, m, supply))
        case Or(a, b):
            return Or(_subst(a, m, supply), _subst(b, m, supply))
        case Implies(a, b):
            return Implies(_subst(a, m, supply), _subst(b, m, supply))
        case ExistsFO(v, g):
            nv, ng = _subst_binder(v, g, m, supply)
            return ExistsFO(nv, ng)
        case ForallFO(v, g):
            nv, ng = _subst_binder(v, g, m, supply)
            return ForallFO(nv, ng)
        case ExistsSO(s, g):
            return ExistsSO(s, _subst(g, m, supply))
        case ForallSO(s, g):
            return ForallSO(s, _subst(g, m, supply))
        case AtLeast(n, v, g):
            nv, ng = _subst_binder(v, g, m, supply)
            return AtLeast(n, nv, ng)
    raise InputError(f"not a formula: {f!r}")


def mk_true() -> Formula:
    return ForallFO("v0", Equal("v0", "v0"))


def mk_false() -> Formula:
    return ExistsFO("v0", Not(Equal("v0", "v0")))


def conj(formulas) -> Formula:
    formulas = list(formulas)
    if not formulas:
        return mk_true()
    out = formulas[0]
    for g in formulas[1:]:
        out = And(out, g)
    return out


def disj(formulas) -> Formula:
    formulas = list(formulas)
    if not formulas:
        return mk_false()
    out = formulas[0]
    for g in formulas[1:]:
        out = Or(out, g)
    return out


def ascending_chain(variables) -> Formula:
    """v1 < v2 < ... as a conjunction of adjacent comparisons."""
    variables = list(variables)
    return conj([Less(a, b) for a, b in zip(variables, variables[1:])])


def exists_wrap(variables, body: Formula) -> Formula:
    for v in reversed(list(variables)):
        body = ExistsFO(v, body)
    return body


def expand_macros(f: Formula, supply: NameSupply | None = None) -> Formula:
    """Rewrite every counting quantifier into plain nested quantifiers."""
    if supply is None:
        supply = NameSupply(all_vars(f))
    return _expand(f, supply)


def _expand(f, supply):
    match f:
        case Less() | Equal() | Pred() | In():
            return f
        case Not(g):
            return Not(_expand(g, supply))
        case And(a, b):
            return And(_expand(a, supply), _expand(b, supply))
        case Or(a, b):
            return Or(_expand(a, supply), _expand(b, supply))
        case Implies(a, b):
            return Implies(_expand(a, supply), _expand(b, supply))
        case ExistsFO(v, g):
            return ExistsFO(v, _expand(g, supply))
        case ForallFO(v, g):
            return ForallFO(v, _expand(g, supply))
        case ExistsSO(s, g):
            return ExistsSO(s, _expand(g, supply))
        case ForallSO(s, g):
            return ForallSO(s, _expand(g, supply))
        case AtLeast(n, v, g):
            g = _expand(g, supply)
            if n == 0:
                return mk_true()
            if n == 1:
                return ExistsFO(v, g)
            names = [supply.fresh(v) for _ in range(n)]
            parts = [Less(a, b) for a, b in zip(names, names[1:])]
            parts += [substitute(g, {v: w}, supply) for w in names]
            return exists_wrap(names, conj(parts))
    raise InputError(f"not a formula: {f!r}")


def lex_less(xs, ys) -> Formula:
    """Strict lexicographic comparison of two equal-length variable tuples."""
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys):
        raise InputError("lex_less needs tuples of equal length")
    if not xs:
        return mk_false()
    options = []
    for i in range(len(xs)):
        parts = [Equal(xs[j], ys[j]) for j in range(i)]
        parts.append(Less(xs[i], ys[i]))
        options.append(conj(parts))
    return disj(options)


def lex_minimal(f: Formula, xs, supply: NameSupply | None = None) -> Formula:
    """f holds at xs and no lex-smaller tuple satisfies f."""
    xs = list(xs)
    if len(set(xs)) != len(xs):
        raise InputError("variables must be distinct")
    if supply is None:
        supply = NameSupply(all_vars(f) | set(xs))
    ys = [supply.fresh("w") for _ in xs]
    lower = substitute(f, dict(zip(xs, ys)), supply)
    guard = Not(exists_wrap(ys, And(lower, lex_less(ys, xs))))
    return And(f, guard)


def ith_lex_selector(f: Formula, xs, i: int, supply: NameSupply | None = None) -> Formula:
    """f holds at xs and exactly i-1 lex-smaller tuples satisfy f."""
    if i < 1:
        raise InputError("index must be at least 1")
    xs = list(xs)
    if len(set(xs)) != len(xs):
        raise InputError("variables must be distinct")
    if supply is None:
        supply = NameSupply(all_vars(f) | set(xs))

    def chain(count):
        tuples = [[supply.fresh("w") for _ in xs] for _ in range(count)]
        parts = [substitute(f, dict(zip(xs, tup)), supply) for tup in tuples]
        parts += [lex_less(a, b) for a, b in zip(tuples, tuples[1:])]
        parts.append(lex_less(tuples[-1], xs))
        flat = [v for tup in tuples for v in tup]
        return exists_wrap(flat, conj(parts))

    parts = [f]
    if i > 1:
        parts.append(chain(i - 1))
    parts.append(Not(chain(i)))
    return conj(parts)


def relativize(f: Formula, lo: str, hi: str, supply: NameSupply | None = None) -> Formula:
    """Restrict every quantifier of f to the closed interval [lo, hi]."""
    if supply is None:
        supply = NameSupply(all_vars(f) | {lo, hi})

    def within(v):
        return And(Not(Less(v, lo)), Not(Less(hi, v)))

    def subset(s):
        p = supply.fresh("p")
        return ForallFO(p, Implies(In(s, p), within(p)))

    def go(node):
        match node:
            case Less() | Equal() | Pred() | In():
                return node
            case Not(g):
                return Not(go(g))
            case And(a, b):
                return And(go(a), go(b))
            case Or(a, b):
                return Or(go(a), go(b))
            case Implies(a, b):
                return Implies(go(a), go(b))
            case ExistsFO(v, g):
                v, g = _avoid_bounds(v, g)
                return ExistsFO(v, And(within(v), go(g)))
            case ForallFO(v, g):
                v, g = _avoid_bounds(v, g)
                return ForallFO(v, Implies(within(v), go(g)))
            case AtLeast(n, v, g):
                v, g = _avoid_bounds(v, g)
                return AtLeast(n, v, And(within(v), go(g)))
            case ExistsSO(s, g):
                return ExistsSO(s, And(subset(s), go(g)))
            case ForallSO(s, g):
                return ForallSO(s, Implies(subset(s), go(g)))
        raise InputError(f"not a formula: {node!r}")

    def _avoid_bounds(v, g):
        if v in (lo, hi):
            nv = supply.fresh(v)
            g = substitute(g, {v: nv}, supply)
            v = nv
        return v, g

    return go(f)


@dataclass(frozen=True)
class OrderCase:
    """One weak ordering of a variable tuple.

    classes hold the variables grouped by equality, listed in ascending
    position order; the representative of a class is its first member in
    the original variable order.
    """

    classes: tuple[tuple[str, ...], ...]
    representatives: tuple[str, ...]
    formula: Formula
    constraint: Formula


def order_case_split(f: Formula, variables) -> list[OrderCase]:
    """Split f along all weak orderings of the given variables.

    Every assignment of the variables matches the constraint of exactly one
    case, and on such assignments f agrees with the case formula, which
    mentions only the representatives.
    """
    variables = list(variables)
    for v in variables:
        if not is_fo_name(v):
            raise InputError(f"bad variable name {v!r}")
    if len(set(variables)) != len(variables):
        raise InputError("variables must be distinct")
    k = len(variables)
    if k == 0:
        return [OrderCase((), (), f, mk_true())]
    cases = []
    for ranks in itertools.product(range(k), repeat=k):
        m = max(ranks) + 1
        if len(set(ranks)) != m:
            continue
        classes = tuple(tuple(variables[i] for i in range(k) if ranks[i] == r)
                        for r in range(m))
        reps = tuple(c[0] for c in classes)
        mapping = {v: c[0] for c in classes for v in c[1:]}
        case_formula = substitute(f, mapping) if mapping else f
        eqs = [Equal(v, c[0]) for c in classes for v in c[1:]]
        order = [Less(a, b) for a, b in zip(reps, reps[1:])]
        cases.append(OrderCase(classes, reps, case_formula, conj(eqs + order)))
    return cases
