"""Seeded random formulas for cross-checks and the self-test battery.

Everything here is driven by an explicit random.Random so a seed pins the
whole stream.  Quantifier rank, free-variable count and signature size stay
small by construction: the point is breadth of shape, not depth.
"""

import random

from .formula import (And, AtLeast, Equal, ExistsFO, ExistsSO, ForallFO,
                      ForallSO, Formula, Implies, In, Less, Not, Or, Pred,
                      Signature, mk_false, mk_true)

BOUND_FO = ("z", "p", "q", "r", "s")
BOUND_SO = ("Z", "Y", "W")

_KINDS = (("not", 2), ("and", 3), ("or", 3), ("implies", 1),
          ("ex", 4), ("all", 2), ("atleast", 1), ("EX", 1), ("ALL", 1))


def _fresh(pool, used):
    for name in pool:
        if name not in used:
            return name
    raise RuntimeError("name pool exhausted")


def _atom(rng, sig, fo, so) -> Formula:
    if not fo:
        return mk_true() if rng.random() < 0.5 else mk_false()
    choices = ["less", "equal", "pred"]
    if so:
        choices.append("in")
        choices.append("in")
    v = rng.choice(fo)
    match rng.choice(choices):
        case "less":
            return Less(v, rng.choice(fo))
        case "equal":
            return Equal(v, rng.choice(fo))
        case "pred":
            return Pred(rng.choice(sig.preds), v)
        case _:
            return In(rng.choice(so), v)


def random_formula(rng: random.Random, sig: Signature, fo_vars=(), *,
                   rank: int = 3, so_prob: float = 0.15) -> Formula:
    """One random formula with free FO variables among fo_vars.

    rank caps quantifier nesting; set quantifiers appear with probability
    so_prob at each quantifier choice and never leave free set variables.
    """
    def go(r, fo, so):
        if r == 0 or rng.random() < 0.3:
            return _atom(rng, sig, fo, so)
        names = [k for k, _ in _KINDS]
        weights = [w for _, w in _KINDS]
        kind = rng.choices(names, weights)[0]
        if kind in ("EX", "ALL") and rng.random() > so_prob:
            kind = "ex"
        match kind:
            case "not":
                return Not(go(r, fo, so))
            case "and":
                return And(go(r, fo, so), go(r, fo, so))
            case "or":
                return Or(go(r, fo, so), go(r, fo, so))
            case "implies":
                return Implies(go(r, fo, so), go(r, fo, so))
            case "ex" | "all" | "atleast":
                v = _fresh(BOUND_FO, fo)
                body = go(r - 1, fo + (v,), so)
                if kind == "ex":
                    return ExistsFO(v, body)
                if kind == "all":
                    return ForallFO(v, body)
                return AtLeast(rng.randint(1, 3), v, body)
            case _:
                s = _fresh(BOUND_SO, so)
                body = go(r - 1, fo, so + (s,))
                return ExistsSO(s, body) if kind == "EX" else ForallSO(s, body)

    return go(rank, tuple(fo_vars), ())


def random_instance(rng: random.Random, *, max_preds: int = 2,
                    max_free: int = 2, rank: int = 3):
    """(signature, free variables, formula) with small everything."""
    sig = Signature(tuple(f"P{i + 1}" for i in range(rng.randint(1, max_preds))))
    fo = ("x", "y")[:rng.randint(0, max_free)]
    return sig, fo, random_formula(rng, sig, fo, rank=rank)


def formula_batch(seed: int, count: int, **kwargs):
    rng = random.Random(seed)
    return [random_instance(rng, **kwargs) for _ in range(count)]
