"""Command-line front end: one binary over the whole pipeline.

Every run produces a single self-contained report.  The JSON form is the
primary artifact (deterministic, sorted keys, no timestamps); the human
form is rendered from the same document.  Exit codes: 0 success, 1 negative
decision or failed check, 2 bad input, 3 resource budget exceeded.
"""

import argparse
import itertools
import json
import os
import random
import sys

from . import __version__
from .compiler import DEFAULT_STATE_BUDGET, compile as compile_dfa
from .errors import ChainrepError, InputError, ResourceLimitError
from .formula import Signature, free_variables, parse, render
from .growth import (brute_growth, growth_degree, growth_lower_witness,
                     growth_upper_check, no_decrement_witness, pump_witness)
from .interp import check_equivalence, parse_interpretation, reduce_interpretation
from .monoid import DEFAULT_MONOID_BUDGET, ramsey_bound, transition_monoid
from .oracle import check_canonical_form, check_reparameterization, evaluate
from .randgen import formula_batch
from .reparam import (ERRATUM_NOTES, TypeAlgebra, eliminable_pairs,
                      local_normal_form, minimal_reparameterization)
from .words import MarkedWord, Word, all_words

# formulas with oracle-derived minimal dimensions, used by selftest
BATTERY = (
    ("first position", "P1", "~ex z. z < x", ("x",), 0),
    ("pinned pair", "P1", "(x < y & ~ex z. z < x) & ~ex z. y < z", ("x", "y"), 0),
    ("labelled element", "P1", "P1(x)", ("x",), 1),
    ("adjacent labelled pair", "P1",
     "(P1(x) & P1(y)) & (x < y & ~ex z. (x < z & z < y))", ("x", "y"), 1),
    ("ordered pair", "P1", "x < y", ("x", "y"), 2),
    ("ordered triple", "P1", "(x < y) & (y < z)", ("x", "y", "z"), 3),
    ("unsatisfiable", "P1", "x < x", ("x",), 0),
)


def _mentions_eliminate(step) -> bool:
    if step.kind in ("eliminate", "refine"):
        return True
    return any(_mentions_eliminate(c) for c in step.children)


def _rep_dict(rep) -> dict:
    return {
        "source": render(rep.source),
        "domain": list(rep.domain_vars),
        "image": list(rep.image_vars),
        "dimension": rep.dimension,
        "bound": rep.bound,
        "map": render(rep.g),
        "provenance": rep.provenance.dump().splitlines(),
    }


def _witness_dict(w) -> dict:
    return {
        "word": w.word.render(),
        "pool": sorted(w.positions),
        "pool_size": len(w.positions),
        "claimed": w.claimed_tuple_count,
        "oracle_count": w.oracle_count(),
        "construction": w.construction,
    }


def _check_dict(report) -> dict:
    out = {"ok": bool(report), "words_checked": report.words_checked,
           "max_fiber": report.max_fiber}
    if report.failure:
        out["failure"] = report.failure
    return out


class _Run:
    """Shared flag handling plus report assembly for one invocation."""

    def __init__(self, args):
        self.args = args
        self.notes: list[str] = []

    def signature(self) -> Signature:
        if not self.args.sig:
            raise InputError("--sig is required for this command")
        sig = Signature.from_text(self.args.sig)
        if not sig.preds:
            raise InputError("signature has no predicates")
        return sig

    def formula_text(self) -> str:
        if self.args.formula is not None:
            return self.args.formula
        if self.args.formula_file is not None:
            try:
                with open(self.args.formula_file) as fh:
                    return fh.read()
            except OSError as e:
                raise InputError(f"cannot read {self.args.formula_file}: {e}")
        raise InputError("need --formula or --formula-file")

    def formula(self, sig: Signature):
        f = parse(self.formula_text(), sig)
        return f, free_variables(f)

    def minrep(self, f, sig, variables, refine=True):
        rep = minimal_reparameterization(
            f, sig, variables, refine=refine,
            budget_states=self.args.budget_states,
            budget_monoid=self.args.budget_monoid)
        if _mentions_eliminate(rep.provenance):
            self.notes.extend(n for n in ERRATUM_NOTES if n not in self.notes)
        return rep

    def report(self, command: str, result: dict) -> dict:
        config = {
            "sig": self.args.sig,
            "formula": self.args.formula,
            "formula_file": self.args.formula_file,
            "dim": getattr(self.args, "dim", None),
            "n": getattr(self.args, "n", None),
            "max_len": getattr(self.args, "max_len", None),
            "budget_states": self.args.budget_states,
            "budget_monoid": self.args.budget_monoid,
            "seed": self.args.seed,
        }
        return {
            "tool": {"name": "chainrep", "version": __version__},
            "command": command,
            "config": config,
            "notes": sorted(self.notes),
            "result": result,
        }


def _cmd_mindim(run: _Run):
    sig = run.signature()
    f, variables = run.formula(sig)
    rep = run.minrep(f, sig, variables)
    return run.report("mindim", _rep_dict(rep)), 0


def _cmd_decide(run: _Run):
    if run.args.dim is None:
        raise InputError("decide needs --dim")
    if run.args.dim < 0:
        raise InputError("dimension must be nonnegative")
    sig = run.signature()
    f, variables = run.formula(sig)
    rep = run.minrep(f, sig, variables, refine=False)
    answer = rep.dimension <= run.args.dim
    result = {"asked_dimension": run.args.dim, "answer": answer,
              "minimal_dimension": rep.dimension}
    return run.report("decide", result), 0 if answer else 1


def _cmd_growth(run: _Run):
    sig = run.signature()
    f, variables = run.formula(sig)
    rep = run.minrep(f, sig, variables)
    n = run.args.n if run.args.n is not None else 3
    max_len = run.args.max_len if run.args.max_len is not None else 6
    result = {"degree": rep.dimension, "bound": rep.bound}
    lower = growth_lower_witness(f, sig, variables, n,
                                 budget_states=run.args.budget_states,
                                 budget_monoid=run.args.budget_monoid)
    result["lower_witness"] = _witness_dict(lower)
    got = brute_growth(f, sig, variables, n, max_len)
    ceiling = rep.bound * n ** rep.dimension
    result["sandwich"] = {
        "n": n, "max_len": max_len,
        "lower": n ** rep.dimension,
        "brute": got,
        "upper": ceiling,
        "ok": lower.oracle_count() >= n ** rep.dimension and got <= ceiling,
    }
    return run.report("growth", result), 0 if result["sandwich"]["ok"] else 1


def _cmd_monoid(run: _Run):
    sig = run.signature()
    f, variables = run.formula(sig)
    algebra = TypeAlgebra.build(f, sig, variables,
                                run.args.budget_states, run.args.budget_monoid)
    m = algebra.monoid
    elements = []
    for i in range(m.size):
        entry = {"index": i,
                 "idempotent": m.is_idempotent(i),
                 "nonempty": m.is_nonempty_realizable(i),
                 "witness": m.witness_word(i).render()
                 if m.witness[i] is not None else None}
        elements.append(entry)
    result = {"variables": list(variables), "size": m.size,
              "identity": m.identity, "elements": elements}
    if m.size <= 20:
        result["table"] = [[m.multiply(a, b) for b in range(m.size)]
                           for a in range(m.size)]
    return run.report("monoid", result), 0


def _cmd_normalform(run: _Run):
    sig = run.signature()
    f, variables = run.formula(sig)
    algebra = TypeAlgebra.build(f, sig, variables,
                                run.args.budget_states, run.args.budget_monoid)
    disjuncts = []
    for d in local_normal_form(algebra):
        witnesses = [algebra.monoid.witness_word(t, nonempty=(j > 0)).render()
                     for j, t in enumerate(d.types)]
        disjuncts.append({"types": list(d.types),
                          "segment_witnesses": witnesses,
                          "eliminable_marks": list(eliminable_pairs(algebra, d))})
    result = {"variables": list(variables),
              "monoid_size": algebra.monoid.size,
              "disjuncts": disjuncts}
    return run.report("normalform", result), 0


def _cmd_witness(run: _Run):
    sig = run.signature()
    f, variables = run.formula(sig)
    n = run.args.n if run.args.n is not None else 2
    budgets = dict(budget_states=run.args.budget_states,
                   budget_monoid=run.args.budget_monoid)
    result = {}
    if len(variables) == 1:
        result["pumping"] = _witness_dict(pump_witness(f, sig, variables[0], n,
                                                       **budgets))
    if len(variables) >= 1:
        result["no_decrement"] = _witness_dict(
            no_decrement_witness(f, sig, variables, n, **budgets))
    result["growth_lower"] = _witness_dict(
        growth_lower_witness(f, sig, variables, max(n, 1), **budgets))
    return run.report("witness", result), 0


def _cmd_oracle_check(run: _Run):
    sig = run.signature()
    f, variables = run.formula(sig)
    rep = run.minrep(f, sig, variables)
    max_len = run.args.max_len if run.args.max_len is not None else 4
    contract = check_reparameterization(rep, max_len)
    canonical = check_canonical_form(rep, max_len)
    result = {"reparameterization": _rep_dict(rep),
              "contract": _check_dict(contract),
              "canonical": _check_dict(canonical)}
    ok = bool(contract) and bool(canonical)
    return run.report("oracle-check", result), 0 if ok else 1


def _cmd_interp_reduce(run: _Run):
    if run.args.formula_file is None:
        raise InputError("interp-reduce reads the spec with --formula-file")
    sig = Signature.from_text(run.args.sig) if run.args.sig else None
    spec = parse_interpretation(run.formula_text(), sig)
    if run.args.dim is None:
        raise InputError("interp-reduce needs --dim")
    reduced = reduce_interpretation(spec, run.args.dim,
                                    budget_states=run.args.budget_states,
                                    budget_monoid=run.args.budget_monoid)
    for part in reduced.parts:
        if _mentions_eliminate(part.rep.provenance):
            run.notes.extend(n for n in ERRATUM_NOTES if n not in run.notes)
    max_len = run.args.max_len if run.args.max_len is not None else 3
    check = check_equivalence(spec, reduced, max_len)
    result = {
        "components": [{"name": p.name, "source": p.source, "index": p.index,
                        "dimension": p.rep.dimension, "bound": p.rep.bound}
                       for p in reduced.parts],
        "spec": reduced.spec.dump().splitlines(),
        "equivalence": _check_dict(check),
    }
    return run.report("interp-reduce", result), 0 if check else 1


def _selftest_items(run: _Run):
    seed = run.args.seed
    checks = []

    def item(name, ok, **details):
        checks.append({"name": name, "ok": bool(ok), **details})

    # compiled automata against the oracle on a seeded sample
    mismatches = 0
    pairs = 0
    for sig, fo, f in formula_batch(seed, 25):
        dfa = compile_dfa(f, sig, fo)
        for w in all_words(sig, 4):
            for marks in itertools.combinations(range(len(w)), len(fo)):
                pairs += 1
                want = evaluate(f, w, fo=dict(zip(fo, marks)))
                if dfa.run(MarkedWord(w, marks)) != want:
                    mismatches += 1
    item("compiler-vs-oracle", mismatches == 0, checked=pairs)

    # monoid laws on the battery algebras
    law_failures = 0
    sizes = []
    for _, preds, text, variables, _ in BATTERY:
        sig = Signature.from_text(preds)
        algebra = TypeAlgebra.build(parse(text, sig), sig, variables)
        m = algebra.monoid
        sizes.append(m.size)
        if m.size <= 50:
            for a in range(m.size):
                for b in range(m.size):
                    for c in range(m.size):
                        if m.multiply(m.multiply(a, b), c) != \
                                m.multiply(a, m.multiply(b, c)):
                            law_failures += 1
                if m.multiply(a, m.identity) != a or \
                        m.multiply(m.identity, a) != a:
                    law_failures += 1
        rng = random.Random(seed + 1)
        for _ in range(100):
            v = [rng.randrange(2 ** sig.k) for _ in range(rng.randrange(4))]
            w = [rng.randrange(2 ** sig.k) for _ in range(rng.randrange(4))]
            if m.multiply(m.image_of_word(v), m.image_of_word(w)) != \
                    m.image_of_word(v + w):
                law_failures += 1
    item("monoid-laws", law_failures == 0, sizes=sizes)

    # dimension battery
    dims = []
    expected = []
    for _, preds, text, variables, want in BATTERY:
        sig = Signature.from_text(preds)
        rep = run.minrep(parse(text, sig), sig, variables)
        dims.append(rep.dimension)
        expected.append(want)
    item("dimension-battery", dims == expected, got=dims, expected=expected)

    # determination: truth from segment types
    det_failures = 0
    det_checked = 0
    for _, preds, text, variables, _ in BATTERY:
        sig = Signature.from_text(preds)
        f = parse(text, sig)
        algebra = TypeAlgebra.build(f, sig, variables)
        for w in all_words(sig, 3):
            for marks in itertools.combinations(range(len(w)), len(variables)):
                mw = MarkedWord(w, marks)
                det_checked += 1
                want = evaluate(f, w, fo=dict(zip(variables, marks)))
                if algebra.accepts_chain(algebra.segment_types(mw)) != want:
                    det_failures += 1
    item("determination", det_failures == 0, checked=det_checked)

    # reparameterization contract on the battery
    rep_failures = []
    for name, preds, text, variables, _ in BATTERY:
        sig = Signature.from_text(preds)
        rep = run.minrep(parse(text, sig), sig, variables)
        if not check_reparameterization(rep, 3) or \
                not check_canonical_form(rep, 3):
            rep_failures.append(name)
    item("reparameterization-contract", not rep_failures, failed=rep_failures)

    item("ramsey-bounds", [ramsey_bound(c) for c in (1, 2, 3)] == [3, 6, 17],
         got=[ramsey_bound(c) for c in (1, 2, 3)])

    # growth quick checks
    sig = Signature.from_text("P1")
    pair = parse("x < y", sig)
    brute = [brute_growth(pair, sig, ("x", "y"), n, 6) for n in (1, 2, 3)]
    lower = growth_lower_witness(parse("P1(x)", sig), sig, ("x",), 2)
    nd = no_decrement_witness(parse("P1(x)", sig), sig, ("x",), 2)
    item("growth-quick",
         brute == [0, 1, 3] and lower.oracle_count() >= 2
         and nd.oracle_count() >= 4,
         brute=brute, lower=lower.oracle_count(), no_decrement=nd.oracle_count())

    # interpretation quick check
    succ = parse_interpretation(
        "signature P1\n"
        "component pairs dim=2\n"
        "universe x < y & ~ex z. (x < z & z < y)\n"
        "relation E/2 on (pairs, pairs) := x = x & y = u & v = v\n")
    reduced = reduce_interpretation(succ, 1)
    eq = check_equivalence(succ, reduced, 3)
    item("interp-reduce", bool(eq),
         components=[p.name for p in reduced.parts],
         words_checked=eq.words_checked)

    return checks


def _cmd_selftest(run: _Run):
    checks = _selftest_items(run)
    ok = all(c["ok"] for c in checks)
    result = {"ok": ok, "checks": checks}
    return run.report("selftest", result), 0 if ok else 1


_COMMANDS = {
    "mindim": _cmd_mindim,
    "decide": _cmd_decide,
    "growth": _cmd_growth,
    "monoid": _cmd_monoid,
    "normalform": _cmd_normalform,
    "witness": _cmd_witness,
    "oracle-check": _cmd_oracle_check,
    "interp-reduce": _cmd_interp_reduce,
    "selftest": _cmd_selftest,
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="chainrep",
        description="bounded reparameterizations of formulas over words")
    sub = p.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--sig", default=None,
                       help="comma-separated predicate names, e.g. P1,P2")
        g = s.add_mutually_exclusive_group()
        g.add_argument("--formula", default=None)
        g.add_argument("--formula-file", default=None,
                       help="file with the formula (or the interpretation spec)")
        s.add_argument("--dim", type=int, default=None)
        s.add_argument("--n", type=int, default=None)
        s.add_argument("--max-len", type=int, default=None)
        s.add_argument("--budget-states", type=int, default=DEFAULT_STATE_BUDGET)
        s.add_argument("--budget-monoid", type=int, default=DEFAULT_MONOID_BUDGET)
        s.add_argument("--format", choices=("human", "json"), default="human")
        s.add_argument("--seed", type=int, default=0)
    return p


def _human(value, indent=0, label=None) -> list[str]:
    pad = "  " * indent
    head = f"{pad}{label}: " if label else pad
    if isinstance(value, dict):
        lines = [f"{pad}{label}:"] if label else []
        for k in sorted(value):
            lines.extend(_human(value[k], indent + (1 if label else 0), k))
        return lines
    if isinstance(value, list):
        if all(not isinstance(x, (dict, list)) for x in value):
            return [head + "[" + ", ".join(str(x) for x in value) + "]"]
        lines = [f"{pad}{label}:"] if label else []
        for x in value:
            lines.extend(_human(x, indent + (1 if label else 0), "-"))
        return lines
    return [head + str(value)]


def _apply_memory_cap():
    mb = os.environ.get("CHAINREP_BUDGET_MB")
    if not mb:
        return
    try:
        limit = int(mb) << 20
    except ValueError:
        raise InputError(f"CHAINREP_BUDGET_MB={mb!r} is not a number")
    try:
        import resource
        _, hard = resource.getrlimit(resource.RLIMIT_AS)
        resource.setrlimit(resource.RLIMIT_AS, (limit, hard))
    except (ImportError, ValueError, OSError):
        pass  # platform without rlimits: the cap is advisory


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        _apply_memory_cap()
        if args.budget_states <= 0 or args.budget_monoid <= 0:
            raise InputError("budgets must be positive")
        report, status = _COMMANDS[args.command](_Run(args))
    except ResourceLimitError as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return 3
    except MemoryError:
        print("resource limit: memory budget exhausted", file=sys.stderr)
        return 3
    except ChainrepError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print("\n".join(_human(report)))
    return status


if __name__ == "__main__":
    sys.exit(main())
