"""
Compiling a formula to an automaton and checking it against the oracle
======================================================================

"""

from chainrep import Signature, parse, compile, evaluate
from chainrep.words import MarkedWord, Word, all_words
import itertools

sig = Signature(("P1",))

# one free variable: x sits on a labelled position with a later neighbour
f = parse("P1(x) & ex v. x < v", sig)
print("formula:", f)

# the automaton reads letters with one shared mark bit; the single mark is x
dfa = compile(f, sig, marked_vars=("x",))
print("states:", len(dfa.delta))

w = Word.parse("[P1, ., P1]", sig)
for p in range(len(w)):
    print(f"x={p}:", dfa.run(MarkedWord(w, (p,))))

# the oracle evaluates the same thing by brute-force recursion; on every
# small word and every mark placement the two must agree
agree = all(
    dfa.run(MarkedWord(u, m)) == evaluate(f, u, fo={"x": m[0]})
    for u in all_words(sig, 5)
    for m in itertools.combinations(range(len(u)), 1))
print("agrees with the oracle on all words up to length 5:", agree)
