"""
The type monoid of a formula and what pumping looks like inside it
==================================================================

"""

from chainrep import Signature, parse, compile, transition_monoid, is_pumpable

sig = Signature(("P1",))

# "at least two labelled positions" distinguishes 0, 1 and >=2 labels seen
dfa = compile(parse("atleast 2 v. P1(v)", sig), sig)
m = transition_monoid(dfa)
print(m.dump())

# concatenating words multiplies their types
u, v = [1], [1, 0]
print("type(u) * type(v) == type(uv):",
      m.multiply(m.image_of_word(u), m.image_of_word(v)) == m.image_of_word(u + v))

# idempotents absorb their own repetition; they are what gets pumped
print("idempotents:", m.idempotents())

# a pair of types absorbing a nonempty idempotent from both sides signals
# unboundedly many positions behaving alike between them
for tb in range(m.size):
    for te in range(m.size):
        e = is_pumpable(m, tb, te)
        if e is not None:
            print(f"({tb}, {te}) pumps via {e}, "
                  f"witness {m.witness_word(e, nonempty=True)}")
