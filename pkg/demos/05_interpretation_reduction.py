"""
Reducing the dimension of a point interpretation
================================================

"""

from chainrep import (parse_interpretation, apply_interpretation,
                      reduce_interpretation, check_equivalence)
from chainrep.words import Word

# output elements are pairs of adjacent positions, chained by an edge
# relation; written as 2-tuples although one coordinate determines the other
spec = parse_interpretation("""
signature P1
component pairs dim=2
universe x < y & ~ex z. (x < z & z < y)
relation E/2 on (pairs, pairs) := x = x & y = u & v = v
""")

w = Word.parse("[., P1, ., P1]", spec.signature)
print(apply_interpretation(spec, w).dump())
print()

# the same interpretation with 1-tuples: each component q splits into
# copies (q, i) selecting the i-th preimage in lexicographic order
reduced = reduce_interpretation(spec, 1)
print(reduced.spec.dump()[:200], "...")
print()
print(apply_interpretation(reduced.spec, w).dump())
print()

# the bookkeeping gives an explicit bijection, checked word by word
report = check_equivalence(spec, reduced, max_len=5)
print("isomorphic on all words up to length 5:", bool(report))
