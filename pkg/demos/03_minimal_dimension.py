"""
Minimal-dimension reparameterizations: how many coordinates a formula needs
===========================================================================

"""

from chainrep import Signature, parse, minimal_reparameterization
from chainrep import check_reparameterization

sig = Signature(("P1",))

# the free variables of "y is the successor of x" carry one real degree of
# freedom: y pins x, so one image coordinate suffices
succ = parse("x < y & ~ex z. (x < z & z < y)", sig)
rep = minimal_reparameterization(succ, sig, ("x", "y"))
print(rep.describe())
print()

# a genuinely two-dimensional formula stays at two
pair = parse("x < y", sig)
print(minimal_reparameterization(pair, sig, ("x", "y")).describe())
print()

# positions pinned to the ends of the word need no coordinates at all, but
# two tuples may share the (empty) image: the bound says how many
ends = parse("(~ex z. z < x) | (~ex z. x < z)", sig)
rep = minimal_reparameterization(ends, sig, ("x",))
print(rep.describe())

# the oracle confirms the contract: functional, same domain, fibers bounded
report = check_reparameterization(rep, max_len=6)
print("checked words:", report.words_checked,
      "max fiber:", report.max_fiber, "ok:", bool(report))
