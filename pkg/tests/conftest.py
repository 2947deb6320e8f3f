import pytest

from chainrep.formula import Signature, parse


@pytest.fixture
def sig1():
    return Signature(("P1",))


@pytest.fixture
def sig2():
    return Signature(("P1", "P2"))


# formulas with known minimal dimensions, established by oracle counting
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


def battery():
    for name, preds, text, variables, dim in BATTERY:
        sig = Signature.from_text(preds)
        yield name, sig, parse(text, sig), variables, dim
