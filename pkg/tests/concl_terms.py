"""Term-by-term transcription of the double sums in the proof that the
Cartan images commute, used as golden data.

Each table entry is ``(delta, coef_factor, factors)``: ``delta`` names an
indicator on (i, j), ``factors`` lists three ``(unit, (es, ev, e0))`` where a
unit is given symbolically by the letters "i", "j", "N".
"""

from fractions import Fraction

from affyang import sumcalc as sc
from affyang.coeffring import Scalar, h

DELTAS = {
    None: lambda i, j: True,
    "j>i": lambda i, j: j > i,
    "i>j": lambda i, j: i > j,
    "i=j": lambda i, j: i == j,
}


def _u(sym, i, j, N):
    return {"i": i, "j": j, "N": N}[sym]


# 1-based term lists; None marks the delta_{i,j} terms (they need the extra u sum)
TERMS = {
    "551-0": [
        (None, 2, (("j", "N"), (0, -1, -1)), (("i", "j"), (-1, 1, 0)), (("N", "i"), (1, 0, 1))),
        (None, -2, (("i", "N"), (-1, 0, -1)), (("j", "i"), (1, -1, 0)), (("N", "j"), (0, 1, 1))),
    ],
    "551-1": [
        ("j>i", 1, (("j", "i"), (-1, 0, 0)), (("i", "N"), (1, -1, -1)), (("N", "j"), (0, 1, 1))),
        (None, 1, (("N", "i"), (-1, 0, 0)), (("j", "N"), (0, -1, -1)), (("i", "j"), (1, 1, 1))),
        None,
        None,
        (None, -1, (("j", "i"), (-1, -1, -1)), (("N", "j"), (0, 1, 1)), (("i", "N"), (1, 0, 0))),
        ("j>i", -1, (("j", "N"), (0, -1, -1)), (("N", "i"), (-1, 1, 1)), (("i", "j"), (1, 0, 0))),
    ],
    "551-2": [
        None,
        ("i>j", 1, (("i", "j"), (-1, 0, 0)), (("j", "N"), (0, -1, -1)), (("N", "i"), (1, 1, 1))),
        ("i>j", -1, (("i", "N"), (-1, -1, -1)), (("N", "j"), (0, 1, 1)), (("j", "i"), (1, 0, 0))),
        None,
    ],
    "551-3": [
        ("i>j", 1, (("j", "i"), (-1, 0, -1)), (("i", "N"), (1, -1, 0)), (("N", "j"), (0, 1, 1))),
        None,
        None,
        ("i>j", -1, (("j", "N"), (0, -1, -1)), (("N", "i"), (-1, 1, 0)), (("i", "j"), (1, 0, 1))),
    ],
    "551-4": [
        None,
        (None, 1, (("i", "N"), (-1, 0, 0)), (("j", "i"), (1, -1, -1)), (("N", "j"), (0, 1, 1))),
        ("j>i", 1, (("i", "j"), (-1, 0, -1)), (("j", "N"), (0, -1, -1)), (("N", "i"), (1, 1, 2))),
        ("j>i", -1, (("i", "N"), (-1, -1, -2)), (("N", "j"), (0, 1, 1)), (("j", "i"), (1, 0, 1))),
        (None, -1, (("j", "N"), (0, -1, -1)), (("i", "j"), (-1, 1, 0)), (("N", "i"), (1, 0, 1))),
        None,
    ],
    "551-5": [
        ("j>i", 1, (("j", "i"), (-1, -1, -1)), (("i", "N"), (1, 0, 0)), (("N", "j"), (0, 1, 1))),
        ("j>i", -1, (("j", "N"), (0, -1, -1)), (("N", "i"), (-1, 0, 0)), (("i", "j"), (1, 1, 1))),
        ("j>i", -1, (("i", "j"), (-1, -1, -1)), (("j", "N"), (1, 0, 0)), (("N", "i"), (0, 1, 1))),
        ("j>i", 1, (("i", "N"), (0, -1, -1)), (("N", "j"), (-1, 0, 0)), (("j", "i"), (1, 1, 1))),
    ],
    "551-7": [
        ("i>j", -1, (("i", "j"), (-1, -1, -1)), (("j", "N"), (1, 0, 0)), (("N", "i"), (0, 1, 1))),
        ("j>i", 1, (("i", "N"), (0, -1, -1)), (("N", "j"), (-1, 0, 0)), (("j", "i"), (1, 1, 1))),
        ("i>j", 1, (("j", "i"), (-1, -1, -1)), (("i", "N"), (1, 0, 0)), (("N", "j"), (0, 1, 1))),
        ("i>j", -1, (("j", "N"), (0, -1, -1)), (("N", "i"), (-1, 0, 0)), (("i", "j"), (1, 1, 1))),
    ],
}

# corrected transcriptions: (551-4)_2 starts its s-index one step later;
# (551-7)_2 carries the indicator of i > j (it mirrors (551-5)_4)
CORRECTED = {
    ("551-7", 2): ("i>j", 1, (("i", "N"), (0, -1, -1)), (("N", "j"), (-1, 0, 0)), (("j", "i"), (1, 1, 1))),
    ("551-4", 2): (None, 1, (("i", "N"), (-1, 0, -1)), (("j", "i"), (1, -1, 0)), (("N", "j"), (0, 1, 1))),
}


def term(eq, r, i, j, N, corrected=False):
    """The r-th term of equation ``eq`` at (i, j), as a CompletionElement."""
    entry = CORRECTED.get((eq, r)) if corrected else None
    if entry is None:
        entry = TERMS[eq][r - 1]
    if entry is None:
        raise ValueError(f"({eq})_{r} is a delta_ij term")
    delta, k, *factors = entry
    if not DELTAS[delta](i, j):
        return sc.CompletionElement()
    coef = h * h * Scalar.const(Fraction(k, 2))
    fs = tuple(((_u(a, i, j, N), _u(b, i, j, N)), e) for (a, b), e in factors)
    return sc.DoubleSum(coef, fs).element()


def equation(eq, i, j, N, corrected=False):
    out = sc.CompletionElement()
    for r, entry in enumerate(TERMS[eq], 1):
        if entry is not None:
            out = out + term(eq, r, i, j, N, corrected)
    return out
