"""The affine Yangian of sl(n) in its minimalistic presentation, and the map Psi.

Generators of the minimalistic presentation are written as letters
``("Y", kind, node, level)`` with ``kind`` one of ``"H"``, ``"X+"``, ``"X-"``
and ``level`` 0 or 1.  Generators of the current presentation (the one with
parameters e1, e2) use the tag ``"x"`` instead.

Inside the target algebra Y(sl^(n+1)) level-0 generators are always replaced
by their images in the enveloping algebra of the loop algebra, so target
elements are combinations of words made of loop letters, the central letter
and at most one level-1 letter, plus completion sums.

Deciding identities in the target is done by :func:`reduce`: it looks for
the expression inside the span of the defining relations multiplied on both
sides by loop words (a finite linear-algebra problem once the multipliers are
bounded).  A zero result is a proof; a nonzero result only means that no
such combination was found with the given search bounds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

from . import currentalg, sumcalc
from .coeffring import ONE, ZERO, Scalar, as_scalar, e, e1, e2, h, to_text
from .currentalg import CENTRAL, CurrentAlgebra, E, Element, _accumulate
from .sumcalc import CompletionElement

KINDS = ("H", "X+", "X-")
HALF = Fraction(1, 2)


# -- letters ------------------------------------------------------------------------

def _letter_grade(x) -> int:
    if x[2] == 0 and x[1] != "H":
        return 1 if x[1] == "X+" else -1
    return 0


for _tag in ("Y", "x"):
    currentalg.LETTER_GRADE[_tag] = _letter_grade
    currentalg.LETTER_WRITERS[_tag] = lambda x: [x[0], x[1], str(x[2]), str(x[3])]
    currentalg.LETTER_READERS[_tag] = lambda s: (str(s[0]), str(s[1]), int(s[2]), int(s[3]))


@dataclass(frozen=True)
class YGen:
    """A generator X+_{i,r}, X-_{i,r} or H_{i,r} of Y(sl^(n)), r in {0, 1}."""

    n: int
    kind: str
    node: int
    level: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.level not in (0, 1):
            raise ValueError("the minimalistic presentation only has levels 0 and 1")
        if self.n < 1:
            raise ValueError("rank must be positive")
        object.__setattr__(self, "node", self.node % self.n)

    @property
    def letter(self) -> tuple:
        return ("Y", self.kind, self.node, self.level)

    def element(self) -> Element:
        return Element.word(self.letter)

    @classmethod
    def from_letter(cls, n: int, x) -> "YGen":
        return cls(n, x[1], x[2], x[3])

    def __str__(self):
        return f"{self.kind}_{{{self.node},{self.level}}}"


def cartan(i: int, j: int, n: int) -> int:
    """Affine Cartan matrix of type A^(1)_{n-1} (n >= 3)."""
    i, j = i % n, j % n
    if i == j:
        return 2
    if (j - i) % n in (1, n - 1):
        return -1
    return 0


def m_table(i: int, j: int, n: int) -> int:
    """The skew table m_{ij}: -1 if i = j-1, 1 if i = j+1, 0 otherwise."""
    i, j = i % n, j % n
    if i == (j - 1) % n:
        return -1
    if i == (j + 1) % n:
        return 1
    return 0


def gen(kind: str, i: int, r: int, n: int) -> Element:
    return YGen(n, kind, i, r).element()


def X(sign: int, i: int, r: int, n: int) -> Element:
    return gen("X+" if sign > 0 else "X-", i, r, n)


def H(i: int, r: int, n: int) -> Element:
    return gen("H", i, r, n)


def H_tilde(i: int, n: int) -> Element:
    """H~_{i,1} = H_{i,1} - (h/2) H_{i,0}^2."""
    H0 = H(i, 0, n)
    return H(i, 1, n) - (H0 * H0).scale(h * HALF)


def br(a: Element, b: Element) -> Element:
    return a * b - b * a


def anti(a: Element, b: Element) -> Element:
    return a * b + b * a


def _sc(x) -> Scalar:
    return as_scalar(Fraction(x)) if not isinstance(x, Scalar) else x


def wrap_coef(n: int) -> Scalar:
    """The constant e + (n/2) h of the wrap-around relations."""
    return e + h * Fraction(n, 2)


# -- relation instances -------------------------------------------------------------

@dataclass(frozen=True)
class RelationInstance:
    """One instantiated defining relation, stored as the symbolic difference LHS - RHS."""

    rel: str
    indices: tuple
    sign: int | None
    n: int
    expr: Element = field(compare=False, repr=False)

    @property
    def name(self) -> str:
        sgn = "" if self.sign is None else ("+" if self.sign > 0 else "-")
        return f"{self.rel}{list(self.indices)}{sgn}"

    def level1_count(self) -> int:
        return max((sum(1 for x in w if x[0] == "Y" and x[3] == 1) for w in self.expr.words()), default=0)


RELATION_IDS = ("Eq2.1", "Eq2.2", "Eq2.3", "Eq2.4", "Eq2.5", "Eq2.6", "Eq2.7",
                "Eq2.8", "Eq2.9", "Eq2.10", "gather1", "gather2", "Eq2.11")


def _exceptional(i: int, j: int, n: int) -> bool:
    return (i, j) in ((0, n - 1), (n - 1, 0))


def relations_minimalistic(n: int) -> list[RelationInstance]:
    """Every instance of the defining relations (2.1)-(2.10) of Y(sl^(n)).

    The derived relations ``gather1`` ([X_{i,r}, X_{j,s}] = 0 for
    non-adjacent i != j), ``gather2`` (the symmetrized level-(1,0) Serre
    relation) and ``Eq2.11`` ([X_{i,1}, X_{i,0}] = +-h X_{i,0}^2, the i = j
    case of (2.8)) are appended.
    """
    if n < 3:
        raise ValueError("the minimalistic presentation needs n >= 3")
    out: list[RelationInstance] = []

    def add(rel, idx, sign, expr):
        out.append(RelationInstance(rel, tuple(idx), sign, n, expr))

    nodes = range(n)
    signs = (1, -1)
    for i, j in product(nodes, nodes):
        for r, s in product((0, 1), (0, 1)):
            add("Eq2.1", (i, j, r, s), None, br(H(i, r, n), H(j, s, n)))
    for i, j in product(nodes, nodes):
        d = H(i, 0, n) if i == j else Element()
        add("Eq2.2", (i, j), None, br(X(1, i, 0, n), X(-1, j, 0, n)) - d)
    for i, j in product(nodes, nodes):
        d = H(i, 1, n) if i == j else Element()
        add("Eq2.3", (i, j, "a"), None, br(X(1, i, 1, n), X(-1, j, 0, n)) - d)
        add("Eq2.3", (i, j, "b"), None, br(X(1, i, 0, n), X(-1, j, 1, n)) - d)
    for i, j, r in product(nodes, nodes, (0, 1)):
        for sg in signs:
            rhs = X(sg, j, r, n).scale(sg * cartan(i, j, n))
            add("Eq2.4", (i, j, r), sg, br(H(i, 0, n), X(sg, j, r, n)) - rhs)
    for i, j in product(nodes, nodes):
        if _exceptional(i, j, n):
            continue
        for sg in signs:
            rhs = X(sg, j, 1, n).scale(sg * cartan(i, j, n))
            add("Eq2.5", (i, j), sg, br(H_tilde(i, n), X(sg, j, 0, n)) - rhs)
    w = wrap_coef(n)
    for sg in signs:
        rhs = (X(sg, n - 1, 1, n) + X(sg, n - 1, 0, n).scale(w)).scale(-sg)
        add("Eq2.6", (0, n - 1), sg, br(H_tilde(0, n), X(sg, n - 1, 0, n)) - rhs)
        rhs = (X(sg, 0, 1, n) - X(sg, 0, 0, n).scale(w)).scale(-sg)
        add("Eq2.7", (n - 1, 0), sg, br(H_tilde(n - 1, n), X(sg, 0, 0, n)) - rhs)
    for i, j in product(nodes, nodes):
        if _exceptional(i, j, n):
            continue
        for sg in signs:
            lhs = br(X(sg, i, 1, n), X(sg, j, 0, n)) - br(X(sg, i, 0, n), X(sg, j, 1, n))
            rhs = anti(X(sg, i, 0, n), X(sg, j, 0, n)).scale(h * HALF * sg * cartan(i, j, n))
            add("Eq2.8", (i, j), sg, lhs - rhs)
    for sg in signs:
        lhs = br(X(sg, 0, 1, n), X(sg, n - 1, 0, n)) - br(X(sg, 0, 0, n), X(sg, n - 1, 1, n))
        rhs = (anti(X(sg, 0, 0, n), X(sg, n - 1, 0, n)).scale(h * HALF * (-sg))
               + br(X(sg, 0, 0, n), X(sg, n - 1, 0, n)).scale(w))
        add("Eq2.9", (0, n - 1), sg, lhs - rhs)
    for i, j in product(nodes, nodes):
        if i == j:
            continue
        for sg in signs:
            x = X(sg, i, 0, n)
            acc = X(sg, j, 0, n)
            for _ in range(1 + abs(cartan(i, j, n))):
                acc = br(x, acc)
            add("Eq2.10", (i, j), sg, acc)
    for i, j in product(nodes, nodes):
        if i == j or cartan(i, j, n) != 0:
            continue
        for r, s in product((0, 1), (0, 1)):
            for sg in signs:
                add("gather1", (i, j, r, s), sg, br(X(sg, i, r, n), X(sg, j, s, n)))
    for i, j in product(nodes, nodes):
        if cartan(i, j, n) != -1:
            continue
        for r in (0, 1):
            for sg in signs:
                a0, a1, b = X(sg, i, 0, n), X(sg, i, 1, n), X(sg, j, r, n)
                add("gather2", (i, j, r), sg, br(a1, br(a0, b)) + br(a0, br(a1, b)))
    for i in nodes:
        for sg in signs:
            x0 = X(sg, i, 0, n)
            add("Eq2.11", (i,), sg, br(X(sg, i, 1, n), x0) - (x0 * x0).scale(h * sg))
    return out


def relation(n: int, rel: str, indices, sign=None) -> RelationInstance:
    """Look up one instance of :func:`relations_minimalistic`."""
    indices = tuple(indices)
    for r in _relations_cached(n):
        if r.rel == rel and r.indices == indices and r.sign == sign:
            return r
    raise KeyError(f"no relation {rel} {indices} {sign} for n={n}")


@lru_cache(maxsize=None)
def _relations_cached(n: int) -> tuple:
    return tuple(relations_minimalistic(n))


# -- the current presentation -------------------------------------------------------

def xgen(kind: str, i: int, r: int, n: int) -> Element:
    return Element.word(("x", kind, i % n, r))


def relations_current(n: int, mode_cutoff: int) -> list[RelationInstance]:
    """Relations (1.1)-(1.6) of the current presentation for modes <= cutoff."""
    if n < 3:
        raise ValueError("the current presentation needs n >= 3")
    if mode_cutoff < 1:
        raise ValueError("mode cutoff must be at least 1")
    out: list[RelationInstance] = []
    nodes = range(n)
    modes = range(mode_cutoff + 1)
    plus, minus = (e1 + e2) * HALF, (e1 - e2) * HALF

    def add(rel, idx, sign, expr):
        out.append(RelationInstance(rel, tuple(idx), sign, n, expr))

    def x(sg, i, r):
        return xgen("X+" if sg > 0 else "X-", i, r, n)

    def hh(i, r):
        return xgen("H", i, r, n)

    for i, j, r, s in product(nodes, nodes, modes, modes):
        add("Eq1.1", (i, j, r, s), None, br(hh(i, r), hh(j, s)))
    for i, j, r, s in product(nodes, nodes, modes, modes):
        d = hh(i, r + s) if i == j and r + s <= mode_cutoff else Element()
        if i == j and r + s > mode_cutoff:
            continue
        add("Eq1.2", (i, j, r, s), None, br(x(1, i, r), x(-1, j, s)) - d)
    for i, j, r in product(nodes, nodes, modes):
        for sg in (1, -1):
            add("Eq1.3", (i, j, r), sg,
                br(hh(i, 0), x(sg, j, r)) - x(sg, j, r).scale(sg * cartan(i, j, n)))
    for i, j, r, s in product(nodes, nodes, modes, modes):
        if r + 1 > mode_cutoff or s + 1 > mode_cutoff:
            continue
        a, m = cartan(i, j, n), m_table(i, j, n)
        for sg in (1, -1):
            lhs = br(hh(i, r + 1), x(sg, j, s)) - br(hh(i, r), x(sg, j, s + 1))
            rhs = (anti(hh(i, r), x(sg, j, s)).scale(plus * (sg * a))
                   - br(hh(i, r), x(sg, j, s)).scale(minus * m))
            add("Eq1.4", (i, j, r, s), sg, lhs - rhs)
            lhs = br(x(sg, i, r + 1), x(sg, j, s)) - br(x(sg, i, r), x(sg, j, s + 1))
            rhs = (anti(x(sg, i, r), x(sg, j, s)).scale(plus * (sg * a))
                   - br(x(sg, i, r), x(sg, j, s)).scale(minus * m))
            add("Eq1.5", (i, j, r, s), sg, lhs - rhs)
    for i, j in product(nodes, nodes):
        if i == j:
            continue
        k = 1 + abs(cartan(i, j, n))
        for rs in product(modes, repeat=k):
            if list(rs) != sorted(rs):
                continue
            for s in modes:
                for sg in (1, -1):
                    total = Element()
                    for perm in _permutations(k):
                        acc = x(sg, j, s)
                        for p in reversed(perm):
                            acc = br(x(sg, i, rs[p]), acc)
                        total = total + acc
                    add("Eq1.6", (i, j, rs, s), sg, total)
    return out


def _permutations(k: int):
    from itertools import permutations

    return list(permutations(range(k)))


def xi_map(kind: str, i: int, r: int, n: int) -> Element:
    """Image of the current-presentation generator under the isomorphism Xi.

    Only h_{i,1} moves: h_{i,1} -> H_{i,1} - (i/2)(e1 - e2) H_{i,0} for i != 0.
    """
    if r > 1:
        raise ValueError("Xi is only tabulated up to level 1")
    i %= n
    g = gen(kind, i, r, n)
    if kind == "H" and r == 1 and i != 0:
        return g - H(i, 0, n).scale((e1 - e2) * Fraction(i, 2))
    return g


# -- target elements ------------------------------------------------------------------

class Stuck(ValueError):
    """An expression outside the fragment handled by the reduction engine."""


def loop_image(kind: str, i: int, N: int) -> Element:
    """Image of a level-0 generator of Y(sl^(N)) in U(gl(N)[t, 1/t] + C c)."""
    i %= N
    if kind == "X+":
        return Element.word(E(N, 1, 1)) if i == 0 else Element.word(E(i, i + 1))
    if kind == "X-":
        return Element.word(E(1, N, -1)) if i == 0 else Element.word(E(i + 1, i))
    if kind == "H":
        if i == 0:
            return Element({(E(N, N),): ONE, (E(1, 1),): -ONE, (CENTRAL,): ONE})
        return Element({(E(i, i),): ONE, (E(i + 1, i + 1),): -ONE})
    raise ValueError(f"unknown generator kind {kind!r}")


def level1(kind: str, i: int, N: int) -> Element:
    """A level-1 generator of the target algebra Y(sl^(N))."""
    return Element.word(("Y", kind, i % N, 1))


def level1_tilde(i: int, N: int) -> Element:
    H0 = loop_image("H", i, N)
    return level1("H", i, N) - (H0 * H0).scale(h * HALF)


class MixedElement:
    """Target-algebra element: finite words (``lin``) plus completion sums.

    ``lin`` holds words of loop letters, the central letter and level-1
    letters; ``sums`` holds lattice sums of loop letters only.
    """

    __slots__ = ("lin", "sums")

    def __init__(self, lin: Element | None = None, sums: CompletionElement | None = None):
        lin = lin if lin is not None else Element()
        if sums is not None and sums.finite:
            lin = lin + sums.finite
            sums = CompletionElement(sums=sums.sums)
        self.lin = lin
        self.sums = sums if sums is not None else CompletionElement()

    @classmethod
    def of(cls, x) -> "MixedElement":
        if isinstance(x, MixedElement):
            return x
        if isinstance(x, Element):
            return cls(x)
        if isinstance(x, CompletionElement):
            return cls(sums=x)
        raise TypeError(f"cannot convert {type(x).__name__}")

    def __add__(self, other):
        other = MixedElement.of(other)
        return MixedElement(self.lin + other.lin, self.sums + other.sums)

    def __neg__(self):
        return MixedElement(-self.lin, -self.sums)

    def __sub__(self, other):
        return self + (-MixedElement.of(other))

    def scale(self, c) -> "MixedElement":
        return MixedElement(self.lin.scale(c), self.sums.scale(c))

    def __mul__(self, other):
        if not isinstance(other, (MixedElement, Element, CompletionElement)):
            return self.scale(other)
        other = MixedElement.of(other)
        lin = self.lin * other.lin
        sums = CompletionElement()
        if other.sums.sums:
            sums = sums + _loop_only(self.lin) * other.sums
        if self.sums.sums:
            sums = sums + self.sums * _loop_only(other.lin)
            if other.sums.sums:
                sums = sums + self.sums * other.sums
        return MixedElement(lin, sums)

    def has_sums(self) -> bool:
        return bool(self.sums.sums)

    def __repr__(self):
        return f"MixedElement({currentalg.to_sexpr(self.lin)}, {len(self.sums.sums)} sums)"


def _loop_only(e: Element) -> CompletionElement:
    for w in e.words():
        if any(x[0] not in ("E", "c") for x in w):
            raise Stuck("a completion sum multiplies a level-1 letter")
    return CompletionElement(finite=e)


def commutator(a, b) -> MixedElement:
    a, b = MixedElement.of(a), MixedElement.of(b)
    return a * b - b * a


def anticommutator(a, b) -> MixedElement:
    a, b = MixedElement.of(a), MixedElement.of(b)
    return a * b + b * a


def target_image(expr: Element, N: int) -> MixedElement:
    """Replace level-0 letters of a target-rank symbolic expression by loop images."""
    out: dict = {}
    for w, c in expr.items():
        acc = Element.word(coef=c)
        for x in w:
            if x[0] == "Y" and x[3] == 0:
                acc = acc * loop_image(x[1], x[2], N)
            else:
                acc = acc * Element.word(x)
        _accumulate(out, acc.items())
    return MixedElement(Element._raw(out))


# -- the homomorphism Psi ---------------------------------------------------------------

def _tsum(first, second, p, q, coef) -> CompletionElement:
    return sumcalc.raw_single(first, second, p, q, coef)


def psi_image(g: YGen) -> MixedElement:
    """Psi(g) in Y(sl^(n+1)) for a generator g of Y(sl^(n))."""
    n = g.n
    N = n + 1
    i, kind = g.node, g.kind
    if g.level == 0:
        if kind == "H" and i == 0:
            return MixedElement(loop_image("H", 0, N) + loop_image("H", n, N))
        if kind == "X+" and i == 0:
            return MixedElement(Element.word(E(n, 1, 1)))
        if kind == "X-" and i == 0:
            return MixedElement(Element.word(E(1, n, -1)))
        return MixedElement(loop_image(kind, i, N))
    if i != 0:
        if kind == "H":
            s = _tsum((i, N), (N, i), -1, 1, -h) + _tsum((i + 1, N), (N, i + 1), -1, 1, h)
        elif kind == "X+":
            s = _tsum((i, N), (N, i + 1), -1, 1, -h)
        else:
            s = _tsum((i + 1, N), (N, i), -1, 1, -h)
        return MixedElement(level1(kind, i, N), s)
    if kind == "X+":
        lin = br(loop_image("X+", n, N), level1("X+", 0, N))
        return MixedElement(lin, _tsum((n, N), (N, 1), 0, 1, -h))
    if kind == "X-":
        lin = br(level1("X-", 0, N), loop_image("X-", n, N))
        return MixedElement(lin, _tsum((1, N), (N, n), -1, 0, -h))
    Hn, H0 = loop_image("H", n, N), loop_image("H", 0, N)
    lin = (level1("H", 0, N) + level1("H", n, N) + Hn.scale(wrap_coef(n))
           + (Hn * H0).scale(h))
    s = _tsum((n, N), (N, n), -1, 1, -h) + _tsum((1, N), (N, 1), -1, 1, h)
    return MixedElement(lin, s)


def psi_h_tilde(i: int, n: int) -> MixedElement:
    """Psi(H~_{i,1}) = Psi(H_{i,1}) - (h/2) Psi(H_{i,0})^2."""
    H0 = psi_image(YGen(n, "H", i, 0))
    return psi_image(YGen(n, "H", i, 1)) - (H0 * H0).scale(h * HALF)


def apply_psi(expr: Element, n: int) -> MixedElement:
    """Psi applied letterwise to a symbolic expression over Y(sl^(n))."""
    cache: dict = {}
    total = MixedElement()
    for w, c in expr.items():
        acc = MixedElement(Element.word(coef=c))
        for x in w:
            if x not in cache:
                cache[x] = psi_image(YGen.from_letter(n, x))
            acc = acc * cache[x]
        total = total + acc
    return total


# -- the reduction engine -----------------------------------------------------------------

def letter_weight(x, N: int) -> tuple:
    """gl(N) weight (as a length-N tuple) followed by the t-degree."""
    wt = [0] * (N + 1)
    if x[0] == "E":
        wt[x[1] - 1] += 1
        wt[x[2] - 1] -= 1
        wt[N] = x[3]
    elif x[0] == "Y" and x[1] != "H":
        sg = 1 if x[1] == "X+" else -1
        i = x[2]
        a, b = (N, 1) if i == 0 else (i, i + 1)
        wt[a - 1] += sg
        wt[b - 1] -= sg
        wt[N] = sg if i == 0 else 0
    return tuple(wt)


def word_weight(w, N: int) -> tuple:
    tot = [0] * (N + 1)
    for x in w:
        for k, v in enumerate(letter_weight(x, N)):
            tot[k] += v
    return tuple(tot)


def _add_wt(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub_wt(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _n_level1(w) -> int:
    return sum(1 for x in w if x[0] == "Y")


def _y_nodes(e: Element) -> set:
    return {x[2] for w in e.words() for x in w if x[0] == "Y"}


@dataclass(frozen=True)
class _Rel:
    name: str
    vec: Element
    weight: tuple
    nodes: frozenset


@lru_cache(maxsize=None)
def target_relations(N: int) -> tuple:
    """Relations of Y(sl^(N)) with exactly one level-1 letter per word, loop-imaged."""
    alg = CurrentAlgebra(N)
    out = []
    for r in relations_minimalistic(N):
        if r.level1_count() != 1:
            continue
        vec = alg.normal_form(target_image(r.expr, N).lin)
        if not vec:
            continue
        wts = {word_weight(w, N) for w in vec.words()}
        if len(wts) != 1:
            raise AssertionError(f"relation {r.name} is not homogeneous")
        out.append(_Rel(r.name, vec, wts.pop(), frozenset(_y_nodes(vec))))
    return tuple(out)


def _vector(e: Element) -> dict:
    out = {}
    for w, c in e.items():
        for exp, q in c.terms().items():
            out[(w, exp)] = q
    return out


class _Span:
    """Row-echelon basis of a space of sparse rational vectors."""

    def __init__(self):
        self.rows: dict = {}
        self._keys: dict = {}

    def order(self, key):
        k = self._keys.get(key)
        if k is None:
            w, exp = key
            k = (_n_level1(w), len(w), tuple(repr(x) for x in w), exp)
            self._keys[key] = k
        return k

    def reduce(self, v: dict) -> dict:
        v = dict(v)
        while True:
            piv = [k for k in v if k in self.rows]
            if not piv:
                return v
            k = max(piv, key=self.order)
            c = v[k]
            for kk, cc in self.rows[k].items():
                val = v.get(kk, 0) - c * cc
                if val:
                    v[kk] = val
                else:
                    v.pop(kk, None)

    def add(self, v: dict) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        k = max(v, key=self.order)
        c = v[k]
        self.rows[k] = {kk: cc / c for kk, cc in v.items()}
        return True


def _from_vector(v: dict) -> Element:
    out: dict = {}
    for (w, exp), q in v.items():
        _accumulate(out, ((w, Scalar._raw({exp: q})),))
    return Element._raw(out)


def _multiplier_pool(target: Element, N: int, nodes) -> list:
    """Loop elements allowed as left/right multipliers of relation instances."""
    pool: dict = {}
    for w in target.words():
        for x in w:
            if x[0] == "E" and x[1] != x[2]:
                pool[(x,)] = Element.word(x)
    for i in range(N):
        for kind in ("X+", "X-"):
            x = next(iter(loop_image(kind, i, N).words()))
            pool[x] = Element.word(*x)
    for i in nodes:
        pool[("H", i)] = loop_image("H", i, N)
    out = []
    for key, el in sorted(pool.items(), key=lambda kv: repr(kv[0])):
        wts = {word_weight(w, N) for w in el.words() if w != (CENTRAL,)}
        out.append((el, wts.pop() if wts else (0,) * (N + 1)))
    return out


def _candidates(target: Element, N: int, nodes, depth: int, limit: int):
    alg = CurrentAlgebra(N)
    goal = {word_weight(w, N) for w in target.words() if _n_level1(w)}
    rels = [r for r in target_relations(N) if r.nodes <= nodes]
    pool = _multiplier_pool(target, N, nodes)
    by_wt: dict = {}
    for el, wt in pool:
        by_wt.setdefault(wt, []).append(el)
    one = Element.one()
    seen = set()
    count = 0
    for g in sorted(goal):
        for r in rels:
            need = _sub_wt(g, r.weight)
            combos = []
            if not any(need):
                combos.append((one, one))
            if depth >= 1:
                for el in by_wt.get(need, ()):
                    combos += [(el, one), (one, el)]
            if depth >= 2:
                for el1, wt1 in pool:
                    for el2 in by_wt.get(_sub_wt(need, wt1), ()):
                        combos += [(el1 * el2, one), (el1, el2), (one, el1 * el2)]
            for u, v in combos:
                key = (r.name, repr(u), repr(v))
                if key in seen:
                    continue
                seen.add(key)
                count += 1
                if count > limit:
                    return
                yield alg.normal_form(u * r.vec * v)


@dataclass
class Reduction:
    status: str  # "zero", "residual" or "stuck"
    residual: MixedElement
    note: str = ""
    candidates: int = 0


SEARCH_PLAN = ((False, 0), (False, 1), (False, 2), (True, 2))


def reduce_detailed(x, N: int, plan=SEARCH_PLAN, limit: int = 60000) -> Reduction:
    """Reduce a target element modulo the defining relations of Y(sl^(N)).

    ``plan`` lists (widen, depth) search stages: ``depth`` bounds the number of
    loop multipliers around a relation instance, ``widen`` admits relations
    at nodes adjacent to those present in the expression.
    """
    x = MixedElement.of(x)
    alg = CurrentAlgebra(N)
    lin = alg.normal_form(x.lin)
    for w in lin.words():
        if _n_level1(w) > 1:
            raise Stuck(f"word with two level-1 letters: {w}")
    if x.has_sums():
        canon = sumcalc.canonicalize(x.sums)
        fin = sumcalc.finite_value(canon, alg)
        if fin is None:
            return Reduction("residual", MixedElement(lin, canon), "completion sums do not collapse")
        lin = alg.normal_form(lin + fin)
    if not any(_n_level1(w) for w in lin.words()):
        return Reduction("zero" if not lin else "residual", MixedElement(lin))
    nodes0 = _y_nodes(lin)
    span = _Span()
    vec = _vector(lin)
    total = 0
    for widen, depth in plan:
        nodes = set(nodes0)
        if widen:
            nodes |= {(i + d) % N for i in nodes0 for d in (1, -1)}
        for cand in _candidates(lin, N, frozenset(nodes), depth, limit):
            total += 1
            span.add(_vector(cand))
        res = span.reduce(vec)
        if not res:
            return Reduction("zero", MixedElement(), candidates=total)
    return Reduction("residual", MixedElement(_from_vector(res)), "no relation combination found",
                     total)


def reduce(x, N: int) -> MixedElement:
    """Residual of ``x`` modulo the relations (the zero element when verified)."""
    return reduce_detailed(x, N).residual


# -- J and the level-(1,1) commutators -------------------------------------------------------

def build_J(i: int, n: int) -> MixedElement:
    """J(h_i) = H~_{i,1} - A_i + A_{i+1} in the completion of Y(sl^(n)).

    A_i lives in the loop algebra of gl(n), so only 1 <= i <= n-1 is defined.
    """
    if not 1 <= i <= n - 1:
        raise ValueError(f"J(h_{i}) needs A_{i} and A_{i + 1}; only 1 <= i <= n-1 is defined")
    return MixedElement(level1_tilde(i, n), sumcalc.build_A(i + 1, n) - sumcalc.build_A(i, n))


def build_Jx(sign: int, i: int, n: int) -> MixedElement:
    """J(x+-_i) = +-(1/2)[J(h_i), x+-_i], left unreduced."""
    x = loop_image("X+" if sign > 0 else "X-", i, n)
    return commutator(build_J(i, n), x).scale(Fraction(sign, 2))


def p_coefficients(i: int, n: int) -> dict:
    """sigma with Psi(H~_{i,1}) = (level-1 part) - sum_a sigma_a P_a."""
    if i % n == 0:
        return {n: 1, 1: -1}
    return {i: 1, i + 1: -1}


def psi_h_tilde_expected(i: int, n: int) -> MixedElement:
    """The decomposition of Psi(H~_{i,1}) into level-1 letters and P_a."""
    N = n + 1
    if i % n == 0:
        lin = level1_tilde(0, N) + level1_tilde(n, N) + loop_image("H", n, N).scale(wrap_coef(n))
    else:
        lin = level1_tilde(i, N)
    sums = CompletionElement()
    for a, sg in p_coefficients(i, n).items():
        sums = sums - sumcalc.build_P(a, N).scale(sg)
    return MixedElement(lin, sums)


@lru_cache(maxsize=None)
def _concl_zero(a: int, b: int, N: int) -> bool:
    return sumcalc.verify_concl(a, b, N).status == "pass"


def concl_combination(i: int, j: int, n: int) -> CompletionElement:
    """sum sigma_a sigma_b ([A_a,P_b] - [A_b,P_a] + [P_a,P_b]) for the pair (i, j)."""
    N = n + 1
    out = CompletionElement()
    for a, sa in p_coefficients(i, n).items():
        for b, sb in p_coefficients(j, n).items():
            out = out + sumcalc.concl_element(a, b, N).scale(sa * sb)
    return out


# -- reports --------------------------------------------------------------------------------

LEMMA_ASSUMPTION = "Lemma 2.4"


@dataclass
class PsiReport:
    relation: str
    indices: tuple
    sign: int | None
    status: str
    assumptions: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "verified" or self.status.startswith("verified-with-assumption")

    def to_json(self) -> dict:
        out = {
            "relation": self.relation,
            "indices": list(self.indices),
            "sign": self.sign,
            "status": self.status,
            "assumptions": list(self.assumptions),
            "residual": self.residual,
        }
        if self.details:
            out["details"] = self.details
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def residual_terms(m: MixedElement, limit: int = 20) -> list:
    out = []
    for w, c in list(m.lin.items())[:limit]:
        out.append({"word": [list(map(str, x)) for x in w], "coef": to_text(c)})
    if m.has_sums():
        out.append({"sums": sumcalc.to_sexpr(m.sums)})
    return out


def psi_difference(rel: RelationInstance) -> MixedElement:
    """Psi(LHS) - Psi(RHS) for a relation of Y(sl^(n))."""
    return apply_psi(rel.expr, rel.n)


def _is_level11(rel: RelationInstance) -> bool:
    return rel.rel == "Eq2.1" and tuple(rel.indices[2:]) == (1, 1)


def verify_psi_relation(rel: RelationInstance, n: int | None = None) -> PsiReport:
    """Check that Psi respects one relation instance of Y(sl^(n))."""
    n = rel.n if n is None else n
    if n != rel.n:
        raise ValueError("relation instance belongs to another rank")
    if n < 3:
        raise ValueError("Psi is defined for n >= 3")
    base = dict(relation=rel.rel, indices=rel.indices, sign=rel.sign)
    if _is_level11(rel):
        return _verify_level11(rel, base)
    try:
        red = reduce_detailed(psi_difference(rel), n + 1)
    except Stuck as exc:
        return PsiReport(status="stuck", residual=[str(exc)], **base)
    if red.status == "zero":
        return PsiReport(status="verified", details={"candidates": red.candidates}, **base)
    return PsiReport(status=red.status, residual=residual_terms(red.residual),
                     details={"note": red.note}, **base)


def _verify_level11(rel: RelationInstance, base: dict) -> PsiReport:
    n = rel.n
    N = n + 1
    i, j = rel.indices[:2]
    details: dict = {}
    residual: list = []
    ok = True
    for k in sorted({i, j}):
        diff = psi_h_tilde(k, n) - psi_h_tilde_expected(k, n)
        red = reduce_detailed(diff, N, plan=((False, 0),))
        details[f"decomposition H~_{k}"] = red.status
        if red.status != "zero":
            ok = False
            residual += residual_terms(red.residual)
    pairs = sorted({(a, b) for a in p_coefficients(i, n) for b in p_coefficients(j, n)})
    bad = [p for p in pairs if not _concl_zero(p[0], p[1], N)]
    details["concl pairs"] = [list(p) for p in pairs]
    details["concl"] = "zero" if not bad else f"nonzero at {bad}"
    if bad:
        ok = False
        residual.append({"concl": [list(p) for p in bad]})
    status = f"verified-with-assumption({LEMMA_ASSUMPTION})" if ok else "fail"
    return PsiReport(status=status, assumptions=[LEMMA_ASSUMPTION + ": J-term cancellation"],
                     residual=residual, details=details, **base)


def verify_all(n: int, relations=("Eq2.1", "Eq2.2", "Eq2.3", "Eq2.4", "Eq2.5", "Eq2.6",
                                  "Eq2.7", "Eq2.8", "Eq2.9", "Eq2.10")) -> list[PsiReport]:
    out = [verify_psi_relation(r) for r in _relations_cached(n) if r.rel in relations]
    return sorted(out, key=lambda r: (RELATION_IDS.index(r.relation), repr(r.indices), repr(r.sign)))


# -- sanity checks on the level-0 images ------------------------------------------------------

def level0_images_ok(n: int) -> list:
    """Relations among level-0 generators whose Psi-images fail (empty = all hold)."""
    alg = CurrentAlgebra(n + 1)
    bad = []
    for r in _relations_cached(n):
        if any(x[0] == "Y" and x[3] == 1 for w in r.expr.words() for x in w):
            continue
        m = psi_difference(r)
        if m.has_sums() or alg.normal_form(m.lin):
            bad.append(r.name)
    return bad


def mixed_grades(m: MixedElement) -> set:
    out = {currentalg.grade(w) for w in m.lin.words()}
    out |= {ls.grade() for ls in m.sums.sums}
    return out


def generators(n: int) -> list[YGen]:
    return [YGen(n, k, i, r) for r in (0, 1) for i in range(n) for k in KINDS]
