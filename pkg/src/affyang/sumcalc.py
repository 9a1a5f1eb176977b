"""Telescoped infinite sums in the degreewise completion of U(gl(N)[t, 1/t]).

The completion elements met in practice are sums such as

    P_i = h * sum_{s>=0} E_{i,N} t^{-s-1} E_{N,i} t^{s+1}

and the double sums produced by commuting two of them.  All of them are
instances of a :class:`LatticeSum`: a word of matrix units whose exponents
are integer affine functions of k <= 2 summation indices, summed over the
integer points of a polyhedral domain (with an optional polynomial weight).

Two representations of the same element are compared exactly through their
*PBW generating functions*: every summand is normally ordered region by
region (the regions are cut out by the sign of exponent differences), and the
coefficient of each normally ordered word shape is packed into a rational
generating function.  Two elements agree iff all these rational functions
agree.  Independently, :func:`truncate` expands an element inside a finite
tdeg window so results can be cross-checked by brute force.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import sympy

from . import lattice, sexpr
from .coeffring import ONE, ZERO, Scalar, as_scalar, from_text, h, to_text
from .currentalg import CENTRAL, CurrentAlgebra, Element, _accumulate
from .currentalg import truncate as truncate_element

X = sympy.symbols("x1:6")


class DivergentSum(ValueError):
    """A sum whose normally ordered coefficients are not finite."""


# -- polynomial weights in the summation indices -------------------------------

def _poly_const(c, k):
    return (((0,) * k, Fraction(c)),) if c else ()


def _poly_mul(p, q):
    out: dict = {}
    for e1, c1 in p:
        for e2, c2 in q:
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return tuple(sorted((e, c) for e, c in out.items() if c))


def _poly_from_affine(aff):
    k = len(aff) - 1
    out = []
    for j, a in enumerate(aff[:-1]):
        if a:
            e = [0] * k
            e[j] = 1
            out.append((tuple(e), Fraction(a)))
    if aff[-1]:
        out.append(((0,) * k, Fraction(aff[-1])))
    return tuple(sorted(out))


def _poly_eval(p, x):
    total = Fraction(0)
    for e, c in p:
        term = c
        for xi, ei in zip(x, e):
            term *= xi ** ei
        total += term
    return total


def _poly_substitute(p, x0, d):
    """p(x0 + t*d) as a polynomial in the single variable t."""
    out: dict = {}
    for e, c in p:
        # product of (x0_j + d_j t)^{e_j}
        acc = {0: c}
        for j, ej in enumerate(e):
            for _ in range(ej):
                nxt: dict = {}
                for deg, v in acc.items():
                    nxt[deg] = nxt.get(deg, 0) + v * x0[j]
                    nxt[deg + 1] = nxt.get(deg + 1, 0) + v * d[j]
                acc = nxt
        for deg, v in acc.items():
            out[(deg,)] = out.get((deg,), 0) + v
    return tuple(sorted((e, c) for e, c in out.items() if c))


def _poly_degree(p):
    return max((sum(e) for e, _ in p), default=0)


# -- lattice sums ---------------------------------------------------------------

def _pad(aff, before: int, after: int):
    return (0,) * before + tuple(aff[:-1]) + (0,) * after + (aff[-1],)


def _quadrant(k):
    return tuple(tuple(1 if j == i else 0 for j in range(k)) + (0,) for i in range(k))


@dataclass(frozen=True)
class LatticeSum:
    """sum over x in Z^k with ineqs(x) >= 0 of weight(x) * c^ncentral * prod E_{row,col} t^{aff(x)}.

    ``letters`` is a tuple of ``(row, col, aff)`` with ``aff`` an integer
    tuple of length k+1 (coefficients, then constant).
    """

    nvars: int
    letters: tuple
    ineqs: tuple = None
    weight: tuple = None
    ncentral: int = 0

    def __post_init__(self):
        k = self.nvars
        if self.ineqs is None:
            object.__setattr__(self, "ineqs", _quadrant(k))
        else:
            object.__setattr__(
                self, "ineqs", tuple(sorted(set(lattice.normalize_ineq(q) for q in self.ineqs)))
            )
        if self.weight is None:
            object.__setattr__(self, "weight", _poly_const(1, k))
        for row, col, aff in self.letters:
            if len(aff) != k + 1:
                raise ValueError(f"exponent {aff} does not match {k} indices")
            if not all(isinstance(a, int) for a in aff):
                raise ValueError(f"non-affine exponent {aff}")

    # -- basic structure -------------------------------------------------
    def units(self):
        return tuple((r, c) for r, c, _ in self.letters)

    def grade_form(self):
        k = self.nvars
        tot = [0] * (k + 1)
        for _, _, aff in self.letters:
            for j, a in enumerate(aff):
                tot[j] += a
        return tuple(tot)

    def grade(self) -> int:
        g = self.grade_form()
        if any(g[:-1]):
            raise ValueError("sum is not homogeneous")
        return g[-1]

    def with_ineq(self, aff) -> "LatticeSum":
        return LatticeSum(self.nvars, self.letters, self.ineqs + (tuple(aff),), self.weight, self.ncentral)

    def is_empty(self) -> bool:
        k = self.nvars
        if k == 0:
            return any(q[-1] < 0 for q in self.ineqs)
        if k == 1:
            lo, hi = lattice.interval(self.ineqs)
            return lo is not None and hi is not None and lo > hi
        return not lattice.vertices(self.ineqs)

    def restrict_equal(self, aff) -> "LatticeSum | None":
        """Restrict the domain to aff(x) = 0, eliminating one index."""
        k = self.nvars
        if not any(aff[:-1]):
            return self if aff[-1] == 0 else None
        if k == 1:
            a, b = aff
            if b % a:
                return None
            t = -b // a
            x0, d = (t,), (0,)
            newk = 0
        else:
            sol = lattice.solve_equality(aff)
            if sol is None:
                return None
            x0, d = sol
            newk = 1

        def sub(q):
            lin = sum(a * dj for a, dj in zip(q[:-1], d))
            const = sum(a * xj for a, xj in zip(q[:-1], x0)) + q[-1]
            return (lin, const) if newk == 1 else (const,)

        letters = tuple((r, c, sub(a)) for r, c, a in self.letters)
        ineqs = tuple(sub(q) for q in self.ineqs)
        if newk == 1:
            weight = _poly_substitute(self.weight, x0, d)
        else:
            weight = _poly_const(_poly_eval(self.weight, x0), 0)
        if newk == 0 and any(q[-1] < 0 for q in ineqs):
            return None
        if newk == 0:
            return LatticeSum(0, letters, (), weight, self.ncentral)
        return LatticeSum(1, letters, ineqs, weight, self.ncentral)

    def points(self, lo: int, hi: int):
        """Domain points in the box [lo, hi]^k (brute force)."""
        for x in lattice.box(self.nvars, lo, hi):
            if all(lattice.affine_eval(q, x) >= 0 for q in self.ineqs):
                yield x

    def __mul__(self, other: "LatticeSum") -> "LatticeSum":
        k1, k2 = self.nvars, other.nvars
        letters = tuple((r, c, _pad(a, 0, k2)) for r, c, a in self.letters) + tuple(
            (r, c, _pad(a, k1, 0)) for r, c, a in other.letters
        )
        ineqs = tuple(_pad(q, 0, k2) for q in self.ineqs) + tuple(_pad(q, k1, 0) for q in other.ineqs)
        w1 = tuple((e + (0,) * k2, c) for e, c in self.weight)
        w2 = tuple(((0,) * k1 + e, c) for e, c in other.weight)
        return LatticeSum(k1 + k2, letters, ineqs, _poly_mul(w1, w2), self.ncentral + other.ncentral)

    def with_letters(self, letters, ncentral=None, weight=None) -> "LatticeSum":
        return LatticeSum(
            self.nvars,
            tuple(letters),
            self.ineqs,
            self.weight if weight is None else weight,
            self.ncentral if ncentral is None else ncentral,
        )


def word_to_lattice(word) -> LatticeSum:
    letters = []
    nc = 0
    for x in word:
        if x[0] == "c":
            nc += 1
        elif x[0] == "E":
            letters.append((x[1], x[2], (x[3],)))
        else:
            raise ValueError(f"letter {x!r} cannot appear in a completion sum")
    return LatticeSum(0, tuple(letters), (), None, nc)


# -- the named sum shapes ----------------------------------------------------------

@dataclass(frozen=True)
class SingleSum:
    """coef * sum_{s>=0} E_first t^{-s} E_second t^{s+m}."""

    coef: Scalar
    first: tuple
    second: tuple
    m: int

    def lattice(self) -> LatticeSum:
        (a, b), (c, d) = self.first, self.second
        return LatticeSum(1, ((a, b, (-1, 0)), (c, d, (1, self.m))))

    def element(self) -> "CompletionElement":
        return CompletionElement(sums={self.lattice(): as_scalar(self.coef)})


@dataclass(frozen=True)
class DoubleSum:
    """coef * sum_{s,v>=0} prod_k E_{unit_k} t^{es_k s + ev_k v + e0_k}."""

    coef: Scalar
    factors: tuple  # ((row, col), (es, ev, e0)) x 3

    def __post_init__(self):
        if len(self.factors) != 3:
            raise ValueError("a DoubleSum has exactly three factors")
        for _, (es, ev, _e0) in self.factors:
            if es not in (-1, 0, 1) or ev not in (-1, 0, 1):
                raise ValueError("DoubleSum exponents have coefficients in {-1, 0, 1}")

    def lattice(self) -> LatticeSum:
        return LatticeSum(2, tuple((u[0], u[1], tuple(e)) for u, e in self.factors))

    def element(self) -> "CompletionElement":
        return CompletionElement(sums={self.lattice(): as_scalar(self.coef)})


def raw_single(first, second, p: int, q: int, coef=ONE) -> "CompletionElement":
    """coef * sum_{s>=0} E_first t^{-s+p} E_second t^{s+q}, uncanonicalized."""
    (a, b), (c, d) = first, second
    ls = LatticeSum(1, ((a, b, (-1, p)), (c, d, (1, q))))
    return CompletionElement(sums={ls: as_scalar(coef)})


# -- completion elements -----------------------------------------------------------

class CompletionElement:
    """Finite part (an Element) plus a finite combination of lattice sums."""

    __slots__ = ("finite", "sums")

    def __init__(self, finite: Element | None = None, sums=None):
        self.finite = finite if finite is not None else Element()
        clean: dict = {}
        for ls, c in (sums.items() if hasattr(sums, "items") else (sums or ())):
            c = as_scalar(c)
            if not c:
                continue
            if ls.nvars == 0:
                w = (CENTRAL,) * ls.ncentral + tuple(("E", r, cc, a[0]) for r, cc, a in ls.letters)
                if ls.is_empty():
                    continue
                self.finite = self.finite + Element.word(*w, coef=c * Scalar.const(_poly_eval(ls.weight, ())))
                continue
            _accumulate(clean, ((ls, c),))
        self.sums = clean

    @classmethod
    def of(cls, x) -> "CompletionElement":
        if isinstance(x, CompletionElement):
            return x
        if isinstance(x, Element):
            return cls(finite=x)
        if isinstance(x, (SingleSum, DoubleSum)):
            return x.element()
        raise TypeError(f"cannot convert {type(x).__name__}")

    def terms(self):
        """All terms as (LatticeSum, coef), finite words included."""
        for w, c in self.finite.items():
            yield word_to_lattice(w), c
        yield from self.sums.items()

    def __add__(self, other):
        other = CompletionElement.of(other)
        out = dict(self.sums)
        _accumulate(out, other.sums.items())
        return CompletionElement(self.finite + other.finite, out)

    def __neg__(self):
        return CompletionElement(-self.finite, {k: -v for k, v in self.sums.items()})

    def __sub__(self, other):
        return self + (-CompletionElement.of(other))

    def scale(self, c) -> "CompletionElement":
        c = as_scalar(c)
        return CompletionElement(self.finite.scale(c), {k: v * c for k, v in self.sums.items()})

    def __mul__(self, other):
        if not isinstance(other, (CompletionElement, Element, SingleSum, DoubleSum)):
            return self.scale(other)
        other = CompletionElement.of(other)
        out: dict = {}
        for l1, c1 in self.terms():
            for l2, c2 in other.terms():
                prod = l1 * l2
                if prod.nvars > 2:
                    raise ValueError("products with more than two summation indices are not supported")
                _accumulate(out, ((prod, c1 * c2),))
        return CompletionElement(sums=out)

    __rmul__ = scale

    def is_zero_syntactically(self) -> bool:
        return not self.finite and not self.sums

    def __repr__(self):
        return f"CompletionElement({to_sexpr(self)})"


# -- closed-form brackets ------------------------------------------------------------

def _bracket_letters(x, y, k, alg: CurrentAlgebra):
    """[x, y] for letter patterns: list of (letters, coef, eq_aff, weight_aff, dcentral)."""
    a, b, f = x
    c, d, g = y
    s = tuple(p + q for p, q in zip(f, g))
    out = []
    if b == c:
        out.append((((a, d, s),), ONE, None, None, 0))
    if d == a:
        out.append((((c, b, s),), -ONE, None, None, 0))
    if b == c and a == d:
        for w, v in alg.level.items():
            nc = sum(1 for z in w if z[0] == "c")
            if len(w) != nc:
                raise ValueError("level must be a scalar or a power of the central letter")
            out.append(((), v, s, f, nc))
    if a == b and c == d and alg.trace_level:
        out.append(((), alg.trace_level, s, f, 0))
    return out


def _emit(ls: LatticeSum, prefix, mid, suffix, coef, eq, waff, dc, out: dict):
    new = ls.with_letters(prefix + mid + suffix, ncentral=ls.ncentral + dc)
    if eq is not None:
        new = LatticeSum(new.nvars, new.letters, new.ineqs,
                         _poly_mul(new.weight, _poly_from_affine(waff)), new.ncentral)
        new = new.restrict_equal(eq)
        if new is None:
            return
    _accumulate(out, ((new, coef),))


def bracket_terms(l1: LatticeSum, l2: LatticeSum, alg: CurrentAlgebra) -> dict:
    """[l1, l2] by the Leibniz rule: sum_{i,j} x_<i y_<j [x_i, y_j] y_>j x_>i."""
    prod = l1 * l2
    m = len(l1.letters)
    xs = prod.letters[:m]
    ys = prod.letters[m:]
    k = prod.nvars
    out: dict = {}
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            for mid, c, eq, waff, dc in _bracket_letters(x, y, k, alg):
                _emit(prod, xs[:i] + ys[:j], tuple(mid), ys[j + 1:] + xs[i + 1:], c, eq, waff, dc, out)
    return out


def commutator(a, b, alg: CurrentAlgebra) -> CompletionElement:
    """Exact commutator of two completion elements by closed-form bracket rules."""
    a = CompletionElement.of(a)
    b = CompletionElement.of(b)
    out: dict = {}
    for l1, c1 in a.terms():
        for l2, c2 in b.terms():
            for ls, c in bracket_terms(l1, l2, alg).items():
                if ls.nvars > 2:
                    raise ValueError("too many summation indices")
                _accumulate(out, ((ls, c * c1 * c2),))
    return canonicalize(CompletionElement(sums=out))


def commutator_sum_word(a, w, alg: CurrentAlgebra) -> CompletionElement:
    """[a, w] for a single sum a and a finite word (or Element) w."""
    if isinstance(w, tuple):
        w = Element.word(*w)
    return commutator(a, w, alg)


def commutator_sum_sum(a, b, alg: CurrentAlgebra) -> CompletionElement:
    """[a, b] for two single sums: double sums plus lower terms."""
    return commutator(a, b, alg)


# -- canonical forms of the named shapes -----------------------------------------------

def _as_raw_single(ls: LatticeSum):
    """Match sum_{s>=lo} E t^{-s+p} E t^{s+q} (constant weight); None otherwise."""
    if ls.nvars != 1 or len(ls.letters) != 2 or len(ls.weight) > 1:
        return None
    if ls.weight and any(ls.weight[0][0]):
        return None
    (a, b, f), (c, d, g) = ls.letters
    if f[0] == 1 and g[0] == -1:
        # substitute s -> -s
        f, g = (-1, f[1]), (1, g[1])
        ineqs = tuple((-q[0], q[1]) for q in ls.ineqs)
    elif f[0] == -1 and g[0] == 1:
        ineqs = ls.ineqs
    else:
        return None
    lo, hi = lattice.interval(ineqs)
    if lo is None or hi is not None:
        return None
    w = ls.weight[0][1] if ls.weight else Fraction(0)
    return (a, b), (c, d), f[1] + lo, g[1] - lo, w


def reindex_canonical(raw) -> CompletionElement:
    """Bring single sums sum_{s>=0} E t^{-s+p} E t^{s+q} to start-0 form plus boundary words."""
    raw = CompletionElement.of(raw)
    finite = raw.finite
    out: dict = {}
    for ls, c in raw.sums.items():
        m = _as_raw_single(ls)
        if m is None:
            _accumulate(out, ((ls, c),))
            continue
        first, second, p, q, w = m
        c = c * Scalar.const(w)
        # sum_{s>=0} x_{-s+p} y_{s+q} = sum_{s'>=-p} x_{-s'} y_{s'+p+q}
        canon = SingleSum(ONE, first, second, p + q).lattice()
        _accumulate(out, ((canon, c),))
        lo = -p
        x = ("E",) + tuple(first)
        y = ("E",) + tuple(second)
        if lo > 0:
            for s in range(0, lo):
                finite = finite - Element.word(x + (-s,), y + (s + p + q,), coef=c)
        else:
            for s in range(lo, 0):
                finite = finite + Element.word(x + (-s,), y + (s + p + q,), coef=c)
    return CompletionElement(finite, out)


def canonicalize(e: CompletionElement) -> CompletionElement:
    """Start-0 form for single sums; empty domains dropped."""
    e = reindex_canonical(e)
    return CompletionElement(e.finite, {ls: c for ls, c in e.sums.items() if not ls.is_empty()})


def single_sums(e: CompletionElement) -> list:
    out = []
    for ls, c in e.sums.items():
        m = _as_raw_single(ls)
        if m and m[2] == 0 and ls.ineqs == ((1, 0),):
            out.append(SingleSum(c * Scalar.const(m[4]), m[0], m[1], m[3]))
    return out


def double_sums(e: CompletionElement) -> list:
    out = []
    for ls, c in e.sums.items():
        if (ls.nvars == 2 and len(ls.letters) == 3 and ls.ineqs == _quadrant(2)
                and ls.weight == _poly_const(1, 2)):
            try:
                out.append(DoubleSum(c, tuple(((r, cc), a) for r, cc, a in ls.letters)))
            except ValueError:
                pass
    return out


# -- the elements A_i and P_i -----------------------------------------------------------

def _check_index(i, lo, hi, what):
    if not (lo <= i <= hi):
        raise ValueError(f"{what} index {i} out of range [{lo}, {hi}]")


def build_A(i: int, N: int) -> CompletionElement:
    """A_i as four families of single sums.

    (h/2) sum_{u>i} E_{u,i}(-s) E_{i,u}(s) - (h/2) sum_{v<i} E_{i,v}(-s) E_{v,i}(s)
    + (h/2) sum_{u<i} E_{u,i}(-s-1) E_{i,u}(s+1) - (h/2) sum_{v>i} E_{i,v}(-s-1) E_{v,i}(s+1)
    """
    _check_index(i, 1, N, "A")
    half = h * Scalar.const(Fraction(1, 2))
    out = CompletionElement()
    for u in range(1, N + 1):
        if u > i:
            out = out + raw_single((u, i), (i, u), 0, 0, half)
            out = out + raw_single((i, u), (u, i), -1, 1, -half)
        elif u < i:
            out = out + raw_single((i, u), (u, i), 0, 0, -half)
            out = out + raw_single((u, i), (i, u), -1, 1, half)
    return canonicalize(out)


def build_P(i: int, N: int) -> CompletionElement:
    """h * sum_{s>=0} E_{i,N} t^{-s-1} E_{N,i} t^{s+1}."""
    _check_index(i, 1, N - 1, "P")
    return canonicalize(raw_single((i, N), (N, i), -1, 1, h))


# -- PBW generating functions (exact comparison) -----------------------------------

def _pbw_key(row, col, t):
    return (t, row, col)


def _sorted_pieces(ls: LatticeSum, coef: Scalar, alg: CurrentAlgebra):
    """Normally order a lattice sum region by region; yields (LatticeSum, coef)."""
    stack = [(ls, coef)]
    while stack:
        t, c = stack.pop()
        if t.is_empty():
            continue
        k = t.nvars
        split = False
        for i in range(len(t.letters) - 1):
            a, b, f = t.letters[i]
            cc, d, g = t.letters[i + 1]
            diff = tuple(q - p for p, q in zip(f, g))  # tdeg(y) - tdeg(x)
            if (a, b) <= (cc, d):
                ordered = diff
                misordered = tuple(-z for z in diff[:-1]) + (-diff[-1] - 1,)
            else:
                ordered = diff[:-1] + (diff[-1] - 1,)
                misordered = tuple(-z for z in diff)
            if k == 0:
                if misordered[-1] < 0:
                    continue
                bad = t
            else:
                bad = t.with_ineq(misordered)
                if bad.is_empty():
                    continue
                good = t.with_ineq(ordered)
                if not good.is_empty():
                    stack.append((good, c))
            split = True
            x, y = bad.letters[i], bad.letters[i + 1]
            pre, post = bad.letters[:i], bad.letters[i + 2:]
            stack.append((bad.with_letters(pre + (y, x) + post), c))
            tmp: dict = {}
            for mid, cb, eq, waff, dc in _bracket_letters(x, y, k, alg):
                _emit(bad, pre, tuple(mid), post, cb, eq, waff, dc, tmp)
            for piece, cp in tmp.items():
                stack.append((piece, c * cp))
            break
        if not split:
            yield t, c


def _mono_x(exps):
    out = sympy.Integer(1)
    for var, e in zip(X, exps):
        if e:
            out = out * var ** int(e)
    return out


def _term_gf(t: LatticeSum):
    """Generating function of a normally ordered lattice sum in shape coordinates."""
    k = t.nvars
    r = len(t.letters) - 1
    L = [aff for _, _, aff in t.letters[:-1]]
    base = _mono_x([aff[-1] for aff in L])
    if k == 0:
        return base * sympy.Rational(_poly_eval(t.weight, ()))
    if k == 1:
        lo, hi = lattice.interval(t.ineqs)
        col = [aff[0] for aff in L]
        z = _mono_x(col)
        if lo is not None and hi is not None:
            return sum(
                (base * z ** tt * sympy.Rational(_poly_eval(t.weight, (tt,))) for tt in range(lo, hi + 1)),
                sympy.Integer(0),
            )
        if not any(col):
            raise DivergentSum(f"infinite coefficient in {t}")
        weight = t.weight
        if lo is None:
            # t -> -t
            z = _mono_x([-a for a in col])
            lo = -hi
            weight = tuple(((e[0],), c * (-1) ** e[0]) for e, c in weight)
        sums = lattice.ray_power_sums(lo, z, _poly_degree(weight))
        return base * sum((sympy.Rational(c) * sums[e[0]] for e, c in weight), sympy.Integer(0))
    if k == 2:
        if lattice.is_bounded(t.ineqs):
            return sum(
                (sympy.Rational(_poly_eval(t.weight, p))
                 * _mono_x([lattice.affine_eval(aff, p) for aff in L])
                 for p in lattice.lattice_points(t.ineqs)),
                sympy.Integer(0),
            )
        gf = lattice.weighted_gf(lattice.domain_gf(t.ineqs), t.weight)
        cols = [[aff[j] for aff in L] for j in range(2)]
        rank = sympy.Matrix([list(a[:-1]) for a in L]).rank() if L else 0
        if rank < 2:
            gf = sympy.cancel(sympy.together(gf))
        sub = {lattice.Y[j]: _mono_x(cols[j]) for j in range(2)}
        res = gf.subs(sub, simultaneous=True)
        if res.has(sympy.zoo, sympy.nan):
            raise DivergentSum(f"infinite coefficient in {t}")
        return base * res
    raise ValueError("at most two summation indices")


def pbw_generating_functions(e, alg: CurrentAlgebra) -> dict:
    """{(ncentral, units, grade, param monomial): generating function}."""
    e = CompletionElement.of(e)
    acc: dict = {}
    for ls, c in e.terms():
        for piece, cp in _sorted_pieces(ls, c, alg):
            if not piece.letters and piece.nvars:
                gf = _term_gf(LatticeSum(piece.nvars, (("_", "_", (0,) * (piece.nvars + 1)),),
                                         piece.ineqs, piece.weight, piece.ncentral))
                g = 0
            else:
                gf = _term_gf(piece)
                g = piece.grade()
            key0 = (piece.ncentral, piece.units(), g)
            for exp, q in cp.terms().items():
                key = key0 + (exp,)
                acc[key] = acc.get(key, sympy.Integer(0)) + sympy.Rational(q) * gf
    return acc


def canonical_residual(e, alg: CurrentAlgebra) -> dict:
    """Nonzero PBW generating functions of e (empty iff e == 0)."""
    out = {}
    for key, gf in pbw_generating_functions(e, alg).items():
        val = sympy.cancel(sympy.together(gf))
        if val != 0:
            out[key] = val
    return out


def is_zero(e, alg: CurrentAlgebra) -> bool:
    return not canonical_residual(e, alg)


def equal(a, b, alg: CurrentAlgebra) -> bool:
    return is_zero(CompletionElement.of(a) - CompletionElement.of(b), alg)


def _laurent_terms(expr, nvars: int):
    """Exponent -> rational coefficient of a Laurent polynomial; None if not one."""
    num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
    gens = X[:nvars]
    if nvars == 0:
        return {(): sympy.Rational(num / den)} if num != 0 else {}
    dpoly = sympy.Poly(den, *gens)
    if len(dpoly.terms()) != 1:
        return None
    (dexp, dc), = dpoly.terms()
    out = {}
    for exp, c in sympy.Poly(num, *gens).terms():
        out[tuple(a - b for a, b in zip(exp, dexp))] = sympy.Rational(c) / dc
    return out


def finite_value(e, alg: CurrentAlgebra) -> Element | None:
    """The finite Element equal to ``e`` when every sum collapses; else None.

    Collapse is decided on the PBW generating functions: ``e`` is finite
    exactly when each of them is a Laurent polynomial.
    """
    e = CompletionElement.of(e)
    if not e.sums:
        return alg.normal_form(e.finite)
    out: dict = {}
    for (nc, units, g, exp), gf in canonical_residual(e, alg).items():
        r = max(len(units) - 1, 0)
        terms = _laurent_terms(gf, r)
        if terms is None:
            return None
        coef0 = Scalar._raw({exp: Fraction(1)})
        for texp, q in terms.items():
            if units:
                degs = list(texp) + [g - sum(texp)]
                w = tuple(("E", a, b, int(t)) for (a, b), t in zip(units, degs))
            else:
                w = ()
            q = Fraction(int(q.p), int(q.q))
            _accumulate(out, (((CENTRAL,) * nc + w, coef0 * Scalar.const(q)),))
    return Element._raw(out)


# -- truncation oracle ------------------------------------------------------------------

def _box_bound(ls: LatticeSum, S: int) -> int:
    consts = [abs(aff[-1]) for _, _, aff in ls.letters] + [abs(q[-1]) for q in ls.ineqs]
    return 2 * S + max(consts, default=0) + 2


def truncate(e, S: int) -> Element:
    """Finite part of e made of words whose letters all satisfy |tdeg| <= S.

    Summands are expanded by brute force over the index box; a summand
    contributes iff every letter has |tdeg| <= S.
    """
    e = CompletionElement.of(e)
    out: dict = {}
    _accumulate(out, truncate_element(e.finite, S).items())
    for ls, c in e.sums.items():
        B = _box_bound(ls, S)
        for x in ls.points(-B, B):
            degs = [lattice.affine_eval(aff, x) for _, _, aff in ls.letters]
            if any(abs(t) > S for t in degs):
                continue
            wgt = _poly_eval(ls.weight, x)
            if not wgt:
                continue
            w = (CENTRAL,) * ls.ncentral + tuple(("E", r, cc, t) for (r, cc, _), t in zip(ls.letters, degs))
            _accumulate(out, ((w, c * Scalar.const(wgt)),))
    return Element._raw(out)


def check_bounded_support(ls: LatticeSum, S: int) -> bool:
    """True if only finitely many summands have all letters within |tdeg| <= S."""
    k = ls.nvars
    extra = []
    for _, _, aff in ls.letters:
        extra.append(tuple(-a for a in aff[:-1]) + (S - aff[-1],))
        extra.append(tuple(aff[:-1]) + (S + aff[-1],))
    ineqs = tuple(lattice.normalize_ineq(q) for q in ls.ineqs + tuple(extra))
    if k == 0:
        return True
    return lattice.is_bounded(ineqs)


# -- reports ------------------------------------------------------------------------------

@dataclass
class Report:
    id: str
    status: str
    residual: list = field(default_factory=list)
    window: int | None = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"id": self.id, "status": self.status, "residual": self.residual, "window": self.window}
        if self.details:
            out["details"] = self.details
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _residual_words(e: Element, limit: int = 20) -> list:
    out = []
    for w, c in list(e.items())[:limit]:
        out.append({"word": [list(x) for x in w], "coef": to_text(c)})
    return out


def concl_element(i: int, j: int, N: int) -> CompletionElement:
    alg = CurrentAlgebra(N)
    Ai, Aj, Pi, Pj = build_A(i, N), build_A(j, N), build_P(i, N), build_P(j, N)
    return commutator(Ai, Pj, alg) - commutator(Aj, Pi, alg) + commutator(Pi, Pj, alg)


def concl_truncated(i: int, j: int, N: int, S: int) -> Element:
    """[A_i,P_j] - [A_j,P_i] + [P_i,P_j] computed from windowed truncations."""
    alg = CurrentAlgebra(N)
    Ai, Aj = truncate(build_A(i, N), S), truncate(build_A(j, N), S)
    Pi, Pj = truncate(build_P(i, N), S), truncate(build_P(j, N), S)
    total = alg.bracket(Ai, Pj) - alg.bracket(Aj, Pi) + alg.bracket(Pi, Pj)
    return truncate_element(total, S)


def boundary_only(e: Element, S: int) -> bool:
    """Every word contains a loop letter with |tdeg| >= S - 1."""
    return all(any(x[0] == "E" and abs(x[3]) >= S - 1 for x in w) for w in e.words())


def verify_concl(i: int, j: int, N: int, windows: Iterable[int] = (), mode: str = "exact") -> Report:
    """Check [A_i,P_j] - [A_j,P_i] + [P_i,P_j] = 0 exactly and/or under truncation."""
    _check_index(i, 1, N - 1, "concl")
    _check_index(j, 1, N - 1, "concl")
    rid = f"concl:N={N}:i={i}:j={j}"
    details: dict = {}
    status = "pass"
    residual: list = []
    if mode in ("exact", "both"):
        alg = CurrentAlgebra(N)
        try:
            res = canonical_residual(concl_element(i, j, N), alg)
        except (DivergentSum, NotImplementedError) as exc:
            details["exact"] = f"stuck: {exc}"
            status = "stuck"
        else:
            details["exact"] = "zero" if not res else f"{len(res)} nonzero shapes"
            if res:
                status = "fail"
                residual += [{"shape": repr(k[:3]), "gf": str(v)} for k, v in list(res.items())[:10]]
    window = None
    if mode in ("truncate", "both"):
        for S in windows:
            window = S
            tr = concl_truncated(i, j, N, S)
            ok = boundary_only(tr, S)
            details[f"window {S}"] = f"{len(tr)} boundary words" if ok else "interior residual"
            if not ok:
                status = "fail"
                residual += _residual_words(
                    Element._raw({w: c for w, c in tr.items()
                                  if all(x[0] != "E" or abs(x[3]) < S - 1 for x in w)})
                )
    return Report(rid, status, residual, window, details)


# -- s-expressions ----------------------------------------------------------------------

def _aff_sx(aff):
    return [str(a) for a in aff]


def to_sexpr(e) -> str:
    e = CompletionElement.of(e)
    from .currentalg import to_sexpr as lin_sx

    parts = [sexpr.parse(lin_sx(e.finite))]
    for s in single_sums(e):
        parts.append(["sum1", sexpr.Quoted(to_text(s.coef)), ["E", str(s.first[0]), str(s.first[1])],
                      ["E", str(s.second[0]), str(s.second[1])], str(s.m)])
    named = {ss.lattice() for ss in single_sums(e)} | {ds.lattice() for ds in double_sums(e)}
    for d in double_sums(e):
        parts.append(["sum2", sexpr.Quoted(to_text(d.coef))] + [
            ["factor", ["E", str(u[0]), str(u[1])]] + _aff_sx(a) for u, a in d.factors
        ])
    for ls, c in e.sums.items():
        if ls in named:
            continue
        parts.append(["lsum", sexpr.Quoted(to_text(c)), str(ls.nvars), str(ls.ncentral),
                      ["letters"] + [["E", str(r), str(cc)] + _aff_sx(a) for r, cc, a in ls.letters],
                      ["ineqs"] + [_aff_sx(q) for q in ls.ineqs],
                      ["weight"] + [[str(x) for x in ex] + [str(cw)] for ex, cw in ls.weight]])
    return sexpr.dump(["completion"] + parts)


def from_sexpr(text: str) -> CompletionElement:
    from .currentalg import from_sexpr as lin_from

    tree = sexpr.parse(text)
    if tree[0] != "completion":
        raise ValueError("expected (completion ...)")
    out = CompletionElement()
    for part in tree[1:]:
        tag = part[0]
        if tag == "lin":
            out = out + CompletionElement(finite=lin_from(sexpr.dump(part)))
        elif tag == "sum1":
            _, coef, f, s, m = part
            out = out + SingleSum(from_text(coef), (int(f[1]), int(f[2])), (int(s[1]), int(s[2])), int(m)).element()
        elif tag == "sum2":
            coef = from_text(part[1])
            factors = tuple(((int(fa[1][1]), int(fa[1][2])), tuple(int(z) for z in fa[2:])) for fa in part[2:])
            out = out + DoubleSum(coef, factors).element()
        elif tag == "lsum":
            _, coef, k, nc, letters, ineqs, weight = part
            k = int(k)
            ls = LatticeSum(
                k,
                tuple((int(l[1]), int(l[2]), tuple(int(z) for z in l[3:])) for l in letters[1:]),
                tuple(tuple(int(z) for z in q) for q in ineqs[1:]),
                tuple((tuple(int(z) for z in wv[:-1]), Fraction(wv[-1])) for wv in weight[1:]),
                int(nc),
            )
            out = out + CompletionElement(sums={ls: from_text(coef)})
        else:
            raise ValueError(f"unknown completion part {tag!r}")
    return out
