"""Integer points of small polyhedra and their generating functions.

Index domains of completion sums live in Z^k with k <= 2.  A domain is a list
of integer affine forms ``(a_1, ..., a_k, b)`` read as ``a.x + b >= 0``.
Generating functions are sympy rational functions; vertex cones are summed
following Brion's theorem.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import ceil, floor, gcd

import sympy

Y = sympy.symbols("y1 y2")


def affine_eval(aff, x) -> int:
    return sum(a * xi for a, xi in zip(aff[:-1], x)) + aff[-1]


def _primitive(v):
    g = 0
    for c in v:
        g = gcd(g, abs(int(c)))
    return tuple(int(c) // g for c in v) if g else tuple(int(c) for c in v)


def normalize_ineq(aff):
    """Divide by the content of the linear part and round the constant down."""
    lin = aff[:-1]
    g = 0
    for c in lin:
        g = gcd(g, abs(c))
    if g <= 1:
        return tuple(aff)
    return tuple(c // g for c in lin) + (floor(Fraction(aff[-1], g)),)


def interval(ineqs):
    """Integer interval ``[lo, hi]`` of a one-variable domain (None = infinite)."""
    lo, hi = None, None
    for a, b in ineqs:
        if a == 0:
            if b < 0:
                return 1, 0
            continue
        bound = Fraction(-b, a)
        if a > 0:
            v = ceil(bound)
            lo = v if lo is None else max(lo, v)
        else:
            v = floor(bound)
            hi = v if hi is None else min(hi, v)
    return lo, hi


def _feasible(ineqs, p) -> bool:
    return all(a * p[0] + b * p[1] + c >= 0 for a, b, c in ineqs)


def vertices(ineqs):
    out = []
    lines = [q for q in ineqs if q[0] or q[1]]
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            a1, b1, c1 = lines[i]
            a2, b2, c2 = lines[j]
            det = a1 * b2 - a2 * b1
            if det == 0:
                continue
            x = Fraction(-c1 * b2 + c2 * b1, det)
            y = Fraction(-a1 * c2 + a2 * c1, det)
            p = (x, y)
            if _feasible(ineqs, p) and p not in out:
                out.append(p)
    return out


def recession_rays(ineqs):
    """Extreme rays of the recession cone of a two-variable domain."""
    cands = set()
    for a, b, _c in ineqs:
        if a or b:
            for d in ((-b, a), (b, -a)):
                cands.add(_primitive(d))
    return sorted(d for d in cands if all(a * d[0] + b * d[1] >= 0 for a, b, _ in ineqs))


def is_bounded(ineqs) -> bool:
    if len(ineqs[0]) == 2:
        lo, hi = interval(ineqs)
        return lo is not None and hi is not None
    return not recession_rays(ineqs)


def lattice_points(ineqs, bound_hint: int = 0):
    """All integer points of a bounded domain (k = 1 or 2)."""
    k = len(ineqs[0]) - 1
    if k == 1:
        lo, hi = interval(ineqs)
        if lo is None or hi is None:
            raise ValueError("unbounded domain")
        return [(t,) for t in range(lo, hi + 1)]
    vs = vertices(ineqs)
    if not vs:
        return []
    xs = [p[0] for p in vs]
    ys = [p[1] for p in vs]
    pts = []
    for x in range(ceil(min(xs)), floor(max(xs)) + 1):
        for y in range(ceil(min(ys)), floor(max(ys)) + 1):
            if _feasible(ineqs, (x, y)):
                pts.append((x, y))
    return pts


def _cone_rays(ineqs, v):
    tight = [q for q in ineqs if (q[0] or q[1]) and q[0] * v[0] + q[1] * v[1] + q[2] == 0]
    cands = set()
    for a, b, _c in tight:
        for d in ((-b, a), (b, -a)):
            cands.add(_primitive(d))
    rays = [d for d in cands if all(a * d[0] + b * d[1] >= 0 for a, b, _ in tight)]
    if len(rays) != 2:
        # more than two candidate rays: keep the two spanning the cone
        best = None
        for i in range(len(rays)):
            for j in range(i + 1, len(rays)):
                u, w = rays[i], rays[j]
                det = u[0] * w[1] - u[1] * w[0]
                if det == 0:
                    continue
                ok = all(
                    _in_cone(u, w, r) for r in rays
                )
                if ok:
                    best = (u, w)
        if best is None:
            raise ValueError(f"degenerate vertex cone at {v}")
        rays = list(best)
    return rays


def _in_cone(u, w, r) -> bool:
    det = u[0] * w[1] - u[1] * w[0]
    lam = Fraction(r[0] * w[1] - r[1] * w[0], det)
    mu = Fraction(u[0] * r[1] - u[1] * r[0], det)
    return lam >= 0 and mu >= 0


def _mono(exps):
    out = sympy.Integer(1)
    for var, e in zip(Y, exps):
        if e:
            out = out * var ** int(e)
    return out


def cone_gf(v, u, w):
    det = u[0] * w[1] - u[1] * w[0]
    corners = [v, (v[0] + u[0], v[1] + u[1]), (v[0] + w[0], v[1] + w[1]),
               (v[0] + u[0] + w[0], v[1] + u[1] + w[1])]
    xs = [c[0] for c in corners]
    ys = [c[1] for c in corners]
    num = sympy.Integer(0)
    for x in range(floor(min(xs)), ceil(max(xs)) + 1):
        for y in range(floor(min(ys)), ceil(max(ys)) + 1):
            rx, ry = x - v[0], y - v[1]
            lam = Fraction(rx * w[1] - ry * w[0], det)
            mu = Fraction(u[0] * ry - u[1] * rx, det)
            if 0 <= lam < 1 and 0 <= mu < 1:
                num += _mono((x, y))
    return num / ((1 - _mono(u)) * (1 - _mono(w)))


@lru_cache(maxsize=None)
def domain_gf(ineqs: tuple):
    """Generating function (in y1, y2) of the integer points of a 2D domain."""
    if is_bounded(ineqs):
        return sum((_mono(p) for p in lattice_points(ineqs)), sympy.Integer(0))
    total = sympy.Integer(0)
    for v in vertices(ineqs):
        u, w = _cone_rays(ineqs, v)
        total += cone_gf(v, u, w)
    return total


_Z = sympy.Symbol("z")


def ray_power_sums(lo: int, z, degree: int):
    """[sum_{t>=lo} t^j z^t for j = 0..degree] as rational functions of z."""
    cur = _Z ** lo / (1 - _Z)
    out = [cur.subs(_Z, z)]
    for _ in range(degree):
        cur = sympy.together(_Z * sympy.diff(cur, _Z))
        out.append(cur.subs(_Z, z))
    return out


def weighted_gf(gf, weight):
    """Apply a polynomial weight sum c * s^a v^b as Euler operators in y1, y2."""
    total = sympy.Integer(0)
    for exps, c in weight:
        term = gf
        for var, e in zip(Y, exps):
            for _ in range(e):
                term = var * sympy.diff(term, var)
        total += sympy.Rational(c) * term
    return total


def solve_equality(aff):
    """Integer solutions of ``a.x + b = 0`` in Z^2 as ``x0 + t*d``; None if empty."""
    a1, a2, b = aff
    g = gcd(abs(a1), abs(a2))
    if g == 0:
        return (None if b else "all")
    if b % g:
        return None
    # extended Euclid on (a1, a2)
    def egcd(p, q):
        if q == 0:
            return (1 if p >= 0 else -1), 0, abs(p)
        x, y, gg = egcd(q, p % q)
        return y, x - (p // q) * y, gg

    x, y, _ = egcd(a1, a2)
    k = -b // g
    x0 = (x * k, y * k)
    assert a1 * x0[0] + a2 * x0[1] + b == 0
    d = (-a2 // g, a1 // g)
    return x0, d


def primitive(v):
    return _primitive(v)


def box(k: int, lo: int, hi: int):
    return product(range(lo, hi + 1), repeat=k)
