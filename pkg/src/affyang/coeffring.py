"""Exact polynomial coefficients in the formal parameters.

A :class:`Scalar` is a sparse polynomial with rational coefficients in the
five global parameters ``h`` (the deformation parameter hbar), ``e``
(epsilon), ``alpha``, ``e1`` and ``e2``.  The integer rank ``n`` is never a
variable; callers substitute it as a rational constant.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

PARAMS = ("h", "e", "alpha", "e1", "e2")
_NPAR = len(PARAMS)
_INDEX = {name: k for k, name in enumerate(PARAMS)}
_ZERO_EXP = (0,) * _NPAR

Number = Union[int, Fraction]


class Scalar:
    """Immutable sparse polynomial; zero coefficients are never stored."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple, Fraction] | None = None):
        clean = {}
        if terms:
            for exp, c in terms.items():
                if c:
                    clean[exp] = Fraction(c)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Scalar":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c: Number) -> "Scalar":
        c = Fraction(c)
        return cls._raw({_ZERO_EXP: c} if c else {})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "Scalar":
        exp = [0] * _NPAR
        exp[_INDEX[name]] = power
        return cls._raw({tuple(exp): Fraction(1)})

    # -- inspection ---------------------------------------------------
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and _ZERO_EXP in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self._terms.get(_ZERO_EXP, Fraction(0))

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def variables(self) -> set[str]:
        out = set()
        for exp in self._terms:
            out.update(PARAMS[k] for k, p in enumerate(exp) if p)
        return out

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = as_scalar(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for exp, c in other._terms.items():
            v = out.get(exp, 0) + c
            if v:
                out[exp] = v
            else:
                out.pop(exp, None)
        return Scalar._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-as_scalar(other))

    def __rsub__(self, other):
        return as_scalar(other) + (-self)

    def __mul__(self, other):
        other = as_scalar(other)
        if not self._terms or not other._terms:
            return ZERO
        if len(other._terms) == 1 and _ZERO_EXP in other._terms:
            c = other._terms[_ZERO_EXP]
            return Scalar._raw({e: v * c for e, v in self._terms.items()})
        if len(self._terms) == 1 and _ZERO_EXP in self._terms:
            return other * self
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(exp, 0) + c1 * c2
                if v:
                    out[exp] = v
                else:
                    out.pop(exp, None)
        return Scalar._raw(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomial")
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    def __truediv__(self, other):
        """Division by a nonzero rational constant only."""
        other = as_scalar(other)
        c = other.constant_value()
        if c == 0:
            raise ZeroDivisionError("division by zero scalar")
        return Scalar._raw({e: v / c for e, v in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar.const(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # -- evaluation ---------------------------------------------------
    def subs(self, bindings: Mapping[str, "Scalar | Number"]) -> "Scalar":
        return subst_params(self, bindings)

    def __repr__(self):
        return f"Scalar({to_text(self)!r})"

    def __str__(self):
        return to_text(self)


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")


ZERO = Scalar._raw({})
ONE = Scalar.const(1)
h = Scalar.var("h")
e = Scalar.var("e")
alpha = Scalar.var("alpha")
e1 = Scalar.var("e1")
e2 = Scalar.var("e2")


def scalar_arith(a, b, op: str) -> Scalar:
    a = as_scalar(a)
    if op == "add":
        return a + as_scalar(b)
    if op == "mul":
        return a * as_scalar(b)
    if op == "neg":
        return -a
    raise ValueError(f"unknown op {op!r}")


def _check_acyclic(bindings: Mapping[str, Scalar]) -> None:
    # Simultaneous substitution is always well defined, but a binding whose
    # image mentions another bound name is rejected: it signals the caller
    # expected sequential rewriting, which could loop.
    graph = {k: as_scalar(v).variables() & set(bindings) for k, v in bindings.items()}
    state: dict[str, int] = {}

    def visit(k):
        if state.get(k) == 1:
            raise ValueError(f"cyclic parameter binding through {k!r}")
        if state.get(k) == 2:
            return
        state[k] = 1
        for m in graph[k]:
            visit(m)
        state[k] = 2

    for k in graph:
        visit(k)


def subst_params(a: Scalar, bindings: Mapping[str, "Scalar | Number"]) -> Scalar:
    """Substitute parameters simultaneously; acyclic bindings only."""
    for k in bindings:
        if k not in _INDEX:
            raise KeyError(f"unknown parameter {k!r}")
    bound = {k: as_scalar(v) for k, v in bindings.items()}
    _check_acyclic(bound)
    a = as_scalar(a)
    if not bound:
        return a
    idx = [(_INDEX[k], v) for k, v in bound.items()]
    out = ZERO
    powcache: dict = {}
    for exp, c in a._terms.items():
        rest = list(exp)
        term = Scalar.const(c)
        for k, v in idx:
            p = rest[k]
            if p:
                rest[k] = 0
                key = (k, p)
                if key not in powcache:
                    powcache[key] = v ** p
                term = term * powcache[key]
        term = term * Scalar._raw({tuple(rest): Fraction(1)})
        out = out + term
    return out


# -- text form ----------------------------------------------------------

def _fmt_frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _order_key(exp):
    return (-sum(exp), tuple(-p for p in exp))


def to_text(a: Scalar) -> str:
    """Canonical text: ``q * h^a e^b`` terms joined by `` + ``."""
    if not a._terms:
        return "0"
    parts = []
    for exp in sorted(a._terms, key=_order_key):
        c = a._terms[exp]
        mono = " ".join(
            f"{PARAMS[k]}^{p}" for k, p in enumerate(exp) if p
        )
        parts.append(_fmt_frac(c) if not mono else f"{_fmt_frac(c)} * {mono}")
    return " + ".join(parts)


_TERM = re.compile(r"^\s*(-?\d+(?:/\d+)?)\s*(?:\*\s*(.*))?$")


def from_text(text: str) -> Scalar:
    text = text.strip()
    if text == "0":
        return ZERO
    out: dict = {}
    for chunk in text.split(" + "):
        m = _TERM.match(chunk)
        if not m:
            raise ValueError(f"malformed scalar term {chunk!r}")
        c = Fraction(m.group(1))
        exp = [0] * _NPAR
        if m.group(2):
            for factor in m.group(2).split():
                name, _, power = factor.partition("^")
                if name not in _INDEX:
                    raise ValueError(f"unknown parameter {name!r}")
                exp[_INDEX[name]] += int(power or 1)
        key = tuple(exp)
        v = out.get(key, 0) + c
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return Scalar._raw(out)


def lin_comb(pairs: Iterable[tuple["Scalar | Number", Scalar]]) -> Scalar:
    out = ZERO
    for c, s in pairs:
        out = out + as_scalar(c) * s
    return out
