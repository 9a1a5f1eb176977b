"""The centrally extended current algebra gl(N)[t, 1/t] and its enveloping algebra.

Letters are plain tuples:

* ``("E", row, col, tdeg)`` -- the loop generator E_{row,col} t^tdeg;
* ``("c",)`` -- the central letter.

Other modules add their own letter tags (Yangian letters, mode letters).
Those letters are never reordered by :func:`pbw_normal_form`; they act as
barriers between independently normalized segments, except that the central
letter is always collected at the front of a word.

An :class:`Element` is a finite map word -> :class:`~affyang.coeffring.Scalar`.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable, Iterator

from . import sexpr
from .coeffring import ONE, ZERO, Scalar, as_scalar, from_text, to_text

CENTRAL = ("c",)


def E(row: int, col: int, tdeg: int = 0) -> tuple:
    return ("E", row, col, tdeg)


def is_loop(letter) -> bool:
    return letter[0] == "E"


class Element:
    """Finite linear combination of words with Scalar coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            items = terms.items() if hasattr(terms, "items") else terms
            for w, c in items:
                c = as_scalar(c)
                if c:
                    w = tuple(w)
                    v = clean.get(w)
                    v = c if v is None else v + c
                    if v:
                        clean[w] = v
                    else:
                        clean.pop(w)
        self._terms = clean

    @classmethod
    def _raw(cls, terms: dict) -> "Element":
        obj = cls.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def word(cls, *letters, coef=ONE) -> "Element":
        return cls({tuple(letters): coef})

    @classmethod
    def one(cls) -> "Element":
        return cls({(): ONE})

    def items(self):
        return self._terms.items()

    def words(self):
        return self._terms.keys()

    def coef(self, word) -> Scalar:
        return self._terms.get(tuple(word), ZERO)

    def __len__(self):
        return len(self._terms)

    def __iter__(self) -> Iterator:
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __add__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        out = dict(self._terms)
        _accumulate(out, other._terms.items())
        return Element._raw(out)

    def __sub__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return Element._raw({w: -c for w, c in self._terms.items()})

    def scale(self, c) -> "Element":
        c = as_scalar(c)
        if not c:
            return Element()
        return Element._raw({w: v * c for w, v in self._terms.items() if v * c})

    def __mul__(self, other):
        if isinstance(other, Element):
            out: dict = {}
            for w1, c1 in self._terms.items():
                for w2, c2 in other._terms.items():
                    _accumulate(out, (((w1 + w2), c1 * c2),))
            return Element._raw(out)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def map_coefs(self, fn: Callable[[Scalar], Scalar]) -> "Element":
        return Element((w, fn(c)) for w, c in self._terms.items())

    def __repr__(self):
        return f"Element({to_sexpr(self)})"


def _accumulate(out: dict, items) -> None:
    for w, c in items:
        v = out.get(w)
        v = c if v is None else v + c
        if v:
            out[w] = v
        else:
            out.pop(w, None)


def commutator(a: Element, b: Element) -> Element:
    return a * b - b * a


def anticommutator(a: Element, b: Element) -> Element:
    return a * b + b * a


def _pbw_key(letter):
    if letter[0] == "c":
        return (0,)
    return (1, letter[3], letter[1], letter[2])


class CurrentAlgebra:
    """gl(N)[t, 1/t] with a central extension.

    The 2-cocycle is ``r * delta(r+s, 0) * (tr(xy) * level + tr(x) tr(y) * trace_level)``.
    ``level`` is an Element (the formal central letter by default) or a
    Scalar, ``trace_level`` a Scalar.  The W-algebra modes use
    ``level = 2*alpha`` and ``trace_level = 2``.
    """

    def __init__(self, N: int, level=None, trace_level=ZERO):
        if N < 1:
            raise ValueError("rank must be positive")
        self.N = N
        if level is None:
            level = Element.word(CENTRAL)
        elif not isinstance(level, Element):
            level = Element({(): as_scalar(level)})
        self.level = level
        self.trace_level = as_scalar(trace_level)
        self._seg_cache: dict = {}

    # -- brackets -------------------------------------------------------
    def check(self, letter) -> None:
        if letter[0] == "E":
            _, a, b, _r = letter
            if not (1 <= a <= self.N and 1 <= b <= self.N):
                raise ValueError(f"index out of range for gl({self.N}): {letter}")

    def bracket_loop(self, x, y) -> Element:
        """[x, y] for loop letters (and the central letter)."""
        if x[0] == "c" or y[0] == "c":
            return Element()
        self.check(x)
        self.check(y)
        _, a, b, r = x
        _, c, d, s = y
        out: dict = {}
        if b == c:
            _accumulate(out, (((("E", a, d, r + s),), ONE),))
        if d == a:
            _accumulate(out, (((("E", c, b, r + s),), -ONE),))
        if r + s == 0 and r != 0:
            if b == c and a == d:
                _accumulate(out, ((w, v * r) for w, v in self.level.items()))
            if a == b and c == d and self.trace_level:
                _accumulate(out, (((), self.trace_level * r),))
        return Element._raw(out)

    def bracket(self, x: Element, y: Element) -> Element:
        return self.normal_form(commutator(x, y))

    # -- normal ordering ----------------------------------------------
    def _normal_segment(self, word: tuple) -> dict:
        """Normal form of a word of loop letters: {(ncentral, word): coef}."""
        cached = self._seg_cache.get(word)
        if cached is not None:
            return cached
        keys = [_pbw_key(x) for x in word]
        i = next((k for k in range(len(word) - 1) if keys[k] > keys[k + 1]), None)
        if i is None:
            res = {(0, word): ONE}
        else:
            res: dict = {}
            a, b = word[i], word[i + 1]
            pre, post = word[:i], word[i + 2:]
            _accumulate(res, self._normal_segment(pre + (b, a) + post).items())
            for w, c in self.bracket_loop(a, b).items():
                nc = sum(1 for x in w if x[0] == "c")
                loops = tuple(x for x in w if x[0] != "c")
                for (k, w2), c2 in self._normal_segment(pre + loops + post).items():
                    _accumulate(res, (((k + nc, w2), c * c2),))
        self._seg_cache[word] = res
        return res

    def normal_word(self, word: tuple) -> dict:
        ncent = 0
        segments: list[list] = [[]]
        barriers: list = []
        for x in word:
            if x[0] == "c":
                ncent += 1
            elif x[0] == "E":
                segments[-1].append(x)
            else:
                barriers.append(x)
                segments.append([])
        acc = {(ncent, ()): ONE}
        for k, seg in enumerate(segments):
            nf = self._normal_segment(tuple(seg))
            nxt: dict = {}
            tail = (barriers[k],) if k < len(barriers) else ()
            for (n1, w1), c1 in acc.items():
                for (n2, w2), c2 in nf.items():
                    _accumulate(nxt, (((n1 + n2, w1 + w2 + tail), c1 * c2),))
            acc = nxt
        out: dict = {}
        for (n, w), c in acc.items():
            _accumulate(out, (((CENTRAL,) * n + w, c),))
        return out

    def normal_form(self, e: Element) -> Element:
        out: dict = {}
        for w, c in e.items():
            _accumulate(out, ((w2, c * c2) for w2, c2 in self.normal_word(w).items()))
        return Element._raw(out)


def pbw_normal_form(e: Element, alg: CurrentAlgebra) -> Element:
    return alg.normal_form(e)


def bracket_loop(x, y, alg: CurrentAlgebra) -> Element:
    return alg.bracket_loop(x, y)


# -- grading and truncation ------------------------------------------------

LETTER_GRADE: dict[str, Callable[[tuple], int]] = {
    "E": lambda x: x[3],
    "c": lambda x: 0,
}


def grade(word: Iterable) -> int:
    return sum(LETTER_GRADE[x[0]](x) for x in word)


def element_grades(e: Element) -> set[int]:
    return {grade(w) for w in e.words()}


def truncate(e: Element, S: int) -> Element:
    """Drop every word containing a loop letter with |tdeg| > S."""
    if S < 0:
        raise ValueError("window must be non-negative")
    return Element._raw(
        {w: c for w, c in e.items() if all(x[0] != "E" or abs(x[3]) <= S for x in w)}
    )


def max_tdeg(word) -> int:
    return max((abs(x[3]) for x in word if x[0] == "E"), default=0)


# -- s-expressions ----------------------------------------------------------

LETTER_WRITERS: dict[str, Callable[[tuple], list]] = {
    "E": lambda x: ["E", str(x[1]), str(x[2]), str(x[3])],
    "c": lambda x: ["c"],
}
LETTER_READERS: dict[str, Callable[[list], tuple]] = {
    "E": lambda s: ("E", int(s[1]), int(s[2]), int(s[3])),
    "c": lambda s: ("c",),
}


def _word_sx(w) -> list:
    return ["word"] + [LETTER_WRITERS[x[0]](x) for x in w]


def word_key(w):
    return tuple(repr(x) for x in w)


def to_sexpr(e: Element) -> str:
    body = [
        ["coef", sexpr.Quoted(to_text(c)), _word_sx(w)]
        for w, c in sorted(e.items(), key=lambda wc: word_key(wc[0]))
    ]
    return sexpr.dump(["lin"] + body)


def from_sexpr(text: str) -> Element:
    tree = sexpr.parse(text)
    if not tree or tree[0] != "lin":
        raise ValueError("expected (lin ...)")
    out: dict = {}
    for item in tree[1:]:
        if item[0] != "coef" or item[2][0] != "word":
            raise ValueError(f"malformed term {item!r}")
        w = tuple(LETTER_READERS[x[0]](x) for x in item[2][1:])
        _accumulate(out, ((w, from_text(item[1])),))
    return Element._raw(out)
