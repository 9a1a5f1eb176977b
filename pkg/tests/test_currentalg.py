import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affyang.coeffring import ONE, Scalar, h
from affyang.currentalg import (
    CENTRAL,
    CurrentAlgebra,
    E,
    Element,
    bracket_loop,
    commutator,
    element_grades,
    from_sexpr,
    grade,
    pbw_normal_form,
    to_sexpr,
    truncate,
)

C = Element.word(CENTRAL)


def w(*letters, coef=ONE):
    return Element.word(*letters, coef=coef)


def test_bracket_degrees_cancel():
    alg = CurrentAlgebra(3)
    assert bracket_loop(E(1, 2, 1), E(2, 3, -1), alg) == w(E(1, 3, 0))


def test_bracket_with_central_term():
    alg = CurrentAlgebra(3)
    assert bracket_loop(E(1, 2, 1), E(2, 1, -1), alg) == w(E(1, 1, 0)) - w(E(2, 2, 0)) + C


def test_bracket_vanishing_from_the_paper():
    n = 3
    alg = CurrentAlgebra(n + 1)
    for s in range(4):
        assert bracket_loop(E(n, n + 1, -s), E(n, 1, 1), alg).is_zero()


def test_central_sign_and_trace_level():
    alg = CurrentAlgebra(2, level=Scalar.const(5), trace_level=Scalar.const(2))
    # [E11 t^2, E11 t^-2] = 2 * (level + trace_level)
    assert bracket_loop(E(1, 1, 2), E(1, 1, -2), alg) == Element({(): Scalar.const(14)})
    assert bracket_loop(E(1, 1, 2), E(2, 2, -2), alg) == Element({(): Scalar.const(4)})


def test_index_out_of_range():
    alg = CurrentAlgebra(2)
    with pytest.raises(ValueError):
        bracket_loop(E(1, 3, 0), E(1, 1, 0), alg)


def test_single_reorder():
    alg = CurrentAlgebra(2)
    got = pbw_normal_form(w(E(2, 1), E(1, 2)), alg)
    assert got == w(E(1, 2), E(2, 1)) - w(E(1, 1)) + w(E(2, 2))


def test_sorted_word_is_fixed():
    alg = CurrentAlgebra(3)
    word = w(CENTRAL, E(3, 1, -2), E(1, 2, 0), E(2, 3, 0), E(1, 1, 4))
    assert pbw_normal_form(word, alg) == word


def test_central_letter_moves_to_the_front():
    alg = CurrentAlgebra(2)
    assert pbw_normal_form(w(E(1, 2, 1), CENTRAL), alg) == w(CENTRAL, E(1, 2, 1))


def test_grades():
    n = 3
    assert grade((E(n, 1, 1),)) == 1
    assert grade((E(1, n, -1),)) == -1
    assert grade((E(1, 1, 0),)) == 0
    assert grade((CENTRAL, E(1, 2, 3), E(2, 1, -1))) == 2


def test_truncate_examples():
    assert truncate(w(E(1, 2, 5)), 4).is_zero()
    x = w(E(1, 2, 3), E(2, 1, -3))
    assert truncate(x, 4) == x
    with pytest.raises(ValueError):
        truncate(x, -1)


def _letters(N, T):
    return [E(a, b, r) for a in range(1, N + 1) for b in range(1, N + 1) for r in range(-T, T + 1)]


@pytest.mark.parametrize("N", [2, 3])
def test_antisymmetry_and_jacobi_exhaustive(N):
    # exhaustive over |tdeg| <= 1 for the triple sums; see the sampled test for larger ranges
    alg = CurrentAlgebra(N)
    letters = _letters(N, 1)

    def br(x, y):
        out = Element()
        for wx, cx in x.items():
            for wy, cy in y.items():
                if wx == () or wy == () or wx[0][0] == "c" or wy[0][0] == "c":
                    continue
                out = out + bracket_loop(wx[0], wy[0], alg).scale(cx * cy)
        return out

    for x, y in itertools.product(letters, repeat=2):
        assert bracket_loop(x, y, alg) == -bracket_loop(y, x, alg)
    for x, y, z in itertools.product(letters, repeat=3):
        X, Y, Z = w(x), w(y), w(z)
        jac = br(X, br(Y, Z)) + br(Y, br(Z, X)) + br(Z, br(X, Y))
        assert jac.is_zero()


def test_jacobi_sampled_wide_range():
    rng = random.Random(7)
    for N in (4, 5):
        alg = CurrentAlgebra(N)
        letters = _letters(N, 3)
        for _ in range(400):
            x, y, z = (rng.choice(letters) for _ in range(3))
            jac = Element()
            for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
                for wd, cf in bracket_loop(b, c, alg).items():
                    if len(wd) == 1 and wd[0][0] == "E":
                        jac = jac + bracket_loop(a, wd[0], alg).scale(cf)
            assert jac.is_zero()


letter_st = st.builds(E, st.integers(1, 3), st.integers(1, 3), st.integers(-3, 3))
word_st = st.lists(letter_st, min_size=0, max_size=4).map(tuple)


@settings(max_examples=200, deadline=None)
@given(letter_st, letter_st)
def test_commutator_normal_form_matches_bracket(u, v):
    alg = CurrentAlgebra(3)
    lhs = pbw_normal_form(commutator(w(u), w(v)) - bracket_loop(u, v, alg), alg)
    assert lhs.is_zero()


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(word_st, st.integers(-3, 3)), max_size=4))
def test_normal_form_idempotent_linear_graded(items):
    alg = CurrentAlgebra(3)
    e = Element({wd: Scalar.const(c) for wd, c in items})
    nf = pbw_normal_form(e, alg)
    assert pbw_normal_form(nf, alg) == nf
    double = pbw_normal_form(e + e, alg)
    assert double == nf + nf
    for wd, c in e.items():
        single = pbw_normal_form(Element.word(*wd), alg)
        assert element_grades(single) <= {grade(wd)}


@settings(max_examples=100, deadline=None)
@given(word_st, st.integers(0, 4))
def test_truncation_commutes_with_reordering(word, S):
    alg = CurrentAlgebra(3)
    k = max(len(word) - 1, 0)
    e = Element.word(*word)
    lhs = truncate(pbw_normal_form(e, alg), S)
    rhs = truncate(pbw_normal_form(truncate(e, S + 3 * k), alg), S)
    assert lhs == rhs


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(word_st, st.integers(-3, 3)), max_size=4))
def test_sexpr_round_trip(items):
    e = Element({(CENTRAL,) + wd: Scalar.const(c) * h for wd, c in items})
    assert from_sexpr(to_sexpr(e)) == e


def test_sexpr_shape():
    text = to_sexpr(w(CENTRAL, E(1, 2, -1), coef=h))
    assert text == '(lin (coef "1 * h^1" (word (c) (E 1 2 -1))))'
