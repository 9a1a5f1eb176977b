import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affyang import sumcalc as sc
from affyang.coeffring import ONE, Scalar, h
from affyang.currentalg import CurrentAlgebra, E, Element, truncate as trunc_el

from concl_terms import TERMS, equation, term

half = Scalar.const(Fraction(1, 2))


def single(first, second, m, coef=ONE):
    return sc.SingleSum(coef, first, second, m).element()


def word(*letters, coef=ONE):
    return sc.CompletionElement(Element.word(*letters, coef=coef))


# -- reindexing ----------------------------------------------------------------

def test_reindex_boundary_word():
    n = 3
    raw = sc.raw_single((n, n + 1), (n + 1, 1), -1, 2)
    got = sc.reindex_canonical(raw)
    assert sc.single_sums(got) == [sc.SingleSum(ONE, (n, n + 1), (n + 1, 1), 1)]
    assert got.finite == -Element.word(E(n, n + 1, 0), E(n + 1, 1, 1))


def test_reindex_parallel_sum_gives_the_paper_word():
    # -h(sum x_{-s-1} y_{s+2} + sum x_{-s} y_{s+1}) = -2h sum x_{-s} y_{s+1} + h x_0 y_1
    n = 3
    raw = sc.raw_single((n, n + 1), (n + 1, 1), -1, 2, -h) + sc.raw_single((n, n + 1), (n + 1, 1), 0, 1, -h)
    got = sc.reindex_canonical(raw)
    assert sc.single_sums(got) == [sc.SingleSum(-2 * h, (n, n + 1), (n + 1, 1), 1)]
    assert got.finite == Element.word(E(n, n + 1, 0), E(n + 1, 1, 1), coef=h)


def test_canonical_sum_is_fixed():
    raw = sc.raw_single((1, 2), (3, 4), 0, 0)
    assert sc.reindex_canonical(raw).sums == raw.sums
    assert sc.reindex_canonical(raw).finite.is_zero()


def test_reindex_rejects_non_affine():
    with pytest.raises(ValueError):
        sc.LatticeSum(1, ((1, 2, (-1, Fraction(1, 2))), (2, 1, (1, 0))))


@settings(max_examples=60, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 3), st.integers(1, 3),
       st.integers(1, 3), st.integers(1, 3))
def test_reindex_preserves_every_window(p, q, a, b, c, d):
    raw = sc.raw_single((a, b), (c, d), p, q, h)
    canon = sc.reindex_canonical(raw)
    for S in range(0, 9):
        assert sc.truncate(canon, S) == sc.truncate(raw, S)
    assert sc.equal(canon, raw, CurrentAlgebra(3))


# -- A_i and P_i --------------------------------------------------------------

def test_A_small_rank():
    got = sc.build_A(1, 2)
    want = single((2, 1), (1, 2), 0, h * half) + sc.raw_single((1, 2), (2, 1), -1, 1, -h * half)
    assert sc.equal(got, want, CurrentAlgebra(2))
    assert sc.equal(got, sc.reindex_canonical(want), CurrentAlgebra(2))


def test_A_last_index_has_only_lower_families():
    N = 4
    got = sc.build_A(N, N)
    want = sc.CompletionElement()
    for u in range(1, N):
        want = want + sc.raw_single((N, u), (u, N), 0, 0, -h * half)
        want = want + sc.raw_single((u, N), (N, u), -1, 1, h * half)
    assert sc.equal(got, want, CurrentAlgebra(N))
    for ls in got.sums:
        (r1, c1), (r2, c2) = ls.units()
        assert N in (r1, c1)


@pytest.mark.parametrize("i", [1, 2, 3, 4])
def test_A_and_P_are_grade_zero(i):
    for ls, _ in sc.build_A(i, 4).terms():
        assert ls.grade() == 0
    if i < 4:
        for ls, _ in sc.build_P(i, 4).terms():
            assert ls.grade() == 0


def test_index_errors():
    with pytest.raises(ValueError):
        sc.build_A(0, 3)
    with pytest.raises(ValueError):
        sc.build_P(3, 3)


def test_P_canonical_form():
    N = 4
    for i in range(1, N):
        P = sc.build_P(i, N)
        assert sc.single_sums(P) == [sc.SingleSum(h, (i, N), (N, i), 0)]
        assert P.finite == -Element.word(E(i, N, 0), E(N, i, 0), coef=h)
        raw = sc.raw_single((i, N), (N, i), -1, 1, h)
        for S in range(7):
            assert sc.truncate(P, S) == sc.truncate(raw, S)


def test_P_commutes_with_itself():
    alg = CurrentAlgebra(4)
    P = sc.build_P(2, 4)
    assert sc.is_zero(sc.commutator_sum_sum(P, P, alg), alg)


# -- brackets with words ---------------------------------------------------------

def test_bracket_with_word_shifts_the_sum():
    n = 3
    alg = CurrentAlgebra(n + 1)
    a = sc.raw_single((n, n + 1), (n + 1, n), -1, 1, h)
    got = sc.commutator_sum_word(a, (E(n, 1, 1),), alg)
    want = single((n, n + 1), (n + 1, 1), 1, h) - word(E(n, n + 1, 0), E(n + 1, 1, 1), coef=h)
    assert sc.single_sums(got) == sc.single_sums(want)
    assert got.finite == want.finite


def test_bracket_with_word_vanishes():
    n = 3
    alg = CurrentAlgebra(n + 1)
    a = single((n, n + 1), (n + 1, 1), 1, h)
    assert sc.commutator_sum_word(a, (E(n, 1, 1),), alg).is_zero_syntactically()


def test_bracket_with_negative_word():
    n = 3
    alg = CurrentAlgebra(n + 1)
    a = sc.raw_single((1, n + 1), (n + 1, 1), -1, 1, h)
    got = sc.commutator_sum_word(a, (E(1, n, -1),), alg)
    want = sc.raw_single((1, n + 1), (n + 1, n), -1, 0, h)
    assert sc.equal(got, want, alg)


@settings(max_examples=40, deadline=None)
@given(st.integers(-2, 2), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3),
       st.integers(1, 3), st.lists(st.tuples(st.integers(1, 3), st.integers(1, 3), st.integers(-2, 2)),
                                   min_size=1, max_size=2))
def test_bracket_with_word_agrees_with_truncation(m, a, b, c, d, letters):
    alg = CurrentAlgebra(3)
    s = single((a, b), (c, d), m, h)
    w = tuple(E(*x) for x in letters)
    exact = sc.commutator_sum_word(s, w, alg)
    for S in range(2, 9):
        lhs = trunc_el(alg.normal_form(sc.truncate(exact, S)), S)
        big = sc.truncate(s, S + 2 * len(w))
        brute = alg.bracket(big, Element.word(*w))
        assert lhs == trunc_el(brute, S)


# -- brackets of sums ------------------------------------------------------------

PAIRS = [(1, 2), (2, 1), (1, 3), (3, 2)]


@pytest.mark.parametrize("i,j", PAIRS)
def test_PP_double_sums(i, j):
    N = 4
    alg = CurrentAlgebra(N)
    got = sc.commutator_sum_sum(sc.build_P(i, N), sc.build_P(j, N), alg)
    assert sc.equal(got, equation("551-0", i, j, N), alg)


def _family(fam, i, N):
    out = sc.CompletionElement()
    for u in range(1, N + 1):
        if fam == 1 and u > i:
            out = out + sc.raw_single((u, i), (i, u), 0, 0, h * half)
        if fam == 2 and u < i:
            out = out + sc.raw_single((i, u), (u, i), 0, 0, -h * half)
        if fam == 3 and u < i:
            out = out + sc.raw_single((u, i), (i, u), -1, 1, h * half)
        if fam == 4 and u > i:
            out = out + sc.raw_single((i, u), (u, i), -1, 1, -h * half)
    return out


def test_families_sum_to_A():
    alg = CurrentAlgebra(4)
    for i in range(1, 5):
        total = sum((_family(f, i, 4) for f in (1, 2, 3, 4)), sc.CompletionElement())
        assert sc.equal(total, sc.build_A(i, 4), alg)


@pytest.mark.parametrize("i,j", PAIRS)
@pytest.mark.parametrize("fam", [1, 2, 3, 4])
def test_four_pieces(i, j, fam):
    N = 4
    alg = CurrentAlgebra(N)
    got = sc.commutator_sum_sum(_family(fam, i, N), sc.build_P(j, N), alg)
    eq = f"551-{fam}"
    assert sc.equal(got, equation(eq, i, j, N, corrected=True), alg)
    if fam == 4:
        # the printed second term drops a boundary single sum
        assert not sc.equal(got, equation(eq, i, j, N), alg)


@pytest.mark.parametrize("i,j", PAIRS)
def test_grouped_identities(i, j):
    N = 4
    alg = CurrentAlgebra(N)

    def T(eq, r, a, b):
        return term(eq, r, a, b, N, corrected=True)

    lhs5 = (T("551-1", 1, i, j) + T("551-1", 6, i, j) - T("551-2", 2, j, i) - T("551-2", 3, j, i)
            - T("551-3", 1, j, i) - T("551-3", 4, j, i) + T("551-4", 3, i, j) + T("551-4", 4, i, j))
    lhs7 = (-T("551-1", 1, j, i) - T("551-1", 6, j, i) + T("551-2", 2, i, j) + T("551-2", 3, i, j)
            + T("551-3", 1, i, j) + T("551-3", 4, i, j) - T("551-4", 3, j, i) - T("551-4", 4, j, i))
    assert sc.equal(lhs5, equation("551-5", i, j, N), alg)
    assert sc.equal(lhs7, equation("551-7", i, j, N, corrected=True), alg)
    assert not sc.equal(lhs7, equation("551-7", i, j, N), alg)

    claim1 = T("551-5", 2, i, j) + T("551-7", 4, i, j) + T("551-1", 2, i, j)
    claim2 = T("551-5", 3, i, j) + T("551-7", 1, i, j) - T("551-1", 5, j, i)
    final = [
        T("551-5", 1, i, j) + T("551-7", 3, i, j) + T("551-1", 5, i, j),
        T("551-5", 4, i, j) + T("551-7", 2, i, j) - T("551-1", 2, j, i),
        T("551-0", 1, i, j) - T("551-4", 2, j, i) + T("551-4", 5, i, j),
        T("551-0", 2, i, j) + T("551-4", 2, i, j) - T("551-4", 5, j, i),
    ]
    # the individual "= 0" claims fail, but they cancel against the first two final sums
    assert not sc.is_zero(claim1, alg)
    assert not sc.is_zero(claim2, alg)
    assert sc.is_zero(claim1 + final[0], alg)
    assert sc.is_zero(claim2 + final[1], alg)
    assert sc.is_zero(final[2], alg)
    assert sc.is_zero(final[3], alg)


def test_antisymmetry_of_sum_brackets():
    rng = random.Random(3)
    alg = CurrentAlgebra(3)
    for _ in range(15):
        a = single((rng.randint(1, 3), rng.randint(1, 3)), (rng.randint(1, 3), rng.randint(1, 3)), rng.randint(-1, 1), h)
        b = single((rng.randint(1, 3), rng.randint(1, 3)), (rng.randint(1, 3), rng.randint(1, 3)), rng.randint(-1, 1), h)
        total = sc.commutator_sum_sum(a, b, alg) + sc.commutator_sum_sum(b, a, alg)
        assert sc.is_zero(total, alg)


def test_zero_test_detects_a_wrong_identity():
    alg = CurrentAlgebra(4)
    P1, P2 = sc.build_P(1, 4), sc.build_P(2, 4)
    wrong = sc.commutator_sum_sum(P1, P2, alg) - equation("551-0", 2, 1, 4)
    assert not sc.is_zero(wrong, alg)


# -- the final identity ----------------------------------------------------------

def test_concl_zero():
    r = sc.verify_concl(1, 2, 4)
    assert r.status == "pass" and r.details["exact"] == "zero"


def test_concl_diagonal():
    r = sc.verify_concl(2, 2, 4, windows=(4,), mode="both")
    assert r.status == "pass"


def test_concl_truncation_is_pure_boundary():
    S = 6
    res = sc.concl_truncated(1, 2, 4, S)
    assert sc.boundary_only(res, S)
    r = sc.verify_concl(1, 2, 4, windows=(S,), mode="truncate")
    assert r.status == "pass" and r.window == S


def test_report_json():
    r = sc.verify_concl(1, 3, 4, windows=(4,), mode="both")
    data = r.to_json()
    assert set(data) >= {"id", "status", "residual", "window"}
    assert data["id"] == "concl:N=4:i=1:j=3"


# -- text forms --------------------------------------------------------------------

def test_sexpr_forms_round_trip():
    alg = CurrentAlgebra(4)
    e = sc.build_A(2, 4) + equation("551-0", 1, 2, 4) + sc.commutator_sum_word(
        sc.build_P(1, 4), (E(1, 1, 2),), alg)
    text = sc.to_sexpr(e)
    assert "(sum1 " in text and "(sum2 " in text
    back = sc.from_sexpr(text)
    assert sc.to_sexpr(back) == text
    assert sc.equal(back, e, alg)


def test_sum1_text():
    text = sc.to_sexpr(single((1, 2), (2, 1), 3, h))
    assert text == '(completion (lin) (sum1 "1 * h^1" (E 1 2) (E 2 1) 3))'
