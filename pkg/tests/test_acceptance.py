"""Acceptance criteria, one test per criterion.

Each test prints a single ``ACCEPTANCE <name>: PASS|FAIL (...)`` line
(visible even when pytest captures output) and then asserts.
All checks are exact; the truncation windows are the stated ones.
"""

import random
from fractions import Fraction
from math import comb, factorial

from affyang import sumcalc as sc
from affyang.coeffring import ONE, alpha
from affyang.currentalg import CurrentAlgebra
from affyang.modealg import verify_diagram
from affyang.voa import (
    SUSPECTED_MISPRINTS,
    VState,
    check_n_independence,
    mono_weight,
    nth_product,
    translate,
    verify_tho1,
)
from affyang.yangian import (
    generators,
    level0_images_ok,
    mixed_grades,
    psi_image,
    reduce_detailed,
    verify_all,
)
from concl_terms import equation, term
from section3_terms import equations, printed


def is_zero(x, N):
    return reduce_detailed(x, N).status == "zero"


def announce(capsys, name, ok, detail=""):
    with capsys.disabled():
        print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


# -- Psi relation suite ------------------------------------------------------------------

def test_psi_relation_suite(capsys):
    problems = []
    counts = {}
    for n in (3, 4):
        reports = verify_all(n)
        counts[n] = len(reports)
        for r in reports:
            level11 = r.relation == "Eq2.1" and tuple(r.indices[2:]) == (1, 1)
            if level11:
                good = (r.ok and r.status.startswith("verified-with-assumption")
                        and len(r.assumptions) == 1 and "Lemma 2.4" in r.assumptions[0]
                        and r.details.get("concl") == "zero")
            else:
                good = r.status == "verified" and not r.assumptions
            if not good:
                problems.append((n, r.relation, r.indices, r.sign, r.status))
    announce(capsys, "psi-relations n=3,4", not problems,
             f"instances {counts}, failures {problems[:5]}")


# -- (concl) double check ---------------------------------------------------------------------

def test_concl_double_check(capsys):
    bad = []
    for N in (4, 5, 6):
        for i in range(1, N):
            for j in range(1, N):
                rep = sc.verify_concl(i, j, N, windows=(4, 6, 8), mode="both")
                exact_zero = rep.details.get("exact") == "zero"
                windows_ok = all(rep.details.get(f"window {S}", "").endswith("boundary words") for S in (4, 6, 8))
                if not (rep.status == "pass" and exact_zero and windows_ok):
                    bad.append(rep.id)
    announce(capsys, "concl N=4,5,6 windows 4,6,8", not bad, f"failures {bad}")


# -- golden ledger of the compatibility proofs ------------------------------------------------------

def _golden_551(N, pairs):
    alg = CurrentAlgebra(N)
    half = ONE * Fraction(1, 2)
    from affyang.coeffring import h

    def family(fam, i):
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

    bad, anomalies = [], []
    for i, j in pairs:
        PP = sc.commutator_sum_sum(sc.build_P(i, N), sc.build_P(j, N), alg)
        if not sc.equal(PP, equation("551-0", i, j, N), alg):
            bad.append(("551-0", i, j))
        for fam in (1, 2, 3, 4):
            got = sc.commutator_sum_sum(family(fam, i), sc.build_P(j, N), alg)
            if not sc.equal(got, equation(f"551-{fam}", i, j, N, corrected=True), alg):
                bad.append((f"551-{fam}", i, j))
            if not sc.equal(got, equation(f"551-{fam}", i, j, N), alg):
                anomalies.append((f"551-{fam}", i, j))

        def T(eq, r, a, b):
            return term(eq, r, a, b, N, corrected=True)

        lhs5 = (T("551-1", 1, i, j) + T("551-1", 6, i, j) - T("551-2", 2, j, i) - T("551-2", 3, j, i)
                - T("551-3", 1, j, i) - T("551-3", 4, j, i) + T("551-4", 3, i, j) + T("551-4", 4, i, j))
        lhs7 = (-T("551-1", 1, j, i) - T("551-1", 6, j, i) + T("551-2", 2, i, j) + T("551-2", 3, i, j)
                + T("551-3", 1, i, j) + T("551-3", 4, i, j) - T("551-4", 3, j, i) - T("551-4", 4, j, i))
        if not sc.equal(lhs5, equation("551-5", i, j, N), alg):
            bad.append(("551-5", i, j))
        if not sc.equal(lhs7, equation("551-7", i, j, N, corrected=True), alg):
            bad.append(("551-7", i, j))
        if not sc.equal(lhs7, equation("551-7", i, j, N), alg):
            anomalies.append(("551-7", i, j))
    return bad, anomalies


def test_golden_ledger(capsys):
    bad = [label for label, lhs, rhs in equations(3) if not is_zero(lhs - rhs, 4)]
    logged = []
    for label, (lhs, as_printed, corrected) in printed(3).items():
        if not is_zero(lhs - corrected, 4):
            bad.append(label + " (exact value)")
        if reduce_detailed(lhs - as_printed, 4).status == "zero":
            bad.append(label + " (printed form unexpectedly exact)")
        logged.append(label)
    bad551, anomalies = _golden_551(4, [(1, 2), (2, 1), (1, 3), (3, 2)])
    bad += bad551
    allowed = {"551-4", "551-7"}
    unexpected = sorted({a[0] for a in anomalies} - allowed)
    bad += [f"unregistered anomaly {u}" for u in unexpected]
    announce(capsys, "golden ledger of the compatibility proofs", not bad,
             f"{len(equations(3))} equations; printed anomalies logged: {logged + sorted({a[0] for a in anomalies})}; "
             f"failures {bad}")


# -- OPE table -----------------------------------------------------------------------------------

def test_ope_table(capsys):
    problems = []
    for n in (2, 3):
        rep = verify_tho1(n)
        if not rep.ok:
            problems.append(f"n={n} report not ok")
        for e in rep.entries:
            if e["item"] in ("(1)", "(2)") and e["status"] != "match":
                problems.append((n, e["item"], e["s"]))
            if e["item"] == "(3)" and e["status"] != "match" and e["label"] not in SUSPECTED_MISPRINTS:
                problems.append((n, e["item"], e["s"], e["label"]))
            if e["item"] == "basis" and e["status"] != "match":
                problems.append((n, "basis"))
    ind = check_n_independence((2, 3, 4))
    if not ind.ok:
        problems.append("n-independence")
    announce(capsys, "OPE table n=2,3 and n-independence 2,3,4", not problems, f"problems {problems}")


# -- vertex-algebra axioms ---------------------------------------------------------------------------

def _random_state(rng, max_len=2):
    st = VState.vacuum()
    for _ in range(rng.randint(0, max_len)):
        w, i, j, m = rng.choice((1, 2)), rng.randint(1, 2), rng.randint(1, 2), rng.randint(1, 2)
        st = nth_product(VState.letter(w, i, j, m), st, -1)
    return st.scale(rng.choice([ONE, ONE * 2, alpha, alpha - 1]))


def _weight(x):
    return max((mono_weight(m) for m, _ in x.items()), default=0)


def _gbinom(p, j):
    num = 1
    for t in range(j):
        num *= p - t
    return Fraction(num, factorial(j))


def test_vertex_algebra_axioms(capsys):
    rng = random.Random(20240601)
    counts = {"covariance": 0, "skew": 0, "borcherds": 0}
    bad = []
    for _ in range(500):
        u, v, s = _random_state(rng), _random_state(rng), rng.randint(-1, 3)
        if nth_product(translate(u), v, s) != nth_product(u, v, s - 1).scale(-s):
            bad.append(("covariance", s))
        counts["covariance"] += 1
    for _ in range(500):
        u, v, s = _random_state(rng), _random_state(rng), rng.randint(-1, 3)
        rhs = VState()
        for i in range(_weight(u) + _weight(v) + 2):
            rhs = rhs + translate(nth_product(v, u, s + i), i).scale(Fraction((-1) ** (s + i + 1), factorial(i)))
        if nth_product(u, v, s) != rhs:
            bad.append(("skew", s))
        counts["skew"] += 1
    for _ in range(500):
        u, v, w = _random_state(rng), _random_state(rng), _random_state(rng, 1)
        p, q, r = rng.randint(-1, 2), rng.randint(-1, 2), rng.randint(0, 2)
        lhs = VState()
        for j in range(_weight(u) + _weight(v) + 3):
            lhs = lhs + nth_product(nth_product(u, v, r + j), w, p + q - j).scale(_gbinom(p, j))
        rhs = VState()
        for j in range(r + 1):
            c = (-1) ** j * comb(r, j)
            rhs = rhs + nth_product(u, nth_product(v, w, q + j), p + r - j).scale(c)
            rhs = rhs - nth_product(v, nth_product(u, w, p + j), q + r - j).scale(c * (-1) ** r)
        if lhs != rhs:
            bad.append(("borcherds", p, q, r))
        counts["borcherds"] += 1
    announce(capsys, "vertex-algebra axioms", not bad, f"instances {counts}, failures {bad[:5]}")


# -- commutative diagram ---------------------------------------------------------------------

def test_commutative_diagram(capsys):
    bad = []
    sizes = {}
    for n in (3, 4):
        rep = verify_diagram(n, window=8, mode="both")
        sizes[n] = len(rep.entries)
        for e in rep.entries:
            if not (e["status"] == "verified" and e["exact"] and e["window_verdicts"] == [True, True]):
                bad.append((n, e["generator"]))
        if len(rep.entries) != 3 * n - 1:
            bad.append((n, "generating set size"))
    announce(capsys, "diagram n=3,4 (S=8 vs 10)", not bad, f"generators {sizes}, failures {bad}")


# -- loop-image sanity ---------------------------------------------------------------------

def test_loop_image_sanity(capsys):
    bad = []
    for n in (3, 4, 5):
        fails = level0_images_ok(n)
        if fails:
            bad.append((n, fails[:3]))
        for g in generators(n):
            expect = {1 if g.kind == "X+" else -1} if g.node == 0 and g.kind != "H" else {0}
            if mixed_grades(psi_image(g)) != expect:
                bad.append((n, str(g)))
    announce(capsys, "loop images and grading n=3..5", not bad, f"failures {bad}")
