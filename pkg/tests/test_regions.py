import csv
from fractions import Fraction as F

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from wienerwave.regions import (INF, ExponentTuple, ExtendedRational, case_exponents, corollary_admissible,
                                decay_exponents, duhamel_dual_indices, implied_sigma, is_wave_admissible, k_max,
                                kmax_curve, life_span, nlw_admissible, propfix_admissible, sample_propfix,
                                sample_region, thm1_admissible, thm2_admissible, write_region_csv)

ER = ExtendedRational


def T1(sigma, qt, q, r, rt, n=3):
    return ExponentTuple(n, q, qt, r, rt, sigma=sigma)


# (tuple, expected) pairs worked out by hand from the stated inequalities
THM1_CASES = [
    (T1("4/5", 3, 30, "9/2", "24/5"), True),
    (T1("4/5", 3, 30, "9/2", 5), False),          # r~ < 1/(1 - sigma) = 5 is strict
    (T1("4/5", 3, 30, "9/2", 4), False),          # r > r~
    (T1("4/5", 4, 30, "9/2", "24/5"), False),     # 1/4 + 5/12 <= 7/10
    (T1("4/5", 2, 30, "9/2", "24/5"), True),      # q~ = 2 endpoint allowed
    (T1("4/5", 3, 31, "9/2", "24/5"), False),     # scaling broken
    (T1("3/4", 3, 30, "9/2", "24/5"), False),     # sigma must exceed n/4
    (T1(1, 3, 30, "9/2", "24/5"), False),         # sigma must stay below (n-1)/2
    (T1("9/10", 2, 10, 6, 8), True),
    (T1("9/10", 2, 10, 6, 10), False),            # r~ < 10 strict
    (T1("9/10", 2, "inf", 5, 8), False),          # q = inf excluded, and r = 5 is on the edge
    (T1("4/5", 30, 30, "9/2", "24/5"), False),    # q~ < q strict
]


@pytest.mark.parametrize("tup,expected", THM1_CASES)
def test_thm1_cases(tup, expected):
    assert thm1_admissible(tup) is expected


PROPFIX_CASES = [
    ((3, "8/5", "9/2", "24/5"), True),
    ((3, "8/5", 4, "24/5"), False),      # 4 < 30/7
    ((3, "8/5", "9/2", 5), False),       # r~ < 4/(n - 2 gamma + 1) = 5
    ((3, "3/2", 6, 8), False),           # gamma = n/2 excluded
    ((3, "21/10", 8, 8), False),         # upper bound 2n/(n - gamma - 1) is negative
    ((3, "9/5", 6, 8), True),
    ((3, "9/5", 5, 8), False),           # r > 2n/(n - gamma) = 5 strict
    ((4, "7/3", 5, 11), True),           # branch point gamma = n/2 + 1/(n-1): both bounds are 12
    ((4, "7/3", 5, 12), False),
]


@pytest.mark.parametrize("args,expected", PROPFIX_CASES)
def test_propfix_cases(args, expected):
    assert propfix_admissible(*args) is expected


def test_decay_exponents():
    assert decay_exponents(3, "8/5", "9/2", "24/5") == (ER("-17/30"), ER("-1/15"))
    assert decay_exponents(3, "9/5", 6, 8) == (ER("-7/10"), ER("-1/5"))
    with pytest.raises(ValueError):
        decay_exponents(3, "8/5", 4, "24/5")


def test_case_exponents():
    c = case_exponents(3, "8/5", "9/2", "24/5")
    assert (c.alpha, c.lambda_, c.beta, c.kappa) == (ER("51/25"), ER("-2/5"), ER("-24/25"), ER("1/8"))


@pytest.mark.parametrize("sigma,expected", [(F(1, 2), 3), (0, 2), (1, 5), (F(1, 4), F(7, 3)), (F(5, 4), 9)])
def test_k_max(sigma, expected):
    assert k_max(3, sigma) == ER(F(expected))


def test_k_max_domain():
    with pytest.raises(ValueError):
        k_max(3, F(3, 2))
    with pytest.raises(ValueError):
        k_max(3, -1)


@pytest.mark.parametrize("n", range(3, 9))
def test_k_max_branch_continuity(n):
    half = F(1, 2)
    assert k_max(n, half) == ER(1 + F(4, n - 1)) == ER(1 + F(4) / (n - 2 * half))


@pytest.mark.parametrize("n", range(4, 9))
def test_propfix_branch_continuity(n):
    g = F(n, 2) + F(1, n - 1)
    assert F(4) / (n - 2 * g + 1) == F(2 * n) / (n - g - 1)


@pytest.mark.parametrize("args,expected", [
    ((3, 4, 4, "1/2"), True),
    ((3, "inf", 2, 0), True),
    ((3, 4, 4, 0), False),
    ((3, 2, "inf", "3/2"), False),
    ((3, 3, 6, "2/3"), True),
    ((3, 2, 6, 1), False),               # 2/q = 1 exceeds (n-1)(1/2 - 1/r) = 2/3
])
def test_wave_admissible(args, expected):
    assert is_wave_admissible(*args) is expected


def test_corollary_homogeneous():
    assert corollary_admissible(ExponentTuple(3, 7, 4, "7/2", "7/2"), "1/2")
    assert not corollary_admissible(ExponentTuple(3, 7, 4, 4, 4), "1/2")


def test_nlw_example():
    t = ExponentTuple(3, 8, 5, "10/3", "10/3")
    assert nlw_admissible(t, "5/2")
    assert not nlw_admissible(t, 3)
    assert not nlw_admissible(t, "61/21")
    assert implied_sigma(t) == ER("19/40")
    assert k_max(3, implied_sigma(t)) == ER("61/21")


def test_thm2_cases():
    base = T1("4/5", 3, 30, "9/2", "24/5")
    sym = base.with_duals(30, 3, "9/2", "24/5")
    assert thm2_admissible(sym, "8/5")
    both_inf = ExponentTuple(3, "inf", 3, "9/2", "24/5").with_duals("inf", 3, "9/2", "24/5")
    assert not thm2_admissible(both_inf, "8/5")
    assert not thm2_admissible(sym, 2)


def test_duhamel_dual_indices_and_corollary():
    d = duhamel_dual_indices(ExponentTuple(3, 8, 5, "10/3", "10/3"), "5/2")
    dual = d.tuple
    assert (dual.q1, dual.q1_tilde, dual.r1, dual.r1_tilde) == (ER("80/9"), ER(4), ER("80/23"), ER(4))
    assert (d.q0_tilde, d.q0, d.r2) == (ER(4), ER("40/23"), ER(4))
    assert corollary_admissible(dual)


def test_life_span():
    plan = life_span(1, 1, 3, 4)
    assert plan.M == 2 and plan.T == pytest.approx(1 / 4096, rel=1e-15)
    assert plan.satisfies_smallness()
    assert life_span(1, 0, 3, 4).T == 0.99
    with pytest.raises(ValueError):
        life_span(1, 1, 1, 4)


def test_life_span_scaling_exact():
    k, q0t = F(5, 2), 4
    a = life_span(3.0, 1.0, k, q0t)
    b = life_span(3.0, 4.0, k, q0t)
    assert a.T < 0.99
    assert b.T / a.T == pytest.approx(4.0 ** (-q0t * (k - 1)), rel=1e-12)


def test_extended_rational():
    assert ER("inf").inv == 0 and INF.infinite_flag
    assert ER(2).conjugate() == ER(2)
    assert ER(1).conjugate() == INF and INF.conjugate() == ER(1)
    assert ER("9/2").reciprocal() == ER("2/9")
    assert ER(3) < INF and not INF < ER(10**9)
    with pytest.raises(TypeError):
        ER(0.5)
    with pytest.raises(ValueError):
        INF + 1


def test_tuple_validation():
    with pytest.raises(ValueError):
        ExponentTuple(3, "1/2", 2, 2, 2)
    with pytest.raises(ValueError):
        ExponentTuple(3, 4, 4, 4, 4, q1=2)
    with pytest.raises(ValueError):
        ExponentTuple(3, 4, 4, 4, 4, sigma="inf")


def test_samplers(tmp_path):
    rows = sample_region(3, "4/5", 60)
    assert any(ok for *_, ok in rows)
    assert all(isinstance(a, F) for a, _, _ in rows)
    assert sample_propfix(3, "21/10") == []
    assert len(sample_propfix(3, "8/5", 60)) >= 1
    path = write_region_csv(tmp_path / "r.csv", rows)
    with path.open() as fh:
        got = list(csv.reader(fh))
    assert got[0] == ["inv_r", "inv_r_tilde", "admissible"]
    assert len(got) == len(rows) + 1
    assert F(got[1][0]) == rows[0][0]
    assert [row[0] for row in kmax_curve(3, [0, "1/2"])] == [ER(0), ER("1/2")]


fractions = st.fractions(min_value=F(1, 60), max_value=F(1, 2), max_denominator=60)


@given(st.integers(3, 7), fractions, st.fractions(min_value=0, max_value=F(1, 2), max_denominator=60))
def test_scaling_identity_exact(n, ir, iq):
    sigma = F(n, 2) - iq - n * ir
    t = ExponentTuple(n, ER(1 / iq) if iq else INF, 2, ER(1 / ir), ER(1 / ir), sigma=ER(sigma))
    s = implied_sigma(t).value
    assert 2 * iq == n - 2 * s - 2 * n * ir


@given(fractions, fractions, fractions, st.fractions(min_value=F(3, 4), max_value=1, max_denominator=40))
def test_thm1_forces_qt_below_q(iq, iqt, ir, s):
    t = ExponentTuple(3, ER(1 / iq), ER(1 / iqt), ER(1 / ir), ER(1 / ir), sigma=ER(s))
    if thm1_admissible(t):
        assert t.q_tilde < t.q


@given(st.fractions(min_value=F(31, 20), max_value=F(39, 20), max_denominator=40), fractions, fractions)
def test_decay_exponent_order(g, ir, irt):
    assume(irt <= ir)
    if propfix_admissible(3, g, ER(1 / ir), ER(1 / irt)):
        small, large = decay_exponents(3, g, ER(1 / ir), ER(1 / irt))
        assert large.value < 0
        assert small.value < large.value


@given(st.fractions(min_value=F(31, 20), max_value=F(39, 20), max_denominator=40),
       st.fractions(min_value=1, max_value=20, max_denominator=30), st.fractions(min_value=1, max_value=20, max_denominator=30))
def test_case_exponent_equivalences(g, r, rt):
    c = case_exponents(3, g, r, rt)
    assert (c.alpha.value > 0) == (rt * (3 - g - 1) < 6)
    assert (c.beta.value + 1 > 0) == (rt * (3 - 2 * g + 1) < 4)


@given(fractions, fractions, fractions, fractions, st.fractions(min_value=F(3, 4), max_value=1, max_denominator=40))
def test_integrability_under_thm1(iq, iqt, ir, irt, s):
    t = ExponentTuple(3, ER(1 / iq), ER(1 / iqt), ER(1 / ir), ER(1 / irt), sigma=ER(s))
    if thm1_admissible(t):
        small, _ = decay_exponents(3, 2 * s, t.r, t.r_tilde)
        assert t.q_tilde.value / 2 * small.value > -1


@given(st.one_of(st.just("inf"), st.fractions(min_value=-50, max_value=50).map(str)))
def test_rational_string_round_trip(text):
    x = ER(text)
    assert ER(str(x)) == x
