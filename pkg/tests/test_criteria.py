import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from hyperlab import criteria as cr
from hyperlab import operators as ops
from hyperlab.errors import ConfigurationError
from hyperlab.scalars import Dyadic, section

W = ops.build_example_W()
WS = ops.adjoint(W)
U = ops.build_aperiodic_shift()
I = ops.build_identity()
TWO_U = ops.build_operator(ops.bilateral_rule("zigzag"), Dyadic(2), name="2U")
HALF_U = ops.build_operator(ops.bilateral_rule("zigzag"), Dyadic(1, -1), name="U/2")
SCHED = [k + 3 for k in range(1, 31)]


def test_orthogonality():
    assert cr.orthogonality_horizon(U, 1, 64) == 1
    assert cr.orthogonality_horizon(U, 2, 64) == oracles.brute_orthogonality_horizon(2, 64)
    assert cr.orthogonality_horizon(I, 3, 64) is None
    assert cr.check_orthogonality(I, [1, 2], 64).verdict == cr.INCONCLUSIVE
    with pytest.raises(ConfigurationError):
        cr.orthogonality_horizon(U, 2, 0)


def test_hypercyclicity():
    r = cr.check_hypercyclicity_condition(W, 2, SCHED)
    assert r.verdict == cr.PASS
    assert [v.to_fraction() for v in r.quantity("||W^n P_m||")] == [Fraction(1, 2 ** (n - 1)) for n in SCHED]
    assert cr.check_hypercyclicity_condition(U, 2, SCHED).verdict == cr.FAIL
    assert cr.check_hypercyclicity_condition(TWO_U, 2, SCHED).verdict == cr.FAIL


def test_schedule_must_increase():
    with pytest.raises(ConfigurationError):
        cr.check_hypercyclicity_condition(W, 2, [4, 4, 5])
    with pytest.raises(ConfigurationError):
        cr.check_zero_transitivity(W, 3, SCHED, [5] * 10)


def test_zero_transitivity():
    assert cr.check_zero_transitivity(W, 2, SCHED, SCHED).verdict == cr.PASS
    assert cr.check_zero_transitivity(I, 2, SCHED, SCHED).verdict == cr.FAIL


def test_necessary_condition():
    assert cr.check_necessary_m_condition(W).verdict == cr.PASS
    assert cr.check_necessary_m_condition(U).verdict == cr.FAIL
    assert cr.check_necessary_m_condition(HALF_U).verdict == cr.FAIL
    with pytest.raises(ConfigurationError):
        cr.check_necessary_m_condition(W, "nope")


def test_periodic_min_modulus_reports_both():
    r = cr.check_periodic_min_modulus(W, list(range(1, 31)))
    assert r.verdict == cr.PASS
    assert r.quantity("m(W^-n)")[4] == Dyadic(1, -5)
    assert r.quantity("m(W^-1)^n")[4] == Dyadic(1, -5)
    assert cr.check_periodic_min_modulus(U, list(range(1, 31))).verdict == cr.FAIL


def test_series_sums():
    r = cr.check_series_condition(W, 2, SCHED)
    assert r.verdict == cr.PASS
    totals = r.quantity("sum ||W^ln P_m||")
    tails = r.quantity("sum ||W^ln P_m|| tail")
    for n, total, tail in zip(SCHED, totals, tails):
        exact = float(Fraction(2, 2 ** n) / (1 - Fraction(1, 2 ** n)))
        # partial sum plus certified tail: an upper bound within one tail of the true sum
        assert exact - 1e-15 <= total <= exact + tail + 1e-15
        assert total <= 2 ** (2 - n) / (1 - 2.0 ** -n)
    assert cr.check_series_condition(W, 3, SCHED).verdict == cr.PASS
    assert cr.check_series_condition(U, 2, SCHED).verdict != cr.PASS


def test_series_partial_sums_brute_force():
    policy = cr.TailPolicy()
    for n in (4, 7):
        s = cr.certified_series(lambda l: ops.norm_power_proj(W, -l * n, section(3)), policy)
        brute = sum(oracles.norm_w_power_on(-l * n, [1, 2, 3]) for l in range(1, 200))
        assert float(brute) - 1e-15 <= s.total <= float(brute) + s.tail_bound + 1e-15


def test_tail_policy_rejects_bad_ratio():
    for r in (1.0, 1.5, 0.0):
        with pytest.raises(ConfigurationError):
            cr.TailPolicy(ratio=r)


def test_parity_split():
    s = cr.find_cosine_split(W, 4, SCHED)
    assert s.verdict == cr.PASS
    for e in s.entries:
        assert e.E.indices == (1, 3) and e.R.indices == (2, 4)
    for n, a, b in zip(SCHED, s.quantity("||W^2n P_E||"), s.quantity("||W^-2n P_R||")):
        assert a == b == Dyadic(1, -2 * n)
    assert cr.check_cosine_split(W, 4, SCHED).verdict == cr.PASS


def test_split_degenerate_cases():
    assert cr.find_cosine_split(U, 4, SCHED).verdict == cr.INCONCLUSIVE
    s = cr.find_cosine_split(TWO_U, 3, SCHED)
    assert all(not e.E.indices for e in s.entries)
    assert cr.check_cosine_split(TWO_U, 3, SCHED).verdict == cr.FAIL


def test_adjoint_conditions():
    assert cr.check_adjoint_conditions(WS, 2, SCHED, "power").verdict == cr.PASS
    r = cr.check_adjoint_conditions(WS, 4, SCHED, "cosine")
    assert r.verdict == cr.PASS
    assert r.witness["split"]["entries"][0]["E"] == [1, 3]
    assert cr.check_adjoint_conditions(I, 2, SCHED, "cosine").verdict == cr.FAIL
    # W itself is left-expanding on L_2: ||P_2 W^n|| = 2^{n-1}
    assert cr.check_adjoint_conditions(W, 2, SCHED, "power").verdict == cr.FAIL
    with pytest.raises(ConfigurationError):
        cr.check_adjoint_conditions(W, 2, SCHED, "other")


def test_report_serialisation():
    r = cr.check_hypercyclicity_condition(W, 2, SCHED[:5])
    d = json.loads(r.to_json())
    assert d["criterion"] == "hypercyclicity" and d["verdict"] == "fail"
    assert d["decay"][0]["value"]["dyadic"] == "1*2^-3"
    assert r.to_csv().splitlines()[0] == "k,quantity,value,value_dyadic"
    assert "verdict: FAIL" in r.to_table()


@given(st.integers(1, 8), st.integers(1, 12), st.integers(1, 10))
def test_series_pass_implies_hypercyclicity_pass(m, start, length):
    sched = list(range(start, start + length + 20))
    if cr.check_series_condition(W, m, sched).verdict == cr.PASS:
        assert cr.check_hypercyclicity_condition(W, m, sched).verdict == cr.PASS


@given(st.integers(1, 6), st.integers(1, 4))
def test_example_grid(k, m):
    assert ops.norm_power_proj(W, 2 * k - 1 + m, section(2 * k)) == Dyadic(1, -m)
    assert ops.norm_power_proj(W, -(2 * k + m), section(2 * k + 1)) == Dyadic(1, -(m - 1))


patterns = st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2)).map(
    lambda e: ops.WeightedPermutationOperator(
        ops.bilateral_rule("parity"),
        ops.WeightPattern(2, {1: Dyadic(1, e[0]), 0: Dyadic(1, e[1])}, {2: Dyadic(1, e[2])})))


@settings(max_examples=20)
@given(patterns, st.integers(1, 5), st.integers(1, 6))
def test_series_pass_implies_hypercyclicity_pass_random_weights(A, m, start):
    sched = list(range(start, start + 22))
    if cr.check_series_condition(A, m, sched).verdict == cr.PASS:
        assert cr.check_hypercyclicity_condition(A, m, sched).verdict == cr.PASS


def test_non_geometric_series_never_certified():
    s = cr.certified_series(lambda l: Dyadic(1) if l % 2 else Dyadic(1, -1), cr.TailPolicy())
    assert not s.certified
    s = cr.certified_series(lambda l: 1.0 / (l * l), cr.TailPolicy())
    assert not s.certified
