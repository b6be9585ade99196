import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

import oracles
from hyperlab import finite_rank as fr
from hyperlab.errors import ConfigurationError
from hyperlab.finite_rank import FiniteRankOperator
from hyperlab.scalars import FLOAT, ONE, Dyadic, section

R1 = FiniteRankOperator.rank_one


def small_operators(max_index=8, mode="exact"):
    value = st.builds(Dyadic, st.integers(-64, 64), st.integers(-6, 6))
    if mode == FLOAT:
        value = st.floats(-10, 10, allow_nan=False)
    key = st.tuples(st.integers(1, max_index), st.integers(1, max_index))
    return st.dictionaries(key, value, max_size=12).map(lambda d: FiniteRankOperator(d, mode))


def test_projection():
    P2 = fr.projection_operator(section(2))
    assert dict(P2.entries) == {(1, 1): ONE, (2, 2): ONE}
    for m in (1, 3, 7):
        assert fr.operator_norm(fr.projection_operator(section(m))) == pytest.approx(1.0)
    assert fr.trace_norm(P2) == pytest.approx(2.0)
    assert fr.trace_norm(fr.projection_operator(section(3))) == pytest.approx(3.0)


def test_algebra_examples():
    P2, P5 = fr.projection_operator(section(2)), fr.projection_operator(section(5))
    assert fr.combine(P2, P2, 1, -1).is_zero()
    assert fr.compose(P2, P5) == P2
    assert fr.compose(R1(1, 2), R1(2, 3)) == R1(1, 3)


def test_norm_examples():
    c = Dyadic(-3, -2)
    assert fr.operator_norm(R1(1, 2, c)) == pytest.approx(0.75)
    assert fr.trace_norm(R1(1, 2, c)) == pytest.approx(0.75)
    ones = FiniteRankOperator({(1, 1): 1, (1, 2): 1, (2, 1): 1, (2, 2): 1})
    assert fr.operator_norm(ones) == pytest.approx(2.0)
    diag = FiniteRankOperator({(1, 1): 1, (2, 2): -2})
    assert fr.trace_norm(diag) == pytest.approx(3.0)
    assert fr.exact_trace_norm(diag) == Dyadic(3)
    assert fr.exact_operator_norm(ones) is None


def test_distance_examples():
    P1, P2 = fr.projection_operator(section(1)), fr.projection_operator(section(2))
    assert fr.distance(P2, P2) == 0
    assert fr.distance(P2, P1) == pytest.approx(1.0)
    assert fr.distance(P2, P1, "trace") == pytest.approx(1.0)


def test_mode_mismatch():
    with pytest.raises(ConfigurationError):
        fr.combine(R1(1, 1), R1(1, 1, 1.0, FLOAT), 1, 1)


def test_support_cap():
    with pytest.raises(ConfigurationError):
        FiniteRankOperator({(i, i): 1 for i in range(1, 20)}, support_cap=10)


def test_section_residual():
    F = FiniteRankOperator({(1, 1): 1, (5, 2): Dyadic(1, -1)})
    G, r = fr.section_residual(F, 3)
    assert G == R1(1, 1)
    assert r == pytest.approx(0.5)


def test_dense_round_trip():
    F = FiniteRankOperator({(1, 3): Dyadic(3, -1), (2, 2): -1})
    assert FiniteRankOperator.from_dense(F.to_dense(4, object)) == F
    with pytest.raises(ConfigurationError):
        F.to_dense(2)


@given(small_operators(), small_operators())
def test_linearity_and_composition_against_dense(F, G):
    d = lambda X: X.to_dense(8, object)  # noqa: E731
    assert FiniteRankOperator.from_dense(d(F) + d(G)) == F + G
    assert FiniteRankOperator.from_dense(d(F).dot(d(G))) == fr.compose(F, G)
    assert F.transpose().transpose() == F


@given(small_operators())
def test_exact_norms_agree_with_svd(F):
    e = fr.exact_operator_norm(F)
    if e is not None:
        assert float(e) == pytest.approx(fr.operator_norm(F), abs=1e-12)
        assert float(fr.exact_trace_norm(F)) == pytest.approx(fr.trace_norm(F), abs=1e-10)


@given(small_operators(mode=FLOAT))
def test_norms_match_full_dense_svd(F):
    a = oracles.dense_float(F.entries)
    sv = scipy.linalg.svdvals(a)
    assert fr.operator_norm(F) == pytest.approx(sv.max(initial=0.0), abs=1e-10)
    assert fr.trace_norm(F) == pytest.approx(sv.sum(), abs=1e-10)
    # second route: eigenvalues of A^T A
    ev = np.clip(np.linalg.eigvalsh(a.T @ a), 0, None)
    assert fr.operator_norm(F) == pytest.approx(np.sqrt(ev.max(initial=0.0)), abs=1e-6)
