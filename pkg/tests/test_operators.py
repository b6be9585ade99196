from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from hyperlab import operators as ops
from hyperlab.errors import ConfigurationError, DomainError
from hyperlab.scalars import FLOAT, HALF, ONE, Dyadic, SubspaceSpec, section

W = ops.build_example_W()
U = ops.build_aperiodic_shift()
I = ops.build_identity()


def test_weight_table():
    assert W.apply(1) == (3, HALF)
    assert W.apply(2) == (1, ONE)
    assert W.apply(4) == (2, Dyadic(2))


def test_alpha_values():
    assert [U.rule.forward(j) for j in (1, 3, 5)] == [2, 1, 3]


def test_enumerations_are_inverse():
    for z in range(-50, 51):
        assert ops.zigzag_index(ops.zigzag_enum(z)) == z
        assert ops.parity_index(ops.parity_enum(z)) == z
    assert sorted(ops.zigzag_enum(z) for z in range(-50, 51)) == list(range(1, 102))


def test_power_step_values():
    step = ops.apply_power(W, 4, 2)
    assert (step.index, step.weight) == (7, Dyadic(1, -3))
    step = ops.apply_power(U, -1, 1)
    assert (step.index, step.weight) == (3, ONE)
    assert ops.apply_power(W, 0, 5) == ops.OrbitStep(5, ONE)


def test_non_invertible_negative_power():
    Z = ops.build_operator(ops.bilateral_rule("zigzag"), ops.WeightPattern(2, {0: Dyadic(0), 1: ONE}))
    assert not Z.is_invertible()
    with pytest.raises(DomainError):
        Z.power_step(-1, 1)
    with pytest.raises(DomainError):
        ops.inverse(Z)


def test_inverse_and_adjoint():
    Wi = ops.inverse(W)
    assert Wi.apply(1) == (2, ONE)
    assert Wi.apply(3) == (1, Dyadic(2))
    Ua, Ui = ops.adjoint(U), ops.inverse(U)
    for j in range(1, 101):
        assert Ua.apply(j) == Ui.apply(j)


def test_compression_norms():
    assert ops.norm_power_proj(W, 4, section(2)) == Dyadic(1, -3)
    assert ops.norm_power_proj(W, -3, section(3)) == ONE
    assert ops.proj_norm_power(section(2), ops.adjoint(W), 4) == Dyadic(1, -3)
    for n in (-3, 0, 5):
        assert ops.norm_power_proj(I, n, section(4)) == ONE
        assert ops.proj_norm_power(section(4), I, n) == ONE


def test_left_compression_l3_square():
    # W^2 e_6 = 4 e_2 is the largest column landing in L_3
    assert ops.proj_norm_power(section(3), W, 2) == Dyadic(4)
    assert ops.proj_norm_power(section(3), W, 2) == oracles.norm_proj_w_power([1, 2, 3], 2)


def test_bounds():
    assert ops.min_modulus(W) == HALF
    assert ops.sup_norm(W) == Dyadic(2)
    assert ops.min_modulus(U) == ONE == ops.sup_norm(U)
    assert ops.power_min_modulus(W, 2) >= ops.min_modulus(W) * ops.min_modulus(W)
    assert ops.power_min_modulus(W, 2) == Dyadic(1, -2)
    Wi = ops.inverse(W)
    assert ops.sup_norm(W) == ops.min_modulus(Wi).inv2()


def test_bounds_need_pattern_or_horizon():
    A = ops.WeightedPermutationOperator(ops.identity_rule(), lambda j: ONE, mode="exact")
    with pytest.raises(ConfigurationError):
        A.bounds


def test_float_mode():
    Wf = ops.build_example_W(FLOAT)
    assert Wf.power_step(4, 2).weight == 0.125
    assert ops.norm_power_proj(Wf, 4, section(2)) == 0.125


def test_index_guard():
    with pytest.raises(DomainError):
        W.power_step(1, 0)


def test_block_cycle_has_period():
    C = ops.build_block_cycle(3)
    for j in range(1, 30):
        assert C.power_step(3, j).index == j


@given(st.integers(-25, 25), st.integers(1, 60))
def test_orbit_matches_closed_form(n, j):
    step = W.power_step(n, j)
    assert (step.index, step.weight.to_fraction()) == oracles.w_power(n, j)
    assert U.power_step(n, j).index == oracles.alpha_power(n, j)


@given(st.integers(-25, 25), st.integers(1, 60))
def test_power_inverse_law(n, j):
    there = W.power_step(n, j)
    back = W.power_step(-n, there.index)
    assert back.index == j
    assert there.weight * back.weight == ONE


@given(st.integers(-20, 20), st.sets(st.integers(1, 12), min_size=1, max_size=6))
def test_right_compression_matches_oracle(n, s):
    got = ops.norm_power_proj(W, n, SubspaceSpec.of(s))
    assert got.to_fraction() == oracles.norm_w_power_on(n, s)


@given(st.integers(-12, 12), st.sets(st.integers(1, 8), min_size=1, max_size=4))
def test_left_compression_matches_oracle(n, s):
    got = ops.proj_norm_power(SubspaceSpec.of(s), W, n)
    assert got.to_fraction() == oracles.norm_proj_w_power(s, n)


@given(st.integers(-12, 12), st.sets(st.integers(1, 8), min_size=1, max_size=4))
def test_adjoint_left_is_transpose_of_right(n, s):
    s = SubspaceSpec.of(s)
    assert ops.proj_norm_power(s, ops.adjoint(W), n) == ops.norm_power_proj(W, n, s)


def test_rule_verify():
    assert ops.bilateral_rule("zigzag").verify(500)
    assert ops.bilateral_rule("parity").verify(500)
    assert ops.block_cycle_rule(4).verify(500)


def test_description_round_trip():
    desc = W.describe()
    W2 = ops.operator_from_description(desc)
    for j in range(1, 40):
        assert W2.apply(j) == W.apply(j)
    assert Fraction(1, 2) == W2.bounds[0].to_fraction()
