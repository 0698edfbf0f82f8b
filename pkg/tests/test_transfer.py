import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from core.indices import FreqIndex
from core.pwl import eval_dilated, eval_ridge, eval_tensor, eval_trig
from core.transfer import (
    GAMMA0,
    PI2,
    TAU1,
    CoeffSeq,
    OperatorSpec,
    abs_tau_sum,
    apply_T,
    delta,
    dirichlet_convolve,
    dirichlet_convolve_arrays,
    dirichlet_inverse,
    dirichlet_inverse_array,
    gamma,
    operator_norm_bound,
    ray_convolve,
    riesz_constants_via_neumann,
    schauder_criterion,
    tau,
    tau_array,
    tau_multi,
    tau_seq,
)
from core.utils import odd_tail_sum


def test_tau_values():
    assert tau(1) == pytest.approx(4.0 * math.sqrt(2.0) / PI2, abs=1e-15)
    assert tau(1) == pytest.approx(0.573159, abs=1e-6)
    assert tau(3) == pytest.approx(-0.0636844, abs=1e-7)
    assert tau(5) == pytest.approx(TAU1 / 25)
    assert tau(4) == 0.0
    assert tau_multi((1, 3)) == pytest.approx(tau(1) * tau(3))
    assert_allclose(tau_array(9)[1:], [tau(k) for k in range(1, 10)])


def test_gamma_values():
    assert gamma(0, "cos") == pytest.approx(GAMMA0)
    assert gamma(1, "sin") == pytest.approx(-GAMMA0 / 9)
    assert gamma(2, "sin") == pytest.approx(GAMMA0 / 25)
    with pytest.raises(ValueError):
        gamma(-1, "cos")
    with pytest.raises(ValueError):
        gamma(0, "tan")


def test_absolute_sums():
    terms = 10 ** 6
    slack = TAU1 * odd_tail_sum(2 * terms - 1) + 1e-9
    assert 0.0 <= 1.0 / math.sqrt(2.0) - abs_tau_sum(terms) <= slack
    rest = abs_tau_sum(terms - 1, start=2)
    assert 0.0 <= TAU1 * (PI2 / 8.0 - 1.0) - rest <= slack
    assert rest < TAU1


def test_inverse_of_tau():
    inverse = dirichlet_inverse_array(tau_array(30), 30)
    assert inverse[3] == pytest.approx(1.0 / (9.0 * TAU1))
    assert inverse[3] == pytest.approx(0.193857, abs=1e-6)
    identity = dirichlet_convolve_arrays(tau_array(30), inverse, 30)
    assert_allclose(identity[1:], np.eye(30)[0], atol=1e-14)


@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=40).filter(lambda a: abs(a[0]) > 0.1))
def test_inverse_property(values):
    N = len(values)
    a = np.concatenate([[0.0], values])
    identity = dirichlet_convolve_arrays(a, dirichlet_inverse_array(a, N), N)
    scale = max(1.0, float(np.max(np.abs(dirichlet_inverse_array(a, N)))))
    assert_allclose(identity[1:], np.eye(N)[0], atol=1e-9 * scale)


small_sequences = st.lists(st.integers(-9, 9), min_size=24, max_size=24).map(lambda v: np.array([0.0, *v]))


@given(small_sequences, small_sequences, small_sequences)
def test_dirichlet_convolution_is_commutative_and_associative(a, b, c):
    N = 24
    assert np.array_equal(dirichlet_convolve_arrays(a, b, N), dirichlet_convolve_arrays(b, a, N))
    left = dirichlet_convolve_arrays(dirichlet_convolve_arrays(a, b, N), c, N)
    right = dirichlet_convolve_arrays(a, dirichlet_convolve_arrays(b, c, N), N)
    assert np.array_equal(left, right)


def test_singular_sequence():
    with pytest.raises(ValueError, match="singular"):
        dirichlet_inverse(CoeffSeq(1, 8, {2: 1.0}), 8)


def test_coeff_seq_operations():
    seq = dirichlet_convolve(delta(2, 12), delta(3, 12), 12)
    assert seq.support() == [6]
    assert seq.tail_bound == 0.0
    assert tau_seq(9).tail_bound == pytest.approx(TAU1 * odd_tail_sum(9))
    assert CoeffSeq.from_dict(seq.to_dict()) == seq
    with pytest.raises(ValueError):
        CoeffSeq.from_dict({"dim": 1})


def test_ray_convolution_round_trip():
    coeffs = {FreqIndex((1, 2), canonical=True): 1.0, FreqIndex((3, 6), canonical=True): -0.5}
    forward = ray_convolve(coeffs, "sin", bound=12)
    back = ray_convolve(forward, "sin", inverse=True, bound=12)
    for k, v in coeffs.items():
        assert back[k] == pytest.approx(v, abs=1e-14)
    assert all(abs(v) < 1e-14 for k, v in back.items() if k not in coeffs)


def test_operator_spec_validation():
    with pytest.raises(ValueError):
        OperatorSpec("T_other")
    with pytest.raises(ValueError):
        OperatorSpec("T_hat_1d", 0)
    with pytest.raises(ValueError):
        OperatorSpec("T_hat_1d", 10, n=2)
    with pytest.raises(ValueError):
        apply_T(OperatorSpec("T_tensor", 4096, 2), lambda y: y[..., 0], np.zeros((1, 2)))


@pytest.mark.parametrize("j", range(1, 9))
def test_hat_transfer_reproduces_hats(j):
    spec = OperatorSpec("T_hat_1d", 10_000)
    x = np.linspace(0.0, 1.0, 501)
    result = apply_T(spec, lambda y: math.sqrt(2.0) * np.sin(j * np.pi * y), x, sup_norm=math.sqrt(2.0))
    gap = np.max(np.abs(result.value - eval_dilated("hat", j, x)))
    assert gap <= result.error_bound
    assert result.error_bound <= 3e-4


def test_tensor_transfer():
    spec = OperatorSpec("T_tensor", 64, 2)
    x = np.random.Generator(np.random.Philox(1)).random((64, 2))
    result = apply_T(spec, lambda y: eval_trig("e_m_tensor", (2, 1), y), x, sup_norm=2.0)
    assert np.max(np.abs(result.value - eval_tensor("hat", (2, 1), x))) <= result.error_bound


@pytest.mark.parametrize("k", [(1, 0), (1, -2), (2, 3), (0, 1, 1)])
def test_ridge_transfer_gives_sawtooth(k):
    spec = OperatorSpec("T_ridge", 10_000, len(k))
    x = np.random.Generator(np.random.Philox(2)).random((64, len(k)))
    v = np.array(k, dtype=float)
    cos = apply_T(spec, lambda y: np.cos(2.0 * np.pi * (y @ v)), x, sup_norm=1.0)
    sin = apply_T(spec, lambda y: np.sin(2.0 * np.pi * (y @ v)), x, sup_norm=1.0)
    assert np.max(np.abs(cos.value - eval_ridge("C", k, x))) <= cos.error_bound
    assert np.max(np.abs(sin.value - eval_ridge("S", k, x))) <= sin.error_bound


def test_norm_bounds_and_criterion():
    assert operator_norm_bound(OperatorSpec("T_hat_1d", 10)).norm == pytest.approx(1.0 / math.sqrt(2.0))
    assert operator_norm_bound(OperatorSpec("T_ridge", 10, 3)).norm == pytest.approx(1.0)
    ratios = [schauder_criterion(n).ratio for n in range(1, 6)]
    assert_allclose(ratios, [(PI2 / 8.0) ** n - 1.0 for n in range(1, 6)])
    assert_allclose(ratios, [0.2337, 0.5220, 0.8777, 1.3165, 1.858], atol=1e-3)
    assert [schauder_criterion(n).holds for n in range(1, 6)] == [True, True, True, False, False]


def test_riesz_constants():
    A, B = riesz_constants_via_neumann("hat_1d")
    assert A == pytest.approx(0.578720, abs=1e-6)
    assert B == pytest.approx(1.5)
    assert riesz_constants_via_neumann("ridge_n") == pytest.approx((A, B))
    with pytest.raises(ValueError):
        riesz_constants_via_neumann("tensor")
