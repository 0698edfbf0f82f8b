import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from core.config import system_params
from core.gram import (
    GramMatrix,
    block_partition,
    gram,
    ip,
    ip_CC,
    ip_CS,
    ip_SS,
    ridge_ip,
    riesz_bounds,
    sawtooth_gram,
    sign_diagonal,
    spectra_coincide,
)
from core.pwl import Dilation
from core.quadrature import integrate_pwl_product
from core.utils import v2
from systems.hat import HatSystem, TensorHatSystem
from systems.r1 import R1System
from systems.rn import RnSystem

dilations = st.integers(1, 128)


def test_spot_values():
    assert ip_CC(1, 1) == Fraction(1, 3)
    assert ip_CC(2, 3) == 0
    assert ip_CC(3, 9) == Fraction(1, 27)
    assert ip_CC(2, 6) == Fraction(1, 27)
    assert ip_SS(1, 3) == Fraction(-1, 27)
    assert ip_SS(1, 5) == Fraction(1, 75)
    assert ip_SS(3, 5) == Fraction(-1, 675)
    assert ip_CS(4, 7) == 0
    assert ip("C_saw", 1, "S_saw", 1) == 0


@settings(deadline=None, max_examples=60)
@given(st.integers(1, 64), st.integers(1, 64))
def test_against_exact_quadrature(j, k):
    for family, closed in (("C", ip_CC), ("S", ip_SS)):
        assert closed(j, k) == integrate_pwl_product(Dilation(family, j), Dilation(family, k))
    assert integrate_pwl_product(Dilation("C", j), Dilation("S", k)) == 0


@given(dilations, dilations, st.integers(1, 32))
def test_common_dilation_factor_cancels(j, k, scale):
    assert ip_CC(scale * j, scale * k) == ip_CC(j, k)
    assert ip_SS(scale * j, scale * k) == ip_SS(j, k)


@given(dilations, dilations)
def test_sign_rule(j, k):
    value = ip_SS(j, k)
    if v2(j) != v2(k):
        assert value == 0
    else:
        negative = ((j + k) // (2 * math.gcd(j, k))) % 2 == 0
        assert (value < 0) == negative
        assert abs(value) == ip_CC(j, k)


def test_rejects_non_sawtooth_and_zero():
    with pytest.raises(ValueError):
        ip("hat", 1, "C", 1)
    with pytest.raises(ValueError):
        ip_CC(0, 1)


def test_ridge_ip():
    assert ridge_ip("C", (1, 2), "C", (2, 4)) == ip_CC(1, 2)
    assert ridge_ip("S", (1, -1), "S", (3, -3)) == ip_SS(1, 3)
    assert ridge_ip("C", (1, 0), "C", (0, 1)) == 0
    assert ridge_ip("C", (1, 1), "S", (1, 1)) == 0
    with pytest.raises(ValueError):
        ridge_ip("C", (-1, 2), "C", (1, 2))
    with pytest.raises(ValueError):
        ridge_ip("C", (1, 2), "C", (1, 2, 3))


def test_odd_block_eigenvalues():
    matrix = sawtooth_gram("C", 3)
    assert matrix.entries[0, 2] == Fraction(1, 9)
    assert matrix.entries[0, 1] == 0
    assert_allclose(matrix.eigenvalues(), [8 / 9, 1.0, 10 / 9], atol=1e-14)


def test_block_partition_and_signs():
    partition = block_partition(8)
    assert partition.blocks == ((1, 3, 5, 7), (2, 6), (4,), (8,))
    assert sign_diagonal(7).tolist() == [1, 1, -1, 1, 1, -1, -1]


def test_blocks_follow_2_adic_classes():
    matrix = sawtooth_gram("C", 12, exact=False)
    sizes = sorted(len(b) for b in matrix.blocks())
    assert sizes == sorted(len(b) for b in block_partition(12).blocks)


@pytest.mark.parametrize("N", [16, 64, 128])
def test_spectra_coincide(N):
    report = spectra_coincide(N)
    assert report.identity_holds
    assert report.max_gap <= 1e-10
    assert report.coincide


def test_json_round_trip_keeps_rationals():
    matrix = gram(R1System(), system_params(N=6), exact=True)
    back = GramMatrix.from_json(matrix.to_json())
    assert back.labels == matrix.labels
    assert np.all(back.entries == matrix.entries)
    with pytest.raises(ValueError):
        GramMatrix.from_json('{"schema": "gram/1", "labels": ["a"]}')


def test_r1_gram_labels_and_constant_row():
    matrix = gram(R1System(), system_params(N=3), exact=True)
    assert matrix.labels == ("1", "C_1", "C_2", "C_3", "S_1", "S_2", "S_3")
    assert all(v == 0 for v in matrix.entries[0, 1:])
    assert matrix.entries[4, 6] == Fraction(-1, 9)


@settings(deadline=None, max_examples=10)
@given(st.integers(1, 64))
def test_r1_riesz_interval(N):
    bounds = riesz_bounds(R1System(), system_params(N=N))
    assert bounds.inside


def test_r1_riesz_interval_at_512():
    bounds = riesz_bounds(R1System(), system_params(N=512))
    assert bounds.inside
    assert bounds.lambda_min < 1.0 < bounds.lambda_max


@pytest.mark.parametrize("n, bound", [(2, 4), (3, 2)])
def test_rn_riesz_interval(n, bound):
    assert riesz_bounds(RnSystem(), system_params(n=n, bound=bound)).inside


def test_hat_system_is_exact():
    matrix = gram(HatSystem(), system_params(N=5), exact=True)
    assert all(matrix.entries[i, i] == 1 for i in range(5))
    assert riesz_bounds(HatSystem(), system_params(N=40)).inside


def test_tensor_hat_gram_is_a_kronecker_product():
    univariate = gram(HatSystem(), system_params(N=3), exact=False).to_float()
    tensor = gram(TensorHatSystem(), system_params(n=2, N=3), exact=False)
    order = [tuple(int(e) for e in label[len("hat_("):-1].split(",")) for label in tensor.labels]
    for a, ma in enumerate(order):
        for b, mb in enumerate(order):
            expected = univariate[ma[0] - 1, mb[0] - 1] * univariate[ma[1] - 1, mb[1] - 1]
            assert tensor.entries[a, b] == pytest.approx(expected, abs=1e-15)


def test_invalid_system_sizes():
    with pytest.raises(ValueError):
        gram(R1System(), system_params(N=0))
    with pytest.raises(ValueError):
        gram(RnSystem(), system_params(bound=0))
