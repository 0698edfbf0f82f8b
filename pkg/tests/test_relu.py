import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from core.pwl import Dilation, eval_dilated, eval_ridge
from core.relu import (
    MAX_UNIVARIATE_K,
    ReluNet,
    compile_ridge,
    compile_tensor,
    compile_univariate,
    export_json,
    import_json,
    linear_regions,
    net_eval,
)


def test_sawtooth_value_is_exact():
    net = compile_univariate("C", 1)
    assert net_eval(net, Fraction(3, 10)) == Fraction(-1, 5)
    assert net_eval(net, 0.3) == pytest.approx(-0.2, abs=1e-15)
    assert net.label == "C_1"


@settings(max_examples=200)
@given(
    st.sampled_from(["C", "S", "hat"]),
    st.integers(1, 40),
    st.fractions(min_value=0, max_value=1, max_denominator=997),
)
def test_nets_agree_exactly_at_rational_points(family, k, t):
    net = compile_univariate(family, k)
    assert net_eval(net, t) == Dilation(family, k)(t)


@pytest.mark.parametrize("family", ["C", "S", "hat"])
@pytest.mark.parametrize("k", [1, 2, 7, 64])
def test_nets_agree_on_a_sample(family, k):
    net = compile_univariate(family, k)
    t = np.random.Generator(np.random.Philox(k)).random(5000)
    assert_allclose(net_eval(net, t), eval_dilated(family, k, t), atol=1e-12)


@pytest.mark.parametrize("k", [1, 3, 8])
def test_linear_regions(k):
    assert linear_regions(compile_univariate("C", k)) == 2 * k
    assert linear_regions(compile_univariate("S", k)) == 2 * k + 1
    assert linear_regions(compile_univariate("hat", k)) == k + 1


def test_integer_parameters():
    net = compile_univariate("S", 5)
    for arr in (net.weights, net.biases, net.c, np.array([net.c0])):
        assert np.all(arr == np.round(arr))


@pytest.mark.parametrize("family, k", [("C", (1, 0)), ("S", (1, -2)), ("S", (2, 1, 3)), ("C", (0, 3, -1))])
def test_ridge_nets(family, k):
    net = compile_ridge(family, k)
    x = np.random.Generator(np.random.Philox(7)).random((2000, len(k)))
    assert_allclose(net_eval(net, x), eval_ridge(family, k, x), atol=1e-12)
    with pytest.raises(ValueError):
        linear_regions(net)


def test_guards():
    with pytest.raises(ValueError):
        compile_univariate("C", MAX_UNIVARIATE_K + 1)
    with pytest.raises(ValueError):
        compile_univariate("C", 0)
    with pytest.raises(ValueError):
        compile_ridge("hat", (1, 2))
    with pytest.raises(ValueError):
        net_eval(compile_ridge("C", (1, 2)), np.zeros((3, 3)))


def test_tensor_hats_have_no_shallow_net():
    with pytest.raises(ValueError, match="multiplication"):
        compile_tensor((2, 3))
    single = compile_tensor((4,))
    assert linear_regions(single) == 5


def test_json_round_trip():
    net = compile_ridge("S", (1, -2))
    back = import_json(export_json(net))
    assert back.label == net.label
    assert np.array_equal(back.weights, net.weights)
    assert np.array_equal(back.biases, net.biases)
    assert np.array_equal(back.c, net.c)
    assert back.c0 == net.c0


def test_tampered_json_is_rejected():
    data = json.loads(export_json(compile_univariate("hat", 3)))
    data["output"]["c0_hex"] = (1.5).hex()
    with pytest.raises(ValueError, match="disagree"):
        import_json(json.dumps(data))
    data = json.loads(export_json(compile_univariate("hat", 3)))
    data["hidden"][0]["b_hex"] = "inf"
    data["hidden"][0]["b"] = "inf"
    with pytest.raises(ValueError, match="non-finite"):
        import_json(json.dumps(data))
    with pytest.raises(ValueError):
        import_json('{"schema": "relu-net/0"}')
    with pytest.raises(ValueError):
        import_json("not json")


def test_non_finite_parameters():
    with pytest.raises(ValueError):
        ReluNet(1, np.array([[np.inf]]), np.array([0.0]), np.array([1.0]), 0.0)
    with pytest.raises(ValueError):
        ReluNet(1, np.array([[1.0]]), np.array([0.0, 1.0]), np.array([1.0]), 0.0)


def test_large_dilation_keeps_the_exactness_bound():
    net = compile_univariate("S", 32)
    t = np.random.Generator(np.random.Philox(32)).random(100_000)
    assert np.max(np.abs(net_eval(net, t) - eval_dilated("S", 32, t))) <= 1e-12
