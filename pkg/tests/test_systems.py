from argparse import ArgumentParser
from fractions import Fraction

import numpy as np
import pytest

from core.config import system_params
from core.quadrature import gl_rule, mc_inner_product, tensor_rule
from systems.base import CONSTANT, Element
from systems.hat import HatSystem, TensorHatSystem
from systems.r1 import R1System
from systems.rn import RnSystem

# every kink of C_k, S_k and hat_k for k <= 4
GRID_48 = [i / 48 for i in range(1, 48)]


def test_element_labels():
    assert str(CONSTANT) == "1"
    assert str(Element("C", (3,))) == "C_3"
    assert str(Element("hat", (1, 2))) == "hat_(1,2)"


@pytest.mark.parametrize("system", [R1System(), HatSystem()])
def test_univariate_inner_products_match_quadrature(system):
    params = system_params(N=4)
    nodes, weights = gl_rule(GRID_48)
    elements = system.elements(params)
    for a in elements:
        for b in elements:
            numeric = weights @ (system.evaluate(a, nodes) * system.evaluate(b, nodes))
            assert float(system.inner_product(a, b, exact=True)) == pytest.approx(numeric, abs=1e-14)


def test_r1_families():
    assert [str(e) for e in R1System().elements(system_params(N=2, family="S"))] == ["S_1", "S_2"]
    with pytest.raises(ValueError):
        R1System().validate(system_params(family="T"))


def test_tensor_hat_inner_products_match_quadrature():
    system = TensorHatSystem()
    params = system_params(n=2, N=3)
    hints = [i / 12 for i in range(1, 12)]
    points, weights = tensor_rule(2, 1, [hints, hints])
    elements = system.elements(params)
    assert [e.index for e in elements[:4]] == [(1, 1), (1, 2), (2, 2), (2, 1)]
    for a in elements:
        for b in elements:
            numeric = weights @ (system.evaluate(a, points) * system.evaluate(b, points))
            assert float(system.inner_product(a, b, exact=True)) == pytest.approx(numeric, abs=1e-14)
    with pytest.raises(ValueError):
        system.inner_product(Element("hat", (1,)), Element("hat", (1, 1)), exact=True)


def test_rn_inner_products_match_monte_carlo():
    system = RnSystem()
    elements = system.elements(system_params(n=2, bound=1))
    assert elements[0] == CONSTANT
    assert len(elements) == 1 + 2 * 4
    for a, b in [(elements[1], elements[1]), (elements[1], elements[2]), (elements[0], elements[5])]:
        result = mc_inner_product(
            lambda x, a=a: system.evaluate(a, x), lambda x, b=b: system.evaluate(b, x), 2, 200_000, seed=9
        )
        exact = system.inner_product(a, b, exact=True)
        assert isinstance(exact, Fraction)
        assert abs(result.value - float(exact)) <= 5 * result.error + 1e-12


def test_table_rows_name_the_size_flags():
    params = system_params(N=5, n=3, bound=4)
    assert [row[0] for row in R1System().table_rows(params)] == ["--N", "--family"]
    assert [row[0] for row in RnSystem().table_rows(params)] == ["--n", "--bound"]
    assert [row[0] for row in TensorHatSystem().table_rows(params)] == ["--n", "--N"]


@pytest.mark.parametrize("system", [HatSystem(), TensorHatSystem()])
def test_hat_systems_add_no_flags(system):
    parser = ArgumentParser()
    system.add_args(parser)
    assert vars(parser.parse_args([])) == {}
