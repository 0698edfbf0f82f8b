import math
from argparse import ArgumentParser, Namespace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from core.display import COLORS
from core.indices import square_order
from core.pwl import Dilation, eval_dilated, eval_tensor
from core.quadrature import integrate_pwl_product
from core.utils import check_positive_int
from systems.base import BasisSystem, Element, as_number


@lru_cache(maxsize=None)
def hat_ip(j: int, k: int) -> Fraction:
    """<S_j, S_k> on (0, 1), by exact quadrature (no closed form is used)."""
    return integrate_pwl_product(Dilation("hat", j), Dilation("hat", k))


class HatSystem(BasisSystem):
    """The dilated hats S_j(t) = S(j t), j = 1..N."""

    def add_args(self, parser: ArgumentParser) -> None:
        """The hat system has no flags beyond --N."""

    def validate(self, args: Namespace) -> None:
        check_positive_int("N", args.N)

    def elements(self, args: Namespace) -> list[Element]:
        return [Element("hat", (j,)) for j in range(1, args.N + 1)]

    def inner_product(self, a: Element, b: Element, exact: bool) -> Fraction | float:
        if exact:
            return hat_ip(a.index[0], b.index[0])
        return integrate_pwl_product(Dilation("hat", a.index[0]), Dilation("hat", b.index[0]), exact=False)

    def evaluate(self, element: Element, x: np.ndarray) -> np.ndarray:
        return eval_dilated("hat", element.index[0], x)

    def table_rows(self, args: Namespace) -> list[list[str]]:
        C = COLORS
        return [["--N", f"{C['B']}Dilations{C['RE']}", f"{C['B']}{args.N}{C['RE']}"]]


class TensorHatSystem(BasisSystem):
    """Tensor hats S_m(x) = S_{m_1}(x_1) ... S_{m_n}(x_n), m in {1..N}^n, in square order."""

    def add_args(self, parser: ArgumentParser) -> None:
        """The tensor hat system has no flags beyond --n and --N."""

    def validate(self, args: Namespace) -> None:
        check_positive_int("n", args.n)
        check_positive_int("N", args.N)

    def elements(self, args: Namespace) -> list[Element]:
        return [Element("hat", m.entries) for m in square_order(args.n, args.N)]

    def inner_product(self, a: Element, b: Element, exact: bool) -> Fraction | float:
        if len(a.index) != len(b.index):
            raise ValueError(f"{a} and {b} live in different dimensions")
        value = math.prod((hat_ip(j, k) for j, k in zip(a.index, b.index)), start=Fraction(1))
        return as_number(value, exact)

    def evaluate(self, element: Element, x: np.ndarray) -> np.ndarray:
        return eval_tensor("hat", element.index, x)

    def table_rows(self, args: Namespace) -> list[list[str]]:
        C = COLORS
        return [
            ["--n", f"{C['B']}Dimension{C['RE']}", f"{C['B']}{args.n}{C['RE']}"],
            ["--N", f"{C['B']}Side{C['RE']}", f"{C['B']}{args.N}{C['RE']}"],
        ]
