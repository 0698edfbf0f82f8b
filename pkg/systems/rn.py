from argparse import ArgumentParser, Namespace
from fractions import Fraction

import numpy as np

from core.display import COLORS
from core.gram import ridge_ip
from core.indices import ridge_indices
from core.pwl import eval_ridge
from core.utils import check_positive_int
from systems.base import CONSTANT, BasisSystem, Element, as_number


class RnSystem(BasisSystem):
    """{1} together with C(k . x) and S(k . x) for canonical k, ||k||_inf <= bound."""

    def add_args(self, parser: ArgumentParser) -> None:
        parser.add_argument("--bound", type=int, default=2,
                            help="Largest ||k||_inf of the ridge frequencies (default: 2)")

    def validate(self, args: Namespace) -> None:
        check_positive_int("n", args.n)
        check_positive_int("bound", args.bound)

    def elements(self, args: Namespace) -> list[Element]:
        indices = ridge_indices(args.n, args.bound)
        return [CONSTANT] + [Element(family, k.entries) for family in ("C", "S") for k in indices]

    def inner_product(self, a: Element, b: Element, exact: bool) -> Fraction | float:
        if a.is_constant or b.is_constant:
            return as_number(Fraction(int(a.is_constant and b.is_constant)), exact)
        return as_number(ridge_ip(a.family, a.index, b.family, b.index), exact)

    def evaluate(self, element: Element, x: np.ndarray) -> np.ndarray:
        if element.is_constant:
            return np.ones(x.shape[:-1])
        return eval_ridge(element.family, element.index, x)

    def table_rows(self, args: Namespace) -> list[list[str]]:
        C = COLORS
        return [
            ["--n", f"{C['B']}Dimension{C['RE']}", f"{C['B']}{args.n}{C['RE']}"],
            ["--bound", f"{C['B']}||k||_inf bound{C['RE']}", f"{C['B']}{args.bound}{C['RE']}"],
        ]
