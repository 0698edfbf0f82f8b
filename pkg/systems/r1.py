from argparse import ArgumentParser, Namespace
from fractions import Fraction

import numpy as np

from core.display import COLORS
from core.gram import ip
from core.pwl import eval_dilated
from core.utils import check_positive_int
from systems.base import CONSTANT, BasisSystem, Element, as_number

R1_FAMILIES = ("C", "S", "full")


class R1System(BasisSystem):
    """{1} together with the dilations C_j and S_j, j = 1..N, on (0, 1)."""

    def add_args(self, parser: ArgumentParser) -> None:
        parser.add_argument("--family", choices=R1_FAMILIES, default="full",
                            help="C_j only, S_j only, or the full system {1} + C + S (default: full)")

    def validate(self, args: Namespace) -> None:
        check_positive_int("N", args.N)
        if args.family not in R1_FAMILIES:
            raise ValueError(f"Unknown R1 family {args.family!r}. Available: {list(R1_FAMILIES)}")

    def elements(self, args: Namespace) -> list[Element]:
        families = ("C", "S") if args.family == "full" else (args.family,)
        elements = [CONSTANT] if args.family == "full" else []
        for family in families:
            elements += [Element(family, (j,)) for j in range(1, args.N + 1)]
        return elements

    def inner_product(self, a: Element, b: Element, exact: bool) -> Fraction | float:
        if a.is_constant or b.is_constant:
            # C and S have mean zero
            return as_number(Fraction(int(a.is_constant and b.is_constant)), exact)
        return as_number(ip(a.family, a.index[0], b.family, b.index[0]), exact)

    def evaluate(self, element: Element, x: np.ndarray) -> np.ndarray:
        if element.is_constant:
            return np.ones_like(x, dtype=float)
        return eval_dilated(element.family, element.index[0], x)

    def table_rows(self, args: Namespace) -> list[list[str]]:
        C = COLORS
        return [
            ["--N", f"{C['B']}Dilations{C['RE']}", f"{C['B']}{args.N}{C['RE']}"],
            ["--family", f"{C['B']}Family{C['RE']}", f"{C['B']}{args.family}{C['RE']}"],
        ]
