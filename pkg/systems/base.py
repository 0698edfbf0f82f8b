from abc import ABC, abstractmethod
from argparse import ArgumentParser, Namespace
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class Element:
    """One basis element: the constant ("1"), a dilation or a ridge/tensor function."""

    family: str
    index: tuple[int, ...] = ()

    @property
    def is_constant(self) -> bool:
        return self.family == "1"

    def __str__(self) -> str:
        if self.is_constant:
            return "1"
        if len(self.index) == 1:
            return f"{self.family}_{self.index[0]}"
        return f"{self.family}_({','.join(map(str, self.index))})"


CONSTANT = Element("1")


class BasisSystem(ABC):

    @abstractmethod
    def add_args(self, parser: ArgumentParser) -> None:
        """Add the size flags of this system to a subparser."""

    @abstractmethod
    def validate(self, args: Namespace) -> None:
        """Check the size flags. Raises ValueError when they are invalid."""

    @abstractmethod
    def elements(self, args: Namespace) -> list[Element]:
        """The truncated system, in Gram-matrix order."""

    @abstractmethod
    def inner_product(self, a: Element, b: Element, exact: bool) -> Fraction | float:
        """<a, b> on the unit cube, as a Fraction when ``exact``."""

    @abstractmethod
    def evaluate(self, element: Element, x: np.ndarray) -> np.ndarray:
        """Element values at a batch of points."""

    @abstractmethod
    def table_rows(self, args: Namespace) -> list[list[str]]:
        """System-specific rows for the parameter summary table."""


def as_number(value: Fraction, exact: bool) -> Fraction | float:
    return value if exact else float(value)
