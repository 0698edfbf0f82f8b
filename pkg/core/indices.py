import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from core.utils import check_positive_int, gcd_all, odd_part


@dataclass(frozen=True)
class FreqIndex:
    """Integer frequency vector k in Z^n, k != 0.

    ``canonical`` records that the first non-zero entry is positive
    (the "k +> 0" orientation used by the ridge systems).
    """

    entries: tuple[int, ...]
    canonical: bool = False

    def __post_init__(self) -> None:
        entries = tuple(self.entries)
        if not entries:
            raise ValueError("frequency vector must have at least one entry")
        if any(isinstance(e, bool) or not isinstance(e, (int, np.integer)) for e in entries):
            raise ValueError(f"frequency entries must be integers, got {entries!r}")
        entries = tuple(int(e) for e in entries)
        if all(e == 0 for e in entries):
            raise ValueError("zero frequency vector is not a basis index")
        if self.canonical and _leading(entries) < 0:
            raise ValueError(f"{entries!r} is not canonical: first non-zero entry is negative")
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def sup_norm(self) -> int:
        return max(abs(e) for e in self.entries)

    @property
    def l1_norm(self) -> int:
        return sum(abs(e) for e in self.entries)

    def is_oriented(self) -> bool:
        return _leading(self.entries) > 0

    def dot(self, x):
        if isinstance(x, np.ndarray):
            if x.shape[-1] != self.n:
                raise ValueError(f"point dimension {x.shape[-1]} != frequency dimension {self.n}")
            return x @ np.array(self.entries, dtype=float)
        x = tuple(x)
        if len(x) != self.n:
            raise ValueError(f"point dimension {len(x)} != frequency dimension {self.n}")
        if any(isinstance(xi, float) for xi in x):
            return math.fsum(k * float(xi) for k, xi in zip(self.entries, x))
        return sum((k * Fraction(xi) for k, xi in zip(self.entries, x)), Fraction(0))

    def scaled(self, factor: int) -> "FreqIndex":
        return FreqIndex(tuple(factor * e for e in self.entries), self.canonical and factor > 0)

    def __neg__(self) -> "FreqIndex":
        return FreqIndex(tuple(-e for e in self.entries))

    def __str__(self) -> str:
        return ",".join(str(e) for e in self.entries)


@dataclass(frozen=True)
class MultiIndex:
    """Positive-integer vector m in N^n with the componentwise partial order."""

    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        entries = tuple(self.entries)
        if not entries:
            raise ValueError("multi-index must have at least one entry")
        for e in entries:
            check_positive_int("multi-index entry", int(e) if isinstance(e, np.integer) else e)
        object.__setattr__(self, "entries", tuple(int(e) for e in entries))

    @property
    def n(self) -> int:
        return len(self.entries)

    def __le__(self, other: "MultiIndex") -> bool:
        if self.n != other.n:
            raise ValueError("multi-indices of different dimension are not comparable")
        return all(a <= b for a, b in zip(self.entries, other.entries))

    def __str__(self) -> str:
        return ",".join(str(e) for e in self.entries)


def _leading(entries: Sequence[int]) -> int:
    return next(e for e in entries if e != 0)


def as_freq(k) -> FreqIndex:
    return k if isinstance(k, FreqIndex) else FreqIndex(tuple(k))


def as_multi(m) -> MultiIndex:
    return m if isinstance(m, MultiIndex) else MultiIndex(tuple(m))


def canonicalize(k) -> tuple[FreqIndex, int]:
    """Orient k so that its first non-zero entry is positive.

    Returns the canonical index and the sign picked up by sine-type ridge
    functions (-1 iff the input was flipped). Cosine-type functions ignore it.
    """
    k = as_freq(k)
    if k.is_oriented():
        return FreqIndex(k.entries, canonical=True), 1
    return FreqIndex(tuple(-e for e in k.entries), canonical=True), -1


def primitive_root(k: FreqIndex) -> tuple[FreqIndex, int]:
    """Split canonical k as a * p with p primitive; returns (p, a)."""
    a = gcd_all(k.entries)
    return FreqIndex(tuple(e // a for e in k.entries), canonical=True), a


def odd_root(k: FreqIndex) -> tuple[FreqIndex, int]:
    """Split canonical k as u * r with u the largest odd divisor of gcd(k).

    Frequencies (2m+1)k all share the root r, so they form one odd-multiplier ray.
    """
    u = odd_part(gcd_all(k.entries))
    return FreqIndex(tuple(e // u for e in k.entries), canonical=True), u


def parallel(k: Sequence[int], l: Sequence[int]) -> bool:
    """Exact parallelism test through 2x2 minors."""
    return all(k[i] * l[j] == k[j] * l[i] for i in range(len(k)) for j in range(i + 1, len(k)))


def ridge_indices(n: int, bound: int) -> list[FreqIndex]:
    """Canonical k with ||k||_inf <= bound, ordered by (||k||_inf, lexicographic)."""
    check_positive_int("n", n)
    check_positive_int("bound", bound)
    found = []
    for entries in itertools.product(range(-bound, bound + 1), repeat=n):
        if any(entries) and _leading(entries) > 0:
            found.append(FreqIndex(entries, canonical=True))
    found.sort(key=lambda k: (k.sup_norm, k.entries))
    return found


def square_order(n: int, N: int) -> list[MultiIndex]:
    """Enumerate {1..N}^n shell by shell so every prefix of length m^n is {1..m}^n.

    Inside shell m: first the indices whose last coordinate is m, with the
    remaining coordinates in lexicographic order; then the indices with
    max = m and last coordinate < m, in reverse lexicographic order.
    """
    check_positive_int("n", n)
    check_positive_int("N", N)
    order = []
    for m in range(1, N + 1):
        head = [
            MultiIndex(rest + (m,))
            for rest in itertools.product(range(1, m + 1), repeat=n - 1)
        ]
        tail = [
            MultiIndex(rest + (last,))
            for rest in itertools.product(range(1, m + 1), repeat=n - 1)
            if max(rest) == m
            for last in range(1, m)
        ]
        tail.sort(key=lambda idx: idx.entries, reverse=True)
        order.extend(head)
        order.extend(tail)
    return order


@dataclass(frozen=True)
class RectangleStage:
    min_side: int
    bounds: tuple[tuple[int, ...], ...]


def pringsheim_rectangles(
    n: int,
    schedule: Sequence[int],
    shapes: Sequence[Sequence[int]] = (),
) -> list[RectangleStage]:
    """Rectangles {k <= m} grouped into stages by their minimum side.

    Every stage holds the square bound (s, ..., s). An anisotropic shape is
    admitted at the last stage s with s <= min(shape).
    """
    check_positive_int("n", n)
    schedule = list(schedule)
    if not schedule:
        raise ValueError("schedule must not be empty")
    for s in schedule:
        check_positive_int("schedule entry", s)
    if any(a >= b for a, b in zip(schedule, schedule[1:])):
        raise ValueError(f"schedule must be strictly increasing, got {schedule}")

    extra: dict[int, list[tuple[int, ...]]] = {s: [] for s in schedule}
    for shape in shapes:
        shape = tuple(shape)
        if len(shape) != n:
            raise ValueError(f"shape {shape} does not have dimension {n}")
        admitted = [s for s in schedule if s <= min(shape)]
        if not admitted:
            logging.debug("Rectangle %s below the first Pringsheim stage, skipped", shape)
            continue
        extra[admitted[-1]].append(shape)

    return [
        RectangleStage(s, ((s,) * n, *[b for b in extra[s] if b != (s,) * n]))
        for s in schedule
    ]
