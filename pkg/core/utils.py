import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

_threads = 1


def set_threads(threads: int) -> None:
    """Cap the worker count used by parallel_map."""
    global _threads
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    _threads = threads


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    items = list(items)
    if _threads == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=_threads) as pool:
        return list(pool.map(fn, items))


def v2(n: int) -> int:
    """2-adic valuation of a non-zero integer."""
    if n == 0:
        raise ValueError("v2 is undefined for 0")
    n = abs(n)
    return (n & -n).bit_length() - 1


def odd_part(n: int) -> int:
    return abs(n) >> v2(n)


def gcd_all(entries: Iterable[int]) -> int:
    return math.gcd(*entries)


def check_positive_int(name: str, value: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return value


def odd_tail_sum(last_odd: int) -> float:
    """Upper bound for the sum of 1/u**2 over odd u > last_odd."""
    # 1/u**2 <= (1/2) * integral of x**-2 over [u-2, u]
    return 1.0 / (2 * last_odd)
