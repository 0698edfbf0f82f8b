import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.stats import qmc

from core.pwl import Dilation
from core.utils import check_positive_int

GL_ORDER = 16
_GL_NODES, _GL_WEIGHTS = leggauss(GL_ORDER)

MAX_PRODUCT_DILATION = 2 ** 14
DEFAULT_PANELS = {1: 64, 2: 24, 3: 6}
QMC_LOG2_POINTS = 16
MIN_MC_SAMPLES = 1000
_MC_CHUNK = 1 << 16

NORM_MODES = ("tensor_GL", "qmc")
TRIG_KERNELS = ("sin_pi", "cos_2pi", "sin_2pi")


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float


def _segments(f: Dilation, g: Dilation | None = None) -> list[Fraction]:
    points = {Fraction(0), Fraction(1), *f.breakpoints()}
    if g is not None:
        points.update(g.breakpoints())
    return sorted(points)


def integrate_pwl_product(f: Dilation, g: Dilation, exact: bool = True) -> Fraction | float:
    """Integral of f * g over (0, 1) for two PWL dilations.

    The product is quadratic between merged breakpoints, so Simpson's rule at
    rational nodes is exact.
    """
    for d in (f, g):
        if d.k > MAX_PRODUCT_DILATION:
            raise ValueError(f"dilation {d} exceeds the breakpoint guard k <= {MAX_PRODUCT_DILATION}")
    points = _segments(f, g)
    if not exact:
        t = np.array([float(p) for p in points])
        mid = 0.5 * (t[:-1] + t[1:])
        ft, gt, fm, gm = f(t), g(t), f(mid), g(mid)
        return float(np.sum(np.diff(t) / 6.0 * (ft[:-1] * gt[:-1] + 4.0 * fm * gm + ft[1:] * gt[1:])))

    total = Fraction(0)
    prev_t, prev_v = points[0], f(points[0]) * g(points[0])
    for t in points[1:]:
        m = (prev_t + t) / 2
        v = f(t) * g(t)
        total += (t - prev_t) * (prev_v + 4 * f(m) * g(m) + v)
        prev_t, prev_v = t, v
    return total / 6


def integrate_pwl_trig(f: Dilation, freq: int, kind: str) -> float:
    """Closed-form integral over (0, 1) of f times sin(freq pi t), cos(2 pi freq t) or sin(2 pi freq t)."""
    if kind not in TRIG_KERNELS:
        raise ValueError(f"Unknown trigonometric kernel {kind!r}. Available: {list(TRIG_KERNELS)}")
    check_positive_int("freq", freq)
    omega = freq * math.pi if kind == "sin_pi" else 2.0 * math.pi * freq
    t = np.array([float(p) for p in _segments(f)])
    v = f(t)
    a, b = t[:-1], t[1:]
    slope = np.diff(v) / np.diff(t)
    if kind == "cos_2pi":
        # d/dt [(v sin(wt)) / w + s cos(wt) / w^2] = v cos(wt)
        prim_b = v[1:] * np.sin(omega * b) / omega + slope * np.cos(omega * b) / omega ** 2
        prim_a = v[:-1] * np.sin(omega * a) / omega + slope * np.cos(omega * a) / omega ** 2
    else:
        prim_b = -v[1:] * np.cos(omega * b) / omega + slope * np.sin(omega * b) / omega ** 2
        prim_a = -v[:-1] * np.cos(omega * a) / omega + slope * np.sin(omega * a) / omega ** 2
    return math.fsum(prim_b - prim_a)


def gl_rule(
    hints: Iterable = (),
    panels: int = 1,
    max_width: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Composite 16-point Gauss-Legendre rule on (0, 1).

    The interval is cut into ``panels`` equal panels, split again at every
    hint in (0, 1), and panels wider than ``max_width`` are subdivided.
    """
    check_positive_int("panels", panels)
    cuts = set(np.linspace(0.0, 1.0, panels + 1).tolist())
    cuts.update(float(h) for h in hints if 0.0 < float(h) < 1.0)
    edges = np.array(sorted(cuts))
    if max_width is not None:
        refined = [edges[:1]]
        for lo, hi in zip(edges[:-1], edges[1:]):
            pieces = max(1, math.ceil((hi - lo) / max_width))
            refined.append(np.linspace(lo, hi, pieces + 1)[1:])
        edges = np.concatenate(refined)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (_GL_NODES + 1.0)).ravel()
    weights = (half * _GL_WEIGHTS).ravel()
    return nodes, weights


def tensor_rule(
    n: int,
    panels: int,
    axis_hints: Sequence[Iterable] | None = None,
    max_width: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Product Gauss-Legendre rule on (0, 1)^n: points (P, n), weights (P,)."""
    rules = [gl_rule(axis_hints[i] if axis_hints else (), panels, max_width) for i in range(n)]
    points = np.stack(np.meshgrid(*(r[0] for r in rules), indexing="ij"), axis=-1).reshape(-1, n)
    weights = np.ones(1)
    for _, w in rules:
        weights = np.outer(weights, w).ravel()
    return points, weights


def _check_q(q: float) -> None:
    if not q > 1.0 or math.isinf(q):
        raise ValueError(f"q must satisfy 1 < q < inf, got {q}")


def lq_norm(
    f: Callable[[np.ndarray], np.ndarray],
    q: float,
    hints: Iterable = (),
    panels: int = 1,
    max_width: float | None = None,
) -> QuadResult:
    """||f||_q on (0, 1), with the change under panel doubling as error estimate."""
    _check_q(q)
    hints = list(hints)

    def estimate(p: int) -> float:
        nodes, weights = gl_rule(hints, p, max_width)
        return float(weights @ np.abs(f(nodes)) ** q) ** (1.0 / q)

    coarse, fine = estimate(panels), estimate(2 * panels)
    return QuadResult(fine, abs(fine - coarse))


def lq_norm_multi(
    f: Callable[[np.ndarray], np.ndarray],
    q: float,
    n: int,
    mode: str = "tensor_GL",
    axis_hints: Sequence[Iterable] | None = None,
    panels: int | None = None,
    seed: int = 0,
) -> QuadResult:
    """||f||_q on (0, 1)^n by tensor Gauss-Legendre (n <= 3) or scrambled Sobol points."""
    _check_q(q)
    check_positive_int("n", n)
    if mode not in NORM_MODES:
        raise ValueError(f"Unknown norm mode {mode!r}. Available: {list(NORM_MODES)}")

    if mode == "tensor_GL":
        if n > 3:
            raise ValueError(f"tensor_GL supports n <= 3, got n={n}; use mode='qmc'")
        panels = panels or DEFAULT_PANELS[n]

        def estimate(p: int) -> float:
            points, weights = tensor_rule(n, p, axis_hints)
            return float(weights @ np.abs(f(points)) ** q) ** (1.0 / q)

        coarse, fine = estimate(panels), estimate(2 * panels)
        return QuadResult(fine, abs(fine - coarse))

    sampler = qmc.Sobol(d=n, scramble=True, seed=np.random.Generator(np.random.Philox(seed)))
    points = sampler.random_base2(m=QMC_LOG2_POINTS)
    values = np.abs(f(points)) ** q
    half = len(values) // 2
    fine = float(np.mean(values)) ** (1.0 / q)
    coarse = float(np.mean(values[:half])) ** (1.0 / q)
    logging.debug("QMC norm with %d Sobol points (seed %d)", len(values), seed)
    return QuadResult(fine, abs(fine - coarse))


def mc_inner_product(
    f: Callable[[np.ndarray], np.ndarray],
    g: Callable[[np.ndarray], np.ndarray],
    n: int,
    samples: int,
    seed: int,
) -> QuadResult:
    """Monte-Carlo estimate of the integral of f * g over (0, 1)^n; ``error`` is the standard error."""
    check_positive_int("n", n)
    if samples < MIN_MC_SAMPLES:
        raise ValueError(f"samples must be >= {MIN_MC_SAMPLES}, got {samples}")
    rng = np.random.Generator(np.random.Philox(seed))
    total = total_sq = 0.0
    remaining = samples
    while remaining:
        size = min(remaining, _MC_CHUNK)
        x = rng.random((size, n))
        prod = f(x) * g(x)
        total += float(np.sum(prod))
        total_sq += float(np.sum(prod * prod))
        remaining -= size
    mean = total / samples
    variance = max(total_sq / samples - mean * mean, 0.0)
    return QuadResult(mean, math.sqrt(variance / samples))
