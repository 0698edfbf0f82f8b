import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from core.indices import FreqIndex, as_multi, canonicalize
from core.pwl import SQRT2, Dilation, eval_tensor, eval_trig, profile

Func = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Evaluator:
    """A function on (0, 1)^n with what quadrature needs to know about it.

    ``hints`` are kink positions in (0, 1) per axis. A ridge evaluator is
    ``profile(ridge . x)`` with a 1-periodic profile whose kinks in [0, 1)
    are ``profile_hints``. ``parts`` lists the summands of a sum.
    """

    label: str
    n: int
    func: Func
    hints: tuple[tuple[float, ...], ...] = ()
    scale: int = 1
    norm2_sq: float | None = None
    ridge: FreqIndex | None = None
    profile: Func | None = None
    profile_hints: tuple[float, ...] = ()
    parts: tuple["Evaluator", ...] = field(default=(), repr=False)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.func(np.asarray(x, dtype=float))

    def axis_hints(self, axis: int = 0) -> tuple[float, ...]:
        return self.hints[axis] if self.hints else ()


def _floats(points) -> tuple[float, ...]:
    return tuple(float(p) for p in points)


def _dilation(family: str, k: int) -> Evaluator:
    d = Dilation(family, k)
    return Evaluator(str(d), 1, d, (_floats(d.kinks()),), scale=k, norm2_sq=1.0 / 3.0)


def _sine(j: int) -> Evaluator:
    return Evaluator(f"e_{j}", 1, lambda t: eval_trig("e_j", j, t), scale=j, norm2_sq=1.0)


def _square(n: int) -> Evaluator:
    # the constant 1 on (0, 1); its odd 2-periodic extension is the square wave
    if n == 1:
        return Evaluator("square", 1, lambda t: np.ones_like(t), norm2_sq=1.0)
    return Evaluator("const", n, lambda x: np.ones(x.shape[:-1]), norm2_sq=1.0)


def _poly() -> Evaluator:
    return Evaluator("poly", 1, lambda t: t * (1.0 - t), norm2_sq=1.0 / 30.0)


def _ridge(family: str, k: tuple[int, ...]) -> Evaluator:
    canonical, sign = canonicalize(k)
    if family in ("C", "cos"):
        sign = 1
    if family in ("C", "S"):
        base = profile(family)
        kinks = _floats(base.kink_offsets())
        norm2_sq = 1.0 / 3.0
    else:
        trig = np.cos if family == "cos" else np.sin
        base = lambda t: SQRT2 * trig(2.0 * np.pi * t)  # noqa: E731
        kinks = ()
        norm2_sq = 1.0
    g = base if sign == 1 else (lambda t: -base(t))
    label = f"{family}_({','.join(map(str, k))})"
    return Evaluator(
        label,
        canonical.n,
        lambda x: g(canonical.dot(x)),
        scale=canonical.sup_norm,
        norm2_sq=norm2_sq,
        ridge=canonical,
        profile=g,
        profile_hints=kinks,
    )


def _tensor(kind: str, m: tuple[int, ...]) -> Evaluator:
    m = as_multi(m)
    if kind == "tensor-hat":
        hints = tuple(_floats(Dilation("hat", mi).kinks()) for mi in m.entries)
        return Evaluator(
            f"hat_({m})", m.n, lambda x: eval_tensor("hat", m, x), hints, max(m.entries), 3.0 ** -m.n
        )
    return Evaluator(f"e_({m})", m.n, lambda x: eval_trig("e_m_tensor", m, x), scale=max(m.entries), norm2_sq=1.0)


def _csv_grid(path: str) -> Evaluator:
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    if data.shape[1] != 2 or len(data) < 2:
        raise ValueError(f"{path!r} must hold two columns t,value with at least two rows")
    order = np.argsort(data[:, 0])
    t, v = data[order, 0], data[order, 1]
    logging.warning(
        "Using linear interpolation of %d samples from %s: results reflect the interpolant, not the sampled function",
        len(t),
        path,
    )
    return Evaluator(f"csv:{path}", 1, lambda x: np.interp(x, t, v), (_floats(t[(t > 0) & (t < 1)]),))


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(e) for e in text.split(","))
    except ValueError as e:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from e


BUILTINS = ("hat:j", "C:k", "S:k", "sine:j", "square", "poly", "const", "cos:k", "sin:k",
            "tensor-hat:m", "tensor-sine:m", "csv:path", "f+g")


def builtin(spec: str, n: int = 1) -> Evaluator:
    """Parse a named input function, e.g. ``hat:3``, ``S:1,2+C:2,0`` or ``csv:grid.csv``."""
    spec = spec.strip()
    if "+" in spec:
        parts = tuple(builtin(p, n) for p in spec.split("+"))
        if len({p.n for p in parts}) != 1:
            raise ValueError(f"summands of {spec!r} live in different dimensions")
        return Evaluator(
            spec,
            parts[0].n,
            lambda x: sum(p(x) for p in parts),
            scale=max(p.scale for p in parts),
            parts=parts,
        )

    name, _, arg = spec.partition(":")
    if name in ("square", "const") and not arg:
        return _square(n)
    if name == "poly" and not arg:
        return _poly()
    if name == "csv" and arg:
        return _csv_grid(arg)
    if not arg:
        raise ValueError(f"Unknown function {spec!r}. Available: {list(BUILTINS)}")

    index = _ints(arg)
    if name in ("hat", "sine") and len(index) == 1:
        return _dilation("hat", index[0]) if name == "hat" else _sine(index[0])
    if name in ("C", "S") and len(index) == 1 and n == 1:
        return _dilation(name, index[0])
    if name in ("C", "S", "cos", "sin"):
        return _ridge(name, index)
    if name in ("tensor-hat", "tensor-sine"):
        return _tensor(name, index)
    raise ValueError(f"Unknown function {spec!r}. Available: {list(BUILTINS)}")
