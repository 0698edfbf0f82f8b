import json
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import numpy as np

from core.indices import as_freq, as_multi
from core.pwl import SAWTOOTH, Dilation, family_name, profile
from core.utils import check_positive_int

MAX_UNIVARIATE_K = 2 ** 14
MAX_RIDGE_L1 = 2 ** 12
RELU_SCHEMA = "relu-net/1"


@dataclass(frozen=True)
class ReluNet:
    """net(x) = c0 + sum_i c_i max(0, w_i . x + b_i)."""

    input_dim: int
    weights: np.ndarray
    biases: np.ndarray
    c: np.ndarray
    c0: float
    label: str = ""

    def __post_init__(self) -> None:
        check_positive_int("input_dim", self.input_dim)
        weights = np.asarray(self.weights, dtype=float).reshape(-1, self.input_dim)
        biases = np.asarray(self.biases, dtype=float).reshape(-1)
        c = np.asarray(self.c, dtype=float).reshape(-1)
        if not (len(weights) == len(biases) == len(c)):
            raise ValueError("hidden weights, biases and output coefficients differ in length")
        for name, arr in (("weights", weights), ("biases", biases), ("c", c), ("c0", np.array([self.c0]))):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite value in {name}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "c0", float(self.c0))

    @property
    def hidden_size(self) -> int:
        return len(self.c)


def _compile_line(family: str, t_min: int, t_max: int, weight: np.ndarray, label: str) -> ReluNet:
    """Net for family(k . x) when k . x ranges over [t_min, t_max].

    With L the common denominator of the profile breakpoints, family(s / L)
    is linear between consecutive integers s, so every hidden unit is
    ReLU(L k . x - s) with integer weights and biases, and the output
    coefficients are integer slope changes.
    """
    prof = profile(family)
    L = prof.denominator
    s_lo, s_hi = L * t_min, L * t_max
    values = [prof(Fraction(s, L)) for s in range(s_lo, s_hi + 1)]
    slopes = [b - a for a, b in zip(values, values[1:])]

    units, c = [], []
    previous = Fraction(0)
    for offset, slope in enumerate(slopes):
        if offset == 0 or slope != previous:
            units.append(s_lo + offset)
            c.append(slope - previous)
        previous = slope
    if any(v.denominator != 1 for v in (*c, values[0])):
        raise ValueError(f"profile {family} does not give integer output weights")
    H = len(units)
    return ReluNet(
        weight.size,
        np.tile(L * weight.astype(float), (H, 1)),
        -np.array(units, dtype=float),
        np.array([float(v) for v in c]),
        float(values[0]),
        label,
    )


def compile_univariate(family: str, k: int) -> ReluNet:
    """Exact one-hidden-layer net for t -> family(k t) on [0, 1]."""
    family = family_name(family)
    check_positive_int("k", k)
    if k > MAX_UNIVARIATE_K:
        raise ValueError(f"k={k} exceeds the hidden size guard k <= {MAX_UNIVARIATE_K}")
    return _compile_line(family, 0, k, np.array([k]), str(Dilation(family, k)))


def compile_ridge(family: str, k) -> ReluNet:
    """Exact net for x -> family(k . x) on [0, 1]^n; all units share the direction k."""
    family = family_name(family)
    if family not in SAWTOOTH:
        raise ValueError(f"ridge nets are built from {SAWTOOTH}, got {family!r}")
    k = as_freq(k)
    if k.l1_norm > MAX_RIDGE_L1:
        raise ValueError(f"||k||_1 = {k.l1_norm} exceeds the range guard {MAX_RIDGE_L1}")
    t_min = sum(min(e, 0) for e in k.entries)
    t_max = sum(max(e, 0) for e in k.entries)
    return _compile_line(family, t_min, t_max, np.array(k.entries), f"{family}_({k})")


def compile_tensor(m) -> ReluNet:
    """Nets for tensor hats exist only in dimension one: a shallow ReLU net cannot multiply."""
    m = as_multi(m)
    if m.n >= 2:
        raise ValueError(
            f"tensor product hat_({m}) has no exact one-hidden-layer ReLU net: "
            "ReLU networks cannot reproduce the multiplication function exactly"
        )
    return compile_univariate("hat", m.entries[0])


def net_eval(net: ReluNet, x):
    """Evaluate at a batch of points, or exactly at one rational point."""
    if isinstance(x, np.ndarray):
        pts = x.reshape(-1, 1) if net.input_dim == 1 and x.ndim == 1 else x
        if pts.shape[-1] != net.input_dim:
            raise ValueError(f"point dimension {pts.shape[-1]} != net input dimension {net.input_dim}")
        hidden = np.maximum(pts @ net.weights.T + net.biases, 0.0)
        # compensated sum: the hidden terms are large and cancel to a value in [-1, 1]
        terms = (hidden * net.c).reshape(-1, net.hidden_size).tolist()
        out = np.array([math.fsum((*row, net.c0)) for row in terms], dtype=float)
        return out.reshape(x.shape[:-1]) if pts is x else out.reshape(x.shape)

    point = (x,) if isinstance(x, Real) else tuple(x)
    if len(point) != net.input_dim:
        raise ValueError(f"point dimension {len(point)} != net input dimension {net.input_dim}")
    if any(isinstance(v, float) for v in point):
        return float(net_eval(net, np.array([point], dtype=float))[0])
    point = tuple(Fraction(v) for v in point)
    total = Fraction(net.c0)
    for w, b, c in zip(net.weights, net.biases, net.c):
        pre = sum((Fraction(wi) * xi for wi, xi in zip(w, point)), Fraction(b))
        if pre > 0:
            total += Fraction(c) * pre
    return total


def linear_regions(net: ReluNet) -> int:
    """Linear pieces of a univariate net on (0, 1)."""
    if net.input_dim != 1:
        raise ValueError("linear_regions counts pieces of univariate nets")
    kinks = {Fraction(-b) / Fraction(w) for w, b in zip(net.weights[:, 0], net.biases) if w != 0.0}
    return 1 + sum(1 for t in kinks if 0 < t < 1)


def _hexes(values) -> list[str]:
    return [float(v).hex() for v in values]


def export_json(net: ReluNet) -> str:
    hidden = [
        {"w": w.tolist(), "w_hex": _hexes(w), "b": float(b), "b_hex": float(b).hex()}
        for w, b in zip(net.weights, net.biases)
    ]
    data = {
        "schema": RELU_SCHEMA,
        "label": net.label,
        "input_dim": net.input_dim,
        "hidden": hidden,
        "output": {"c": net.c.tolist(), "c_hex": _hexes(net.c), "c0": net.c0, "c0_hex": net.c0.hex()},
    }
    return json.dumps(data, indent=2)


def _checked(decimal, hexed: str, name: str) -> float:
    value = float.fromhex(hexed)
    if not math.isfinite(value):
        raise ValueError(f"non-finite value in {name}")
    if float(decimal) != value:
        raise ValueError(f"{name}: decimal {decimal!r} and hex {hexed!r} disagree")
    return value


def import_json(text: str) -> ReluNet:
    try:
        data = json.loads(text)
        if data.get("schema") != RELU_SCHEMA:
            raise ValueError(f"unsupported schema {data.get('schema')!r}")
        n = int(data["input_dim"])
        weights, biases = [], []
        for i, unit in enumerate(data["hidden"]):
            if len(unit["w"]) != n or len(unit["w_hex"]) != n:
                raise ValueError(f"hidden unit {i} has the wrong input dimension")
            weights.append([_checked(d, h, f"hidden[{i}].w") for d, h in zip(unit["w"], unit["w_hex"])])
            biases.append(_checked(unit["b"], unit["b_hex"], f"hidden[{i}].b"))
        out = data["output"]
        if len(out["c"]) != len(weights) or len(out["c_hex"]) != len(weights):
            raise ValueError("output coefficients do not match the hidden layer")
        c = [_checked(d, h, "output.c") for d, h in zip(out["c"], out["c_hex"])]
        c0 = _checked(out["c0"], out["c0_hex"], "output.c0")
    except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as e:
        raise ValueError(f"malformed ReLU net JSON: {e}") from e
    return ReluNet(n, np.array(weights, dtype=float).reshape(-1, n), np.array(biases), np.array(c), c0, data.get("label", ""))
