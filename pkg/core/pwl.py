import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real

import numpy as np

from core.indices import FreqIndex, MultiIndex, as_freq, as_multi
from core.utils import check_positive_int

# Beyond 2**52 the fractional part {t} of a binary64 argument carries no bits.
MAX_ARGUMENT = 2.0 ** 52

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class PwlPeriodic:
    """Continuous piecewise-linear function given on one period.

    Outside [0, period] it is extended periodically, or antiperiodically
    (f(t + period) = -f(t)) when ``antiperiodic`` is set.
    """

    period: Fraction
    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    antiperiodic: bool = False
    _bp: np.ndarray = field(init=False, repr=False, compare=False)
    _val: np.ndarray = field(init=False, repr=False, compare=False)
    _slope: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        period = Fraction(self.period)
        bps = tuple(Fraction(b) for b in self.breakpoints)
        vals = tuple(Fraction(v) for v in self.values)
        if period <= 0:
            raise ValueError(f"period must be positive, got {period}")
        if len(bps) < 2 or len(bps) != len(vals):
            raise ValueError("breakpoints and values must have the same length >= 2")
        if bps[0] != 0 or bps[-1] != period:
            raise ValueError("breakpoints must start at 0 and end at the period")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        wrap = -vals[0] if self.antiperiodic else vals[0]
        if vals[-1] != wrap:
            raise ValueError("last value does not match the (anti)periodic wrap of the first")
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "_bp", np.array([float(b) for b in bps]))
        object.__setattr__(self, "_val", np.array([float(v) for v in vals]))
        object.__setattr__(self, "_slope", tuple(float(s) for s in self.slopes))

    @property
    def slopes(self) -> tuple[Fraction, ...]:
        return tuple(
            (v1 - v0) / (b1 - b0)
            for b0, b1, v0, v1 in zip(self.breakpoints, self.breakpoints[1:], self.values, self.values[1:])
        )

    @property
    def denominator(self) -> int:
        """Common denominator of the breakpoints."""
        return math.lcm(*(b.denominator for b in self.breakpoints))

    def kink_offsets(self) -> tuple[Fraction, ...]:
        """Breakpoints in [0, period) where the slope actually changes."""
        slopes = self.slopes
        left_of_zero = -slopes[-1] if self.antiperiodic else slopes[-1]
        kinks = [Fraction(0)] if slopes[0] != left_of_zero else []
        kinks += [b for b, s0, s1 in zip(self.breakpoints[1:-1], slopes, slopes[1:]) if s0 != s1]
        return tuple(kinks)

    def points_on(self, k: int, lo=Fraction(0), hi=Fraction(1), kinks_only: bool = False) -> list[Fraction]:
        """Breakpoints (or kinks) of t -> f(k t) inside [lo, hi], ends excluded."""
        offsets = self.kink_offsets() if kinks_only else self.breakpoints[:-1]
        lo, hi = Fraction(lo), Fraction(hi)
        first = math.floor(lo * k / self.period)
        last = math.ceil(hi * k / self.period)
        points = {
            (b + m * self.period) / k
            for m in range(first, last + 1)
            for b in offsets
        }
        return sorted(p for p in points if lo < p < hi)

    def __call__(self, t):
        if isinstance(t, np.ndarray):
            return self._evaluate_array(t)
        return self._evaluate_scalar(t)

    def _evaluate_scalar(self, t):
        if isinstance(t, float):
            if not math.isfinite(t) or abs(t) > MAX_ARGUMENT:
                raise ValueError(f"argument {t!r} outside the supported range |t| <= 2**52")
            period = float(self.period)
            bps, vals, slopes = self._bp, self._val, self._slope
        elif isinstance(t, Real):
            t = Fraction(t)
            period = self.period
            bps, vals, slopes = self.breakpoints, self.values, self.slopes
        else:
            raise ValueError(f"cannot evaluate at {t!r}")
        q = math.floor(t / period)
        r = t - q * period
        i = min(bisect_right(bps, r) - 1, len(bps) - 2)
        value = vals[i] + slopes[i] * (r - bps[i])
        if self.antiperiodic and q % 2:
            value = -value
        return float(value) if isinstance(t, float) else value

    def _evaluate_array(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if t.size and (not np.all(np.isfinite(t)) or np.max(np.abs(t)) > MAX_ARGUMENT):
            raise ValueError("argument outside the supported range |t| <= 2**52")
        period = float(self.period)
        q = np.floor(t / period)
        r = t - q * period
        value = np.interp(r, self._bp, self._val)
        if self.antiperiodic:
            value = np.where(np.mod(q, 2.0) == 1.0, -value, value)
        return value


# C(x) = 4|x - 1/2| - 1 and S(x) = |2 - 4|x - 1/4|| - 1, period 1
C_SAW = PwlPeriodic(Fraction(1), (0, Fraction(1, 2), 1), (1, -1, 1))
S_SAW = PwlPeriodic(Fraction(1), (0, Fraction(1, 4), Fraction(3, 4), 1), (0, 1, -1, 0))
# hat S: 2t on [0, 1/2], 2 - 2t on [1/2, 1], S(t + 1) = -S(t)
HAT = PwlPeriodic(Fraction(1), (0, Fraction(1, 2), 1), (0, 1, 0), antiperiodic=True)

FAMILIES = {"C": C_SAW, "S": S_SAW, "hat": HAT}
_ALIASES = {"C_saw": "C", "S_saw": "S", "c": "C", "s": "S"}
SAWTOOTH = ("C", "S")


def family_name(family: str) -> str:
    name = _ALIASES.get(family, family)
    if name not in FAMILIES:
        raise ValueError(f"Unknown family {family!r}. Available: {sorted(FAMILIES)}")
    return name


def profile(family: str) -> PwlPeriodic:
    return FAMILIES[family_name(family)]


def eval_base(family: str, t):
    return profile(family)(t)


def eval_dilated(family: str, k: int, t):
    check_positive_int("dilation k", k)
    return profile(family)(k * t)


@dataclass(frozen=True)
class Dilation:
    """The univariate basis element t -> family(k t)."""

    family: str
    k: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", family_name(self.family))
        check_positive_int("dilation k", self.k)

    @property
    def profile(self) -> PwlPeriodic:
        return FAMILIES[self.family]

    def __call__(self, t):
        return self.profile(self.k * t)

    def breakpoints(self, lo=Fraction(0), hi=Fraction(1)) -> list[Fraction]:
        return self.profile.points_on(self.k, lo, hi)

    def kinks(self, lo=Fraction(0), hi=Fraction(1)) -> list[Fraction]:
        return self.profile.points_on(self.k, lo, hi, kinks_only=True)

    def __str__(self) -> str:
        return f"{self.family}_{self.k}"


def hat_kinks(j: int) -> list[Fraction]:
    return Dilation("hat", j).kinks()


def eval_tensor(family: str, m, x):
    """Product family(m_1 x_1) * ... * family(m_n x_n)."""
    m = as_multi(m)
    if isinstance(x, np.ndarray):
        if x.shape[-1] != m.n:
            raise ValueError(f"point dimension {x.shape[-1]} != index dimension {m.n}")
        out = np.ones(x.shape[:-1])
        for i, mi in enumerate(m.entries):
            out = out * eval_dilated(family, mi, x[..., i])
        return out
    x = tuple(x)
    if len(x) != m.n:
        raise ValueError(f"point dimension {len(x)} != index dimension {m.n}")
    return math.prod(eval_dilated(family, mi, xi) for mi, xi in zip(m.entries, x))


def eval_ridge(family: str, k, x):
    """Ridge composition family(k . x) for the sawtooth families."""
    name = family_name(family)
    if name not in SAWTOOTH:
        raise ValueError(f"ridge functions are built from {SAWTOOTH}, got {family!r}")
    return FAMILIES[name](as_freq(k).dot(x))


TRIG_KINDS = ("e_j", "e_m_tensor", "cos_ridge", "sin_ridge", "const")


def eval_trig(kind: str, index, x):
    """Reference orthonormal trigonometric systems."""
    if kind not in TRIG_KINDS:
        raise ValueError(f"Unknown trigonometric kind {kind!r}. Available: {list(TRIG_KINDS)}")
    scalar = not isinstance(x, np.ndarray)
    arr = np.asarray(x, dtype=float)

    if kind == "const":
        if index not in (None, (), 0):
            raise ValueError(f"the constant function takes no index, got {index!r}")
        if scalar:
            return 1.0
        # arrays are batches: (P,) univariate points or (P, n) points
        value = np.ones(arr.shape[:-1] if arr.ndim > 1 else arr.shape)
    elif kind == "e_j":
        if not isinstance(index, (int, np.integer)):
            raise ValueError(f"e_j takes an integer index, got {index!r}")
        j = check_positive_int("j", int(index))
        value = SQRT2 * np.sin(j * np.pi * arr)
    elif kind == "e_m_tensor":
        m = as_multi(index)
        if arr.shape[-1:] != (m.n,):
            raise ValueError(f"point dimension does not match index dimension {m.n}")
        value = 2.0 ** (m.n / 2) * np.prod(
            [np.sin(mi * np.pi * arr[..., i]) for i, mi in enumerate(m.entries)], axis=0
        )
    else:
        k = as_freq(index)
        phase = 2 * np.pi * k.dot(arr)
        value = SQRT2 * (np.cos(phase) if kind == "cos_ridge" else np.sin(phase))
    return float(value) if scalar else value


@dataclass(frozen=True)
class InterpolationReport:
    j: int
    nodes: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    expected: tuple[int, ...]
    holds: bool


def hat_interpolates_sine(j: int) -> InterpolationReport:
    """Check S_j(m/(2j)) = sin(j pi m/(2j)) = sin(m pi/2) exactly, m = 0..2j."""
    check_positive_int("j", j)
    nodes = tuple(Fraction(m, 2 * j) for m in range(2 * j + 1))
    values = tuple(eval_dilated("hat", j, t) for t in nodes)
    expected = tuple((0, 1, 0, -1)[m % 4] for m in range(2 * j + 1))
    return InterpolationReport(j, nodes, values, expected, values == tuple(Fraction(e) for e in expected))
