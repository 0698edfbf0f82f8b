import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from core.indices import FreqIndex, as_multi, odd_root
from core.utils import check_positive_int, odd_tail_sum

PI2 = math.pi ** 2
TAU1 = 4.0 * math.sqrt(2.0) / PI2
GAMMA0 = 8.0 / PI2
DEFAULT_TERMS = 10_000
MAX_TENSOR_TERMS = 2 ** 22
# the lower Riesz constant known before the Neumann-series argument
PREVIOUS_LOWER_RIESZ = 0.5

TRANSFER_KINDS = ("T_hat_1d", "T_tensor", "T_ridge")


def tau(k: int) -> float:
    """Sine coefficients of the hat function: S = sum_k tau_k e_k."""
    check_positive_int("k", k)
    if k % 2 == 0:
        return 0.0
    sign = -1.0 if (k // 2) % 2 else 1.0
    return sign * TAU1 / k ** 2


def tau_multi(m) -> float:
    return math.prod(tau(mi) for mi in as_multi(m).entries)


def gamma(m: int, kind: str) -> float:
    """Coefficient of c_{2m+1} in C (kind "cos") or of s_{2m+1} in S (kind "sin")."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if kind not in ("cos", "sin"):
        raise ValueError(f"gamma kind must be 'cos' or 'sin', got {kind!r}")
    value = GAMMA0 / (2 * m + 1) ** 2
    return -value if kind == "sin" and m % 2 else value


def tau_array(N: int) -> np.ndarray:
    """tau_k for k = 0..N (index 0 unused, 0)."""
    out = np.zeros(N + 1)
    k = np.arange(1, N + 1, 2)
    out[1::2] = np.where((k // 2) % 2 == 1, -1.0, 1.0) * TAU1 / k.astype(float) ** 2
    return out


def gamma_array(N: int, kind: str) -> np.ndarray:
    """Weights w_u, u = 0..N, of the odd multiplier u = 2m+1 (zero on even u)."""
    out = np.zeros(N + 1)
    for u in range(1, N + 1, 2):
        out[u] = gamma((u - 1) // 2, kind)
    return out


def abs_tau_sum(terms: int, start: int = 1) -> float:
    """sum of |tau_{2k-1}| for k = start .. start + terms - 1 (fsum)."""
    k = np.arange(start, start + terms, dtype=float)
    return math.fsum(TAU1 / (2 * k - 1) ** 2)


@dataclass(frozen=True)
class CoeffSeq:
    """Coefficients indexed by positive integers (dim 1) or by index tuples (dim n).

    ``tail_bound`` bounds what the cutoff discards: an l1 bound for operator
    sequences, the l2 energy for expansions; ``inf`` when unknown.
    """

    dim: int
    cutoff: int
    entries: Mapping = field(default_factory=dict)
    tail_bound: float = math.inf

    def __post_init__(self) -> None:
        check_positive_int("dim", self.dim)
        check_positive_int("cutoff", self.cutoff)
        object.__setattr__(self, "entries", {k: float(v) for k, v in self.entries.items() if v != 0.0})

    def __getitem__(self, index) -> float:
        return self.entries.get(index, 0.0)

    def support(self) -> list:
        return sorted(self.entries)

    def to_array(self) -> np.ndarray:
        if self.dim != 1:
            raise ValueError("to_array is for dimension-1 sequences")
        out = np.zeros(self.cutoff + 1)
        for k, v in self.entries.items():
            if k <= self.cutoff:
                out[k] = v
        return out

    @classmethod
    def from_array(cls, values: np.ndarray, tail_bound: float = math.inf) -> "CoeffSeq":
        values = np.asarray(values, dtype=float)
        return cls(1, len(values) - 1, {k: float(values[k]) for k in range(1, len(values))}, tail_bound)

    def to_dict(self) -> dict:
        rows = []
        for index in self.support():
            key = list(index) if isinstance(index, tuple) else [index]
            rows.append([*key, self.entries[index]])
        # JSON has no infinity; an unknown bound is written as null
        tail = self.tail_bound if math.isfinite(self.tail_bound) else None
        return {"dim": self.dim, "cutoff": self.cutoff, "entries": rows, "tail_bound": tail}

    @classmethod
    def from_dict(cls, data: dict) -> "CoeffSeq":
        try:
            dim = int(data["dim"])
            entries = {}
            for row in data["entries"]:
                *key, value = row
                index = int(key[0]) if len(key) == 1 and dim == 1 else tuple(int(k) for k in key)
                entries[index] = float(value)
            tail = data["tail_bound"]
            return cls(dim, int(data["cutoff"]), entries, math.inf if tail is None else float(tail))
        except (KeyError, TypeError, ValueError) as e:
            raise ValueError(f"malformed coefficient sequence: {e}") from e

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, allow_nan=False)


def tau_seq(N: int) -> CoeffSeq:
    last_odd = N if N % 2 else N - 1
    return CoeffSeq.from_array(tau_array(N), tail_bound=TAU1 * odd_tail_sum(max(last_odd, 1)))


def delta(j: int, N: int) -> CoeffSeq:
    check_positive_int("j", j)
    return CoeffSeq(1, N, {j: 1.0}, tail_bound=0.0)


# -- Dirichlet algebra on arrays (index 0 unused) -----------------------------


def dirichlet_convolve_arrays(a: np.ndarray, b: np.ndarray, N: int) -> np.ndarray:
    """(a * b)_k = sum_{d | k} a_d b_{k/d} for k <= N."""
    a = _padded(a, N)
    b = _padded(b, N)
    out = np.zeros(N + 1)
    for d in range(1, N + 1):
        if a[d] != 0.0:
            out[d::d] += a[d] * b[1 : N // d + 1]
    return out


def dirichlet_inverse_array(a: np.ndarray, N: int) -> np.ndarray:
    """Dirichlet inverse: inv_1 = 1/a_1, inv_k = -(1/a_1) sum_{d | k, d > 1} a_d inv_{k/d}."""
    a = _padded(a, N)
    if a[1] == 0.0:
        raise ValueError("sequence with a_1 = 0 has no Dirichlet inverse (singular)")
    inv = np.zeros(N + 1)
    acc = np.zeros(N + 1)
    for m in range(1, N + 1):
        inv[m] = ((1.0 if m == 1 else 0.0) - acc[m]) / a[1]
        if inv[m] != 0.0 and 2 * m <= N:
            acc[2 * m :: m] += a[2 : N // m + 1] * inv[m]
    return inv


def _padded(a: np.ndarray, N: int) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if len(a) >= N + 1:
        return a[: N + 1]
    return np.concatenate([a, np.zeros(N + 1 - len(a))])


def dirichlet_convolve(a: CoeffSeq, b: CoeffSeq, N: int) -> CoeffSeq:
    check_positive_int("N", N)
    if a.dim != 1 or b.dim != 1:
        raise ValueError("Dirichlet convolution is defined for dimension-1 sequences")
    out = dirichlet_convolve_arrays(a.to_array(), b.to_array(), N)
    exact = a.tail_bound == 0.0 and b.tail_bound == 0.0 and N >= max(a.support() or [1]) * max(b.support() or [1])
    return CoeffSeq.from_array(out, tail_bound=0.0 if exact else math.inf)


def dirichlet_inverse(a: CoeffSeq, N: int) -> CoeffSeq:
    check_positive_int("N", N)
    if a.dim != 1:
        raise ValueError("Dirichlet inverse is defined for dimension-1 sequences")
    return CoeffSeq.from_array(dirichlet_inverse_array(a.to_array(), N))


def convolve_axes(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Apply the 1-D Dirichlet convolution with ``weights`` along every axis.

    ``values`` is indexed from 1 on each axis (slot 0 unused).
    """
    out = np.asarray(values, dtype=float)
    for axis in range(out.ndim):
        out = np.apply_along_axis(
            lambda row: dirichlet_convolve_arrays(weights, row, len(row) - 1), axis, out
        )
    return out


def ray_groups(indices) -> dict[FreqIndex, dict[int, FreqIndex]]:
    """Group canonical frequencies by odd-multiplier ray: root -> {u: u*root}."""
    groups: dict[FreqIndex, dict[int, FreqIndex]] = {}
    for k in indices:
        root, u = odd_root(k)
        groups.setdefault(root, {})[u] = k
    return groups


def ray_convolve(
    coeffs: Mapping[FreqIndex, float],
    kind: str,
    inverse: bool = False,
    bound: int | None = None,
) -> dict[FreqIndex, float]:
    """Coefficient-space ridge operator, ray by ray over odd multipliers.

    Forward: (T b)_{u r} = sum_{v w = u} gamma_w b_{v r} over odd v, w.
    With ``bound`` every ray runs to the last odd multiple inside the ball
    ||k||_inf <= bound; the ball is closed under odd divisors, so the
    truncated result is exact there.
    """
    out: dict[FreqIndex, float] = {}
    for root, ray in ray_groups(coeffs).items():
        top = max(ray) if bound is None else bound // root.sup_norm
        if top < 1:
            continue
        values = np.zeros(top + 1)
        for u, k in ray.items():
            if u <= top:
                values[u] = coeffs[k]
        weights = gamma_array(top, kind)
        if inverse:
            weights = dirichlet_inverse_array(weights, top)
        mapped = dirichlet_convolve_arrays(weights, values, top)
        for u in range(1, top + 1, 2):
            if mapped[u] != 0.0:
                out[root.scaled(u)] = float(mapped[u])
    return out


# -- operators --------------------------------------------------------------


@dataclass(frozen=True)
class OperatorSpec:
    """Truncated transfer operator: ``M`` odd multipliers per axis (1, 3, ..., 2M-1)."""

    kind: str
    M: int = DEFAULT_TERMS
    n: int = 1

    def __post_init__(self) -> None:
        if self.kind not in TRANSFER_KINDS:
            raise ValueError(f"Unknown operator kind {self.kind!r}. Available: {list(TRANSFER_KINDS)}")
        if isinstance(self.M, bool) or not isinstance(self.M, int) or self.M < 1:
            raise ValueError(f"truncation M must be >= 1, got {self.M!r}")
        check_positive_int("n", self.n)
        if self.kind == "T_hat_1d" and self.n != 1:
            raise ValueError("T_hat_1d acts on univariate functions (n = 1)")

    @property
    def last_odd(self) -> int:
        return 2 * self.M - 1

    def tail(self) -> float:
        """Bound on the l1 mass of the coefficients the truncation drops."""
        if self.kind == "T_ridge":
            return GAMMA0 * odd_tail_sum(self.last_odd)
        full = 1.0 / math.sqrt(2.0)
        one_axis = TAU1 * odd_tail_sum(self.last_odd)
        return full ** self.n - (full - one_axis) ** self.n


@dataclass(frozen=True)
class TransferValue:
    value: np.ndarray
    error_bound: float


_CHUNK = 256


def _multipliers(spec: OperatorSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Odd multipliers, their weights and a reflection flag per term.

    Tensor multipliers are rows of the grid {1, 3, ..., 2M-1}^n.
    """
    odd = np.arange(1, 2 * spec.M, 2)
    if spec.kind == "T_hat_1d":
        return odd, tau_array(spec.last_odd)[odd], np.zeros(len(odd), dtype=bool)
    if spec.kind == "T_tensor":
        if spec.M ** spec.n > MAX_TENSOR_TERMS:
            raise ValueError(f"tensor truncation M**n = {spec.M ** spec.n} exceeds {MAX_TENSOR_TERMS} terms")
        grid = np.stack(np.meshgrid(*(odd,) * spec.n, indexing="ij"), axis=-1).reshape(-1, spec.n)
        axis_weights = tau_array(spec.last_odd)
        return grid, np.prod(axis_weights[grid], axis=1), np.zeros(len(grid), dtype=bool)
    # ridge: u = 4j+1 acts on x, u = 4j+3 on the reflected point 1 - x
    return odd, GAMMA0 / odd.astype(float) ** 2, odd % 4 == 3


def apply_T(
    spec: OperatorSpec,
    f: Callable[[np.ndarray], np.ndarray],
    x,
    sup_norm: float | None = None,
) -> TransferValue:
    """Evaluate the truncated transfer operator applied to f at the points x.

    f must already carry the extension the operator needs: odd and
    2-periodic for the hat and tensor kinds, 1-periodic for the ridge kind.
    """
    x = np.asarray(x, dtype=float)
    univariate = spec.kind == "T_hat_1d"
    if not univariate and x.shape[-1:] != (spec.n,):
        raise ValueError(f"points must have trailing dimension {spec.n}")
    multipliers, weights, reflect = _multipliers(spec)

    value = np.zeros(x.shape if univariate else x.shape[:-1])
    for start in range(0, len(weights), _CHUNK):
        u = multipliers[start : start + _CHUNK]
        w = weights[start : start + _CHUNK]
        if univariate:
            args = x[..., None] * u
        else:
            base = np.where(reflect[start : start + _CHUNK, None], 1.0 - x[..., None, :], x[..., None, :])
            args = base * (u if u.ndim == 2 else u[:, None])
        value += np.tensordot(f(args), w, axes=([-1], [0]))

    if sup_norm is None:
        sup_norm = _estimate_sup(f, spec)
    return TransferValue(value, spec.tail() * sup_norm)


def _estimate_sup(f: Callable[[np.ndarray], np.ndarray], spec: OperatorSpec) -> float:
    grid = (np.arange(4096) + 0.5) / 4096
    if spec.kind == "T_hat_1d":
        return float(np.max(np.abs(f(grid))))
    rng = np.random.Generator(np.random.Philox(0))
    return float(np.max(np.abs(f(rng.random((4096, spec.n))))))


@dataclass(frozen=True)
class NormBound:
    norm: float
    contraction: float


def operator_norm_bound(spec: OperatorSpec) -> NormBound:
    """Triangle-inequality bounds: ||T|| and the Neumann remainder ratio ||M|| / a."""
    if spec.kind == "T_ridge":
        return NormBound(GAMMA0 * PI2 / 8.0, PI2 / 8.0 - 1.0)
    n = spec.n
    return NormBound((1.0 / math.sqrt(2.0)) ** n, (PI2 / 8.0) ** n - 1.0)


@dataclass(frozen=True)
class CriterionResult:
    n: int
    lhs: float
    rhs: float
    ratio: float
    holds: bool


def schauder_criterion(n: int) -> CriterionResult:
    """sum over k != 1 of |tau_{2k-1}| against |tau_1| in dimension n."""
    check_positive_int("n", n)
    rhs = TAU1 ** n
    ratio = (PI2 / 8.0) ** n - 1.0
    lhs = rhs * ratio
    return CriterionResult(n, lhs, rhs, ratio, lhs < rhs)


def riesz_constants_via_neumann(kind: str) -> tuple[float, float]:
    """(A, B) with A = (a - ||M||)^2 and B = 3 ||T||^2."""
    if kind == "hat_1d":
        a = math.sqrt(3.0) * TAU1
        norm_t = 1.0 / math.sqrt(2.0)
    elif kind == "ridge_n":
        a = math.sqrt(1.5) * GAMMA0
        # ||T|| <= 1 on the ridge system, whose sqrt(3/2) scaling halves its square
        norm_t = 1.0 / math.sqrt(2.0)
    else:
        raise ValueError(f"Unknown Riesz kind {kind!r}. Available: ['hat_1d', 'ridge_n']")
    remainder = a * (PI2 / 8.0 - 1.0)
    return (a - remainder) ** 2, 3.0 * norm_t ** 2
