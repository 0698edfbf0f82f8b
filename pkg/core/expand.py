import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from core.filesystem import write_csv
from core.functions import Evaluator
from core.indices import (
    FreqIndex,
    parallel,
    pringsheim_rectangles,
    primitive_root,
    ridge_indices,
    square_order,
)
from core.pwl import SQRT2, eval_dilated, eval_ridge, eval_tensor, eval_trig, hat_kinks
from core.quadrature import DEFAULT_PANELS, QuadResult, gl_rule, lq_norm, lq_norm_multi, tensor_rule
from core.transfer import (
    CoeffSeq,
    convolve_axes,
    dirichlet_convolve_arrays,
    dirichlet_inverse_array,
    ray_convolve,
    tau_array,
)
from core.utils import check_positive_int, parallel_map

BASES = ("sine", "tensor_sine", "trig_ridge", "hat", "tensor_hat", "CS_ridge")
ORTHONORMAL = ("sine", "tensor_sine", "trig_ridge")
RIDGE_BASES = ("trig_ridge", "CS_ridge")
ORDERINGS = ("pringsheim", "square")
EXPANSION_SCHEMA = "expansion/1"

_RIDGE_CHUNK = 8
# partial sums this close to f have converged up to quadrature noise
CONVERGED_ERROR = 1e-12


@dataclass(frozen=True)
class Expansion:
    """Coefficients of a function in one of the supported systems.

    Ridge systems keep cosine-type coefficients in ``coeffs`` and sine-type
    ones in ``sin_coeffs``, keyed by canonical frequency tuples, plus the
    coefficient of the constant function.
    """

    basis: str
    n: int
    coeffs: CoeffSeq
    sin_coeffs: CoeffSeq | None = None
    constant: float = 0.0

    def __post_init__(self) -> None:
        if self.basis not in BASES:
            raise ValueError(f"Unknown basis {self.basis!r}. Available: {list(BASES)}")
        ridge = self.basis in RIDGE_BASES
        if ridge and self.sin_coeffs is None:
            raise ValueError(f"{self.basis} expansions need sine-type coefficients")
        if not ridge and (self.constant or self.sin_coeffs is not None):
            raise ValueError(f"{self.basis} has no constant or sine-type slot")

    @property
    def cutoff(self) -> int:
        return self.coeffs.cutoff

    def terms(self) -> list[tuple[str, object, float]]:
        """(slot, index, coefficient) for every non-zero coefficient."""
        out = [("cos" if self.basis in RIDGE_BASES else "", k, v) for k, v in self.coeffs.entries.items()]
        if self.sin_coeffs is not None:
            out += [("sin", k, v) for k, v in self.sin_coeffs.entries.items()]
        return out

    def energy(self, keep: Callable | None = None) -> float:
        values = [v for _, k, v in self.terms() if keep is None or keep(k)]
        return math.fsum(v * v for v in values) + self.constant ** 2

    def to_dict(self) -> dict:
        return {
            "schema": EXPANSION_SCHEMA,
            "basis": self.basis,
            "n": self.n,
            "constant": self.constant,
            "coeffs": self.coeffs.to_dict(),
            "sin_coeffs": None if self.sin_coeffs is None else self.sin_coeffs.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, allow_nan=False)

    @classmethod
    def from_dict(cls, data: dict) -> "Expansion":
        try:
            basis = data["basis"]
            sin = data.get("sin_coeffs")
            coeffs = CoeffSeq.from_dict(data["coeffs"])
            sin = None if sin is None else CoeffSeq.from_dict(sin)
            if basis in RIDGE_BASES:
                # univariate ridge frequencies are 1-tuples, not integers
                coeffs, sin = _tuple_keys(coeffs), _tuple_keys(sin)
            return cls(basis, int(data["n"]), coeffs, sin, float(data.get("constant", 0.0)))
        except (KeyError, TypeError) as e:
            raise ValueError(f"malformed expansion: {e}") from e


def _tuple_keys(seq: CoeffSeq | None) -> CoeffSeq | None:
    if seq is None:
        return None
    entries = {k if isinstance(k, tuple) else (k,): v for k, v in seq.entries.items()}
    return CoeffSeq(seq.dim, seq.cutoff, entries, seq.tail_bound)


def _tail(norm2_sq: float | None, captured: float) -> float:
    if norm2_sq is None:
        return math.inf
    return math.sqrt(max(norm2_sq - captured, 0.0))


def _check_dim(f: Evaluator, n: int) -> None:
    if f.n != n:
        raise ValueError(f"function {f.label} lives in dimension {f.n}, expected {n}")


# -- univariate -------------------------------------------------------------


def sine_coeffs(f: Evaluator, N: int) -> Expansion:
    """alpha_k = integral of f e_k over (0, 1), k = 1..N."""
    check_positive_int("N", N)
    _check_dim(f, 1)
    nodes, weights = gl_rule(f.axis_hints(), 1, 1.0 / (4 * max(N, f.scale)))
    fw = weights * f(nodes)
    k = np.arange(1, N + 1)
    alpha = SQRT2 * np.sin(np.pi * np.outer(k, nodes)) @ fw
    tail = _tail(f.norm2_sq, math.fsum(alpha * alpha))
    return Expansion("sine", 1, CoeffSeq(1, N, dict(zip(k.tolist(), alpha.tolist())), tail))


def to_hat_coeffs(expansion: Expansion) -> Expansion:
    """beta = tau^-1 * alpha, so that sum beta_j S_j has sine coefficients alpha up to the cutoff."""
    if expansion.basis != "sine":
        raise ValueError(f"to_hat_coeffs needs a sine expansion, got {expansion.basis}")
    N = expansion.cutoff
    beta = dirichlet_convolve_arrays(dirichlet_inverse_array(tau_array(N), N), expansion.coeffs.to_array(), N)
    return Expansion("hat", 1, CoeffSeq.from_array(beta))


def from_hat_coeffs(expansion: Expansion) -> Expansion:
    if expansion.basis != "hat":
        raise ValueError(f"from_hat_coeffs needs a hat expansion, got {expansion.basis}")
    N = expansion.cutoff
    alpha = dirichlet_convolve_arrays(tau_array(N), expansion.coeffs.to_array(), N)
    return Expansion("sine", 1, CoeffSeq.from_array(alpha))


# -- tensor -----------------------------------------------------------------


def tensor_sine_coeffs(f: Evaluator, n: int, N: int) -> Expansion:
    """alpha_m = integral of f e_m over (0, 1)^n for m in {1..N}^n."""
    check_positive_int("N", N)
    _check_dim(f, n)
    if n > 3:
        raise ValueError(f"tensor sine extraction supports n <= 3, got {n}")
    width = 1.0 / max(N, f.scale)
    rules = [gl_rule(f.axis_hints(i), 1, width) for i in range(n)]
    points = np.stack(np.meshgrid(*(r[0] for r in rules), indexing="ij"), axis=-1)
    values = f(points)
    for i, (_, w) in enumerate(rules):
        values = values * w.reshape((1,) * i + (-1,) + (1,) * (n - i - 1))

    m = np.arange(1, N + 1)
    for i, (nodes, _) in enumerate(rules):
        basis = SQRT2 * np.sin(np.pi * np.outer(m, nodes))
        values = np.moveaxis(np.tensordot(values, basis, axes=([i], [1])), -1, i)

    entries = {tuple(int(e) + 1 for e in idx): float(values[idx]) for idx in np.ndindex(values.shape)}
    tail = _tail(f.norm2_sq, math.fsum(v * v for v in entries.values()))
    return Expansion("tensor_sine", n, CoeffSeq(n, N, entries, tail))


def _tensor_array(expansion: Expansion) -> np.ndarray:
    N, n = expansion.cutoff, expansion.n
    values = np.zeros((N + 1,) * n)
    for m, v in expansion.coeffs.entries.items():
        values[m] = v
    return values


def _tensor_expansion(basis: str, n: int, N: int, values: np.ndarray) -> Expansion:
    entries = {
        idx: float(values[idx]) for idx in np.ndindex(values.shape) if min(idx) >= 1 and values[idx] != 0.0
    }
    return Expansion(basis, n, CoeffSeq(n, N, entries))


def tensor_hat_coeffs(expansion: Expansion) -> Expansion:
    """Axis-wise Dirichlet inversion of tensor sine coefficients."""
    if expansion.basis != "tensor_sine":
        raise ValueError(f"tensor_hat_coeffs needs a tensor_sine expansion, got {expansion.basis}")
    N = expansion.cutoff
    inverse = dirichlet_inverse_array(tau_array(N), N)
    return _tensor_expansion("tensor_hat", expansion.n, N, convolve_axes(_tensor_array(expansion), inverse))


def from_tensor_hat_coeffs(expansion: Expansion) -> Expansion:
    if expansion.basis != "tensor_hat":
        raise ValueError(f"from_tensor_hat_coeffs needs a tensor_hat expansion, got {expansion.basis}")
    N = expansion.cutoff
    return _tensor_expansion("tensor_sine", expansion.n, N, convolve_axes(_tensor_array(expansion), tau_array(N)))


# -- ridge ------------------------------------------------------------------


@dataclass
class _RidgeParts:
    constant: float = 0.0
    cos: dict = field(default_factory=dict)
    sin: dict = field(default_factory=dict)

    def add(self, other: "_RidgeParts") -> None:
        self.constant += other.constant
        for mine, theirs in ((self.cos, other.cos), (self.sin, other.sin)):
            for k, v in theirs.items():
                mine[k] = mine.get(k, 0.0) + v


def _line_coeffs(f: Evaluator, indices: list[FreqIndex]) -> _RidgeParts:
    """Exact reduction for f(x) = g(a p . x): p . x is uniform mod 1 for primitive p."""
    p, a = primitive_root(f.ridge)
    on_ray = [(k, primitive_root(k)[1]) for k in indices if parallel(k.entries, p.entries)]
    c_max = max((c for _, c in on_ray), default=1)
    hints = [(h + shift) / a for shift in range(a) for h in f.profile_hints]
    nodes, weights = gl_rule(hints, 1, 1.0 / (4 * max(a, c_max)))
    gw = weights * f.profile(a * nodes)
    parts = _RidgeParts(float(np.sum(gw)))
    for k, c in on_ray:
        phase = 2.0 * np.pi * c * nodes
        parts.cos[k.entries] = float(SQRT2 * np.cos(phase) @ gw)
        parts.sin[k.entries] = float(SQRT2 * np.sin(phase) @ gw)
    return parts


def _grid_coeffs(f: Evaluator, n: int, indices: list[FreqIndex], bound: int) -> _RidgeParts:
    if n > 3:
        raise ValueError(f"ridge extraction of a general function supports n <= 3, got {n}")
    points, weights = tensor_rule(n, DEFAULT_PANELS[n], f.hints or None, 1.0 / max(bound, f.scale))
    fw = weights * f(points)
    parts = _RidgeParts(float(np.sum(fw)))
    for start in range(0, len(indices), _RIDGE_CHUNK):
        chunk = indices[start : start + _RIDGE_CHUNK]
        phase = 2.0 * np.pi * points @ np.array([k.entries for k in chunk], dtype=float).T
        cos = SQRT2 * fw @ np.cos(phase)
        sin = SQRT2 * fw @ np.sin(phase)
        for k, c, s in zip(chunk, cos, sin):
            parts.cos[k.entries] = float(c)
            parts.sin[k.entries] = float(s)
    return parts


def _ridge_parts(f: Evaluator, n: int, indices: list[FreqIndex], bound: int) -> _RidgeParts:
    if f.parts:
        total = _RidgeParts()
        for part in f.parts:
            total.add(_ridge_parts(part, n, indices, bound))
        return total
    if f.ridge is not None:
        return _line_coeffs(f, indices)
    return _grid_coeffs(f, n, indices, bound)


def trig_ridge_coeffs(f: Evaluator, n: int, bound: int) -> Expansion:
    """Constant, sqrt(2) cos(2 pi k . x) and sqrt(2) sin(2 pi k . x) coefficients for ||k||_inf <= bound."""
    _check_dim(f, n)
    indices = ridge_indices(n, bound)
    parts = _ridge_parts(f, n, indices, bound)
    captured = parts.constant ** 2 + math.fsum(v * v for v in (*parts.cos.values(), *parts.sin.values()))
    tail = _tail(f.norm2_sq, captured)
    return Expansion(
        "trig_ridge",
        n,
        CoeffSeq(n, bound, parts.cos, tail),
        CoeffSeq(n, bound, parts.sin, tail),
        parts.constant,
    )


def _ray_map(seq: CoeffSeq, kind: str, inverse: bool, factor: float) -> CoeffSeq:
    keyed = {FreqIndex(k, canonical=True): factor * v for k, v in seq.entries.items()}
    mapped = ray_convolve(keyed, kind, inverse=inverse, bound=seq.cutoff)
    return CoeffSeq(seq.dim, seq.cutoff, {k.entries: v for k, v in mapped.items()})


def to_CS_coeffs(expansion: Expansion) -> Expansion:
    """Ray-wise inversion of the C/S Fourier weights; the constant passes through."""
    if expansion.basis != "trig_ridge":
        raise ValueError(f"to_CS_coeffs needs a trig_ridge expansion, got {expansion.basis}")
    return Expansion(
        "CS_ridge",
        expansion.n,
        _ray_map(expansion.coeffs, "cos", True, SQRT2),
        _ray_map(expansion.sin_coeffs, "sin", True, SQRT2),
        expansion.constant,
    )


def from_CS_coeffs(expansion: Expansion) -> Expansion:
    if expansion.basis != "CS_ridge":
        raise ValueError(f"from_CS_coeffs needs a CS_ridge expansion, got {expansion.basis}")
    return Expansion(
        "trig_ridge",
        expansion.n,
        _ray_map(expansion.coeffs, "cos", False, 1.0 / SQRT2),
        _ray_map(expansion.sin_coeffs, "sin", False, 1.0 / SQRT2),
        expansion.constant,
    )


# -- reconstruction and experiments ------------------------------------------


def _basis_value(basis: str, slot: str, index, x: np.ndarray) -> np.ndarray:
    if basis == "sine":
        return eval_trig("e_j", index, x)
    if basis == "hat":
        return eval_dilated("hat", index, x)
    if basis == "tensor_sine":
        return eval_trig("e_m_tensor", index, x)
    if basis == "tensor_hat":
        return eval_tensor("hat", index, x)
    if basis == "trig_ridge":
        return eval_trig("cos_ridge" if slot == "cos" else "sin_ridge", index, x)
    return eval_ridge("C" if slot == "cos" else "S", index, x)


def reconstruct(expansion: Expansion, points, keep: Callable | None = None) -> np.ndarray:
    """Partial sum of the expansion at the points; ``keep`` filters indices."""
    x = np.asarray(points, dtype=float)
    if expansion.n == 1 and expansion.basis not in RIDGE_BASES:
        shape = x.shape
    else:
        if x.shape[-1:] != (expansion.n,):
            raise ValueError(f"points must have trailing dimension {expansion.n}, got shape {x.shape}")
        shape = x.shape[:-1]
    total = np.full(shape, expansion.constant)
    for slot, index, value in expansion.terms():
        if keep is None or keep(index):
            total += value * _basis_value(expansion.basis, slot, index, x)
    return total


def expand(f: Evaluator, basis: str, cutoff: int) -> Expansion:
    """Coefficients of f in ``basis`` up to ``cutoff``."""
    if basis == "sine":
        return sine_coeffs(f, cutoff)
    if basis == "hat":
        return to_hat_coeffs(sine_coeffs(f, cutoff))
    if basis == "tensor_sine":
        return tensor_sine_coeffs(f, f.n, cutoff)
    if basis == "tensor_hat":
        return tensor_hat_coeffs(tensor_sine_coeffs(f, f.n, cutoff))
    if basis == "trig_ridge":
        return trig_ridge_coeffs(f, f.n, cutoff)
    if basis == "CS_ridge":
        return to_CS_coeffs(trig_ridge_coeffs(f, f.n, cutoff))
    raise ValueError(f"Unknown basis {basis!r}. Available: {list(BASES)}")


@dataclass(frozen=True)
class ConvergenceRow:
    stage: int
    cutoff: tuple[int, ...]
    terms: int
    error: float
    est_quadrature_error: float
    tail_l2: float
    square: bool = True


@dataclass(frozen=True)
class ConvergenceTable:
    label: str
    basis: str
    q: float
    ordering: str
    rows: tuple[ConvergenceRow, ...]

    def _main(self) -> list[ConvergenceRow]:
        return [r for r in self.rows if r.square]

    @property
    def strictly_decreasing(self) -> bool:
        main = self._main()
        return all(b.error < a.error or a.error <= CONVERGED_ERROR for a, b in zip(main, main[1:]))

    @property
    def rate(self) -> float:
        """Slope of log(error) against log(cutoff) over the square stages."""
        pts = [(max(r.cutoff), r.error) for r in self._main() if r.error > 0.0]
        if len(pts) < 2:
            return math.nan
        x, y = np.log([p[0] for p in pts]), np.log([p[1] for p in pts])
        return float(np.polyfit(x, y, 1)[0])

    def to_csv(self, path: str) -> str:
        header = ["stage", "cutoff", "terms", "error", "est_quadrature_error", "tail_l2"]
        rows = [
            (r.stage, "x".join(map(str, r.cutoff)), r.terms, r.error, r.est_quadrature_error, r.tail_l2)
            for r in self.rows
        ]
        return write_csv(path, header, rows)


def _check_schedule(schedule: Sequence[int]) -> list[int]:
    schedule = list(schedule)
    if not schedule:
        raise ValueError("schedule must not be empty")
    for s in schedule:
        check_positive_int("schedule entry", s)
    if any(a >= b for a, b in zip(schedule, schedule[1:])):
        raise ValueError(f"schedule must be strictly increasing, got {schedule}")
    return schedule


def _stages(basis: str, n: int, schedule: list[int], ordering: str, shapes) -> list[tuple[int, tuple, Callable, bool]]:
    """(stage, cutoff, keep, square) for every partial sum to measure."""
    if basis in ("sine", "hat"):
        return [(s, (s,), lambda k, s=s: k <= s, True) for s in schedule]
    if basis in RIDGE_BASES:
        if ordering != "pringsheim":
            logging.debug("Ridge partial sums use cubes ||k||_inf <= N; ordering %r ignored", ordering)
        return [(s, (s,) * n, lambda k, s=s: max(abs(e) for e in k) <= s, True) for s in schedule]
    if ordering == "square":
        order = [m.entries for m in square_order(n, max(schedule))]
        return [(s, (s,) * n, lambda m, head=frozenset(order[: s ** n]): m in head, True) for s in schedule]
    stages = []
    for rect in pringsheim_rectangles(n, schedule, shapes):
        for bound in rect.bounds:
            keep = lambda m, b=bound: all(mi <= bi for mi, bi in zip(m, b))  # noqa: E731
            stages.append((rect.min_side, bound, keep, bound == (rect.min_side,) * n))
    return stages


def _ridge_line(f: Evaluator, expansion: Expansion):
    """Direction p when f and every kept coefficient live on one primitive ray, else None."""
    if f.ridge is None:
        return None
    p, _ = primitive_root(f.ridge)
    if all(parallel(k, p.entries) for _, k, _ in expansion.terms()):
        return p
    return None


def _residual_norm(
    f: Evaluator, expansion: Expansion, keep: Callable, q: float, cutoff: int
) -> QuadResult:
    def residual(x: np.ndarray) -> np.ndarray:
        return f(x) - reconstruct(expansion, x, keep)

    if f.n == 1 and expansion.basis not in RIDGE_BASES:
        hints = set(f.axis_hints())
        if expansion.basis == "hat":
            for k in range(1, cutoff + 1):
                hints.update(float(h) for h in hat_kinks(k))
        return lq_norm(residual, q, sorted(hints), 1, 1.0 / (4 * max(cutoff, f.scale)))

    p = _ridge_line(f, expansion) if expansion.basis in RIDGE_BASES else None
    if p is not None:
        # everything is a function of t = p . x, uniform mod 1 on the cube
        _, a = primitive_root(f.ridge)
        line = np.array(p.entries, dtype=float) / float(np.dot(p.entries, p.entries))
        hints = {(h + shift) / a for shift in range(a) for h in f.profile_hints}
        if expansion.basis == "CS_ridge":
            for _, k, _ in expansion.terms():
                c = primitive_root(FreqIndex(k, canonical=True))[1]
                hints.update((i + 0.25 * j) / c for i in range(c) for j in range(4))

        def along(t: np.ndarray) -> np.ndarray:
            return residual(t[..., None] * line)

        return lq_norm(along, q, sorted(h for h in hints if 0.0 < h < 1.0), 1, 1.0 / (4 * max(cutoff, f.scale)))

    mode = "tensor_GL" if f.n <= 3 else "qmc"
    return lq_norm_multi(residual, q, f.n, mode, f.hints or None)


def convergence_experiment(
    f: Evaluator,
    basis: str,
    q: float,
    schedule: Sequence[int],
    ordering: str = "pringsheim",
    shapes: Sequence[Sequence[int]] = (),
) -> ConvergenceTable:
    """L_q errors of partial sums of f along a schedule of cutoffs."""
    if ordering not in ORDERINGS:
        raise ValueError(f"Unknown ordering {ordering!r}. Available: {list(ORDERINGS)}")
    schedule = _check_schedule(schedule)
    top = max([*schedule, *(max(s) for s in shapes)])
    expansion = expand(f, basis, top)
    stages = _stages(basis, f.n, schedule, ordering, shapes)

    def measure(stage) -> ConvergenceRow:
        s, cutoff, keep, square = stage
        result = _residual_norm(f, expansion, keep, q, max(cutoff))
        terms = sum(1 for _, k, _ in expansion.terms() if keep(k))
        tail = _tail(f.norm2_sq, expansion.energy(keep)) if basis in ORTHONORMAL else math.nan
        return ConvergenceRow(s, cutoff, terms, result.value, result.error, tail, square)

    rows = tuple(parallel_map(measure, stages))
    logging.debug("Convergence of %s in %s: %s", f.label, basis, [r.error for r in rows])
    return ConvergenceTable(f.label, basis, q, ordering, rows)
