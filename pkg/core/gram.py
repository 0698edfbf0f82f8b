import json
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from core.eigen import eigenvalues_sym
from core.filesystem import write_csv
from core.indices import as_freq, parallel, primitive_root
from core.pwl import SAWTOOTH, family_name
from core.transfer import riesz_constants_via_neumann
from core.utils import check_positive_int, odd_part, parallel_map, v2

ExactRational = Fraction

GRAM_SCHEMA = "gram/1"
RIESZ_SLACK = 1e-6


def ip_CC(j: int, k: int) -> Fraction:
    """<C_j, C_k> on (0, 1)."""
    check_positive_int("j", j)
    check_positive_int("k", k)
    if v2(j) != v2(k):
        return Fraction(0)
    g = math.gcd(j, k)
    return Fraction(g ** 4, 3 * j * j * k * k)


def ip_SS(j: int, k: int) -> Fraction:
    """<S_j, S_k>: |ip_CC|, negative iff (j + k) / (2 gcd) is even."""
    value = ip_CC(j, k)
    if value and ((j + k) // (2 * math.gcd(j, k))) % 2 == 0:
        return -value
    return value


def ip_CS(j: int, k: int) -> Fraction:
    check_positive_int("j", j)
    check_positive_int("k", k)
    return Fraction(0)


def ip(f1: str, j: int, f2: str, k: int) -> Fraction:
    """Inner product of two univariate sawtooth dilations."""
    f1, f2 = family_name(f1), family_name(f2)
    if f1 not in SAWTOOTH or f2 not in SAWTOOTH:
        raise ValueError(f"closed-form inner products cover {SAWTOOTH}, got {f1!r} and {f2!r}")
    if f1 != f2:
        return ip_CS(j, k)
    return ip_CC(j, k) if f1 == "C" else ip_SS(j, k)


def ridge_ip(f1: str, k, f2: str, l) -> Fraction:
    """<f1(k . x), f2(l . x)> on (0, 1)^n for canonical k and l.

    Parallel frequencies k = a p, l = b p reduce to the univariate <f1_a, f2_b>
    because p . x is uniform modulo 1 for primitive p; all others vanish.
    """
    k, l = as_freq(k), as_freq(l)
    if k.n != l.n:
        raise ValueError(f"frequency dimensions differ: {k.n} != {l.n}")
    if not (k.is_oriented() and l.is_oriented()):
        raise ValueError(f"ridge_ip needs canonical frequencies, got ({k}) and ({l})")
    if not parallel(k.entries, l.entries):
        return Fraction(0)
    _, a = primitive_root(k)
    _, b = primitive_root(l)
    return ip(f1, a, f2, b)


@dataclass(frozen=True)
class GramMatrix:
    """Normalised Gram matrix; ``entries`` holds Fractions when ``exact``."""

    labels: tuple[str, ...]
    entries: np.ndarray
    exact: bool

    @property
    def size(self) -> int:
        return len(self.labels)

    def to_float(self) -> np.ndarray:
        return self.entries.astype(float)

    def blocks(self) -> list[np.ndarray]:
        """Index sets of the connected components of the non-zero pattern."""
        pattern = csr_matrix(self.to_float() != 0.0)
        count, labels = connected_components(pattern, directed=False)
        return [np.flatnonzero(labels == c) for c in range(count)]

    def eigenvalues(self) -> np.ndarray:
        values = self.to_float()
        spectra = [eigenvalues_sym(values[np.ix_(block, block)]) for block in self.blocks()]
        return np.sort(np.concatenate(spectra)) if spectra else np.array([])

    def to_csv(self, path: str) -> str:
        values = self.to_float()
        rows, cols = np.nonzero(values)
        return write_csv(path, ["row", "col", "value"], [(r, c, values[r, c]) for r, c in zip(rows, cols)])

    def to_dict(self) -> dict:
        if self.exact:
            rows = [[[str(v.numerator), str(v.denominator)] for v in row] for row in self.entries]
        else:
            rows = self.entries.tolist()
        return {"schema": GRAM_SCHEMA, "labels": list(self.labels), "exact": self.exact, "entries": rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "GramMatrix":
        try:
            data = json.loads(text)
            if data.get("schema") != GRAM_SCHEMA:
                raise ValueError(f"unsupported schema {data.get('schema')!r}")
            labels = tuple(data["labels"])
            if data["exact"]:
                entries = np.array(
                    [[Fraction(int(num), int(den)) for num, den in row] for row in data["entries"]],
                    dtype=object,
                ).reshape(len(labels), len(labels))
            else:
                entries = np.array(data["entries"], dtype=float).reshape(len(labels), len(labels))
        except (json.JSONDecodeError, KeyError, TypeError, ZeroDivisionError) as e:
            raise ValueError(f"malformed Gram matrix JSON: {e}") from e
        return cls(labels, entries, bool(data["exact"]))


def _rational_sqrt(value: Fraction) -> Fraction | None:
    num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


def assemble(
    labels: Sequence[str],
    inner_product: Callable[[int, int], Fraction | float],
    exact: bool = True,
) -> GramMatrix:
    """Normalised Gram matrix <a, b> / (|a| |b|) of the elements 0..len(labels)-1."""
    size = len(labels)
    if size < 1:
        raise ValueError("a Gram matrix needs at least one element")

    def row(i: int) -> list:
        return [inner_product(i, j) for j in range(i, size)]

    upper = parallel_map(row, range(size))
    norms_sq = [upper[i][0] for i in range(size)]
    if any(v <= 0 for v in norms_sq):
        raise ValueError("basis elements must have positive norm")

    entries = np.empty((size, size), dtype=object if exact else float)
    for i in range(size):
        for offset, value in enumerate(upper[i]):
            j = i + offset
            entries[i, j] = entries[j, i] = _normalised(value, norms_sq[i], norms_sq[j], exact)
    logging.debug("Assembled %dx%d Gram matrix (exact=%s)", size, size, exact)
    return GramMatrix(tuple(labels), entries, exact)


def _normalised(value, na, nb, exact: bool):
    if value == 0:
        return Fraction(0) if exact else 0.0
    if not exact:
        return float(value) / math.sqrt(float(na) * float(nb))
    root = _rational_sqrt(Fraction(na) * Fraction(nb))
    if root is None:
        raise ValueError("norms do not give a rational normalisation; use exact=False")
    return Fraction(value) / root


def gram(system, params, exact: bool = True) -> GramMatrix:
    """Gram matrix of the elements a basis system lists for ``params``."""
    system.validate(params)
    elements = system.elements(params)
    return assemble(
        [str(e) for e in elements],
        lambda i, j: system.inner_product(elements[i], elements[j], exact),
        exact,
    )


def sawtooth_gram(family: str, N: int, exact: bool = True) -> GramMatrix:
    """Normalised Gram of {sqrt(3) family_j : j = 1..N}."""
    family = family_name(family)
    check_positive_int("N", N)
    return assemble(
        [f"{family}_{j}" for j in range(1, N + 1)],
        lambda i, j: ip(family, i + 1, family, j + 1),
        exact,
    )


@dataclass(frozen=True)
class BlockPartition:
    N: int
    blocks: tuple[tuple[int, ...], ...]


def block_partition(N: int) -> BlockPartition:
    """I^r = {j <= N : 2^r | j, 2^(r+1) does not divide j}, r = 0..floor(log2 N)."""
    check_positive_int("N", N)
    blocks: list[list[int]] = [[] for _ in range(N.bit_length())]
    for j in range(1, N + 1):
        blocks[v2(j)].append(j)
    return BlockPartition(N, tuple(tuple(b) for b in blocks))


def sign_diagonal(N: int) -> np.ndarray:
    """epsilon_j = +1 if the odd part of j is 1 mod 4, else -1."""
    check_positive_int("N", N)
    return np.array([1 if odd_part(j) % 4 == 1 else -1 for j in range(1, N + 1)], dtype=int)


@dataclass(frozen=True)
class SpectraReport:
    N: int
    identity_holds: bool
    max_gap: float
    tolerance: float

    @property
    def coincide(self) -> bool:
        return self.identity_holds and self.max_gap <= self.tolerance


def spectra_coincide(N: int, tol: float = 1e-10, check_identity: bool = True) -> SpectraReport:
    """Compare the spectra of the C and S Gram matrices and check G^S = D G^C D."""
    exact = check_identity
    g_c = sawtooth_gram("C", N, exact)
    g_s = sawtooth_gram("S", N, exact)
    identity = True
    if check_identity:
        d = sign_diagonal(N)
        identity = bool(np.all(g_s.entries == (d[:, None] * g_c.entries) * d[None, :]))

    gap = 0.0
    for block in block_partition(N).blocks:
        idx = np.array(block) - 1
        ev_c = eigenvalues_sym(g_c.to_float()[np.ix_(idx, idx)])
        ev_s = eigenvalues_sym(g_s.to_float()[np.ix_(idx, idx)])
        gap = max(gap, float(np.max(np.abs(ev_c - ev_s))))
    logging.debug("Spectra for N=%d: max gap %.3e, identity %s", N, gap, identity)
    return SpectraReport(N, identity, gap, tol)


@dataclass(frozen=True)
class RieszBounds:
    lambda_min: float
    lambda_max: float
    A: float
    B: float

    @property
    def inside(self) -> bool:
        return self.A - RIESZ_SLACK <= self.lambda_min and self.lambda_max <= self.B + RIESZ_SLACK


def spectral_bounds(matrix: GramMatrix) -> RieszBounds:
    eigenvalues = matrix.eigenvalues()
    A, B = riesz_constants_via_neumann("hat_1d")
    return RieszBounds(float(eigenvalues[0]), float(eigenvalues[-1]), A, B)


def riesz_bounds(system, params) -> RieszBounds:
    """Extreme eigenvalues of a truncated normalised Gram matrix."""
    return spectral_bounds(gram(system, params, exact=False))
