import logging
import math

import numpy as np

MAX_SWEEPS = 30


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings of 0..n-1 into disjoint (p, q) pairs, every pair exactly once per sweep."""
    players = list(range(n + (n % 2)))
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        if pairs:
            p, q = zip(*pairs)
            rounds.append((np.array(p), np.array(q)))
        players = [players[0], players[-1], *players[1:-1]]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    return math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))


def eigenvalues_sym(matrix, tol: float = 1e-14, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """All eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the n/2 rotations of a round act on disjoint rows and columns and are
    applied together. Stops once the off-diagonal Frobenius norm falls below
    ``tol * ||M||_F``.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    scale = float(np.linalg.norm(a))
    if n == 0:
        return np.array([])
    if np.linalg.norm(a - a.T) > 1e-12 * max(scale, 1e-300):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    if n == 1 or scale == 0.0:
        return np.sort(np.diag(a))

    rounds = _round_robin(n)
    for sweep in range(1, max_sweeps + 1):
        if _off_norm(a) <= tol * scale:
            logging.debug("Jacobi converged after %d sweeps (n=%d)", sweep - 1, n)
            return np.sort(np.diag(a))
        for p, q in rounds:
            app, aqq, apq = a[p, p], a[q, q], a[p, q]
            active = apq != 0.0
            with np.errstate(divide="ignore", invalid="ignore"):
                theta = np.where(active, (aqq - app) / (2.0 * apq), 0.0)
            t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.hypot(t, 1.0)
            s = t * c

            col_p, col_q = a[:, p].copy(), a[:, q].copy()
            a[:, p] = col_p * c - col_q * s
            a[:, q] = col_p * s + col_q * c
            row_p, row_q = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * row_p - s[:, None] * row_q
            a[q, :] = s[:, None] * row_p + c[:, None] * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0
    if _off_norm(a) <= tol * scale:
        return np.sort(np.diag(a))
    raise RuntimeError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps (n={n})")
