"""Brute-force check of the EEWF optimum on small spectra.

The receive-power constraint is a simplex in q = lambda * p, so the oracle
enumerates a uniform grid on {q >= 0, sum q = P_r}, keeps the best point and
then polishes it with pairwise mass transfers, halving the step 20 times.
It shares no code with the solver beyond numpy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, UnsupportedDimensionError

MAX_DIM = 4


@dataclass(frozen=True)
class OracleResult:
    p: np.ndarray
    eta: float
    grid_resolution: int


def _objective(q: np.ndarray, lam: np.ndarray, sigma2: float) -> np.ndarray:
    # q has shape (..., n); rows with zero transmit power never occur since sum q = P_r > 0
    r = np.log2(1.0 + q / sigma2).sum(axis=-1)
    return r / (q / lam).sum(axis=-1)


def _simplex_grid(n: int, resolution: int) -> np.ndarray:
    """All integer compositions of ``resolution`` into n nonnegative parts, lexicographic."""
    if n == 1:
        return np.array([[resolution]])
    bars = np.array(list(itertools.combinations(range(resolution + n - 1), n - 1)))
    edges = np.column_stack([np.full(len(bars), -1), bars, np.full(len(bars), resolution + n - 1)])
    return np.diff(edges, axis=1) - 1


def _refine(q: np.ndarray, lam: np.ndarray, sigma2: float, step: float, halvings: int = 20) -> np.ndarray:
    n = q.size
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    best = _objective(q, lam, sigma2)
    h = step
    for _ in range(halvings + 1):
        while True:
            cand = np.repeat(q[None, :], len(pairs), axis=0)
            for k, (i, j) in enumerate(pairs):
                move = min(h, q[j])
                cand[k, i] += move
                cand[k, j] -= move
            vals = _objective(cand, lam, sigma2)
            k = int(np.argmax(vals))
            if vals[k] <= best:
                break
            q, best = cand[k], vals[k]
        h *= 0.5
    return q


def simplex_grid_search(lambdas, p_r: float, sigma2: float, resolution: int = 100) -> OracleResult:
    """Best energy efficiency over a uniform grid of the receive-power simplex.

    Zero eigenvalues get no power. At most four positive eigenvalues.
    """
    lam = np.asarray(lambdas, dtype=float).ravel()
    pos = lam > 0
    n = int(pos.sum())
    if n == 0:
        raise InvalidInputError("no positive eigenvalue")
    if n > MAX_DIM:
        raise UnsupportedDimensionError(f"oracle supports at most {MAX_DIM} active channels, got {n}")
    if resolution < 100:
        raise InvalidInputError(f"resolution must be >= 100, got {resolution}")
    lp = lam[pos]
    grid = _simplex_grid(n, resolution) * (p_r / resolution)
    vals = _objective(grid, lp, sigma2)
    # ties broken lexicographically on q: the first maximum in sorted grid order
    q = grid[int(np.argmax(vals))].astype(float)
    if n > 1:
        q = _refine(q, lp, sigma2, p_r / resolution)
        q *= p_r / q.sum()
    p = np.zeros_like(lam)
    p[pos] = q / lp
    return OracleResult(p, float(_objective(q, lp, sigma2)), resolution)
