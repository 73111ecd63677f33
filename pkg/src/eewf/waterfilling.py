"""Capacity-achieving water-filling under a total transmit-power constraint."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import clamp_rank, rayleigh_batch, spectra_from_matrices
from .errors import DegenerateChannelError, InvalidInputError
from .multiplier import LN2

_BISECT_ITERS = 100


@dataclass(frozen=True)
class WfSolution:
    p: np.ndarray
    water_level: float
    capacity: float
    ptx: float
    prx: float
    active: int


@dataclass
class WfBatch:
    p: np.ndarray
    water_level: np.ndarray
    capacity: np.ndarray
    ptx: np.ndarray
    prx: np.ndarray
    active: np.ndarray
    ok: np.ndarray


def solve_wf_batch(lambdas, p_t, sigma2: float) -> WfBatch:
    """Row-wise water-filling; ``p_t`` may be a scalar or one budget per row.

    The water level is bracketed by [min floor, min floor + P_t] and bisected;
    the level is then recomputed exactly from the located active set so that
    the budget is met to roundoff.
    """
    lam = np.atleast_2d(np.asarray(lambdas, dtype=float))
    T, _ = lam.shape
    p_t = np.broadcast_to(np.asarray(p_t, dtype=float), (T,))
    pos = lam > 0
    ok = pos.any(axis=1)
    with np.errstate(divide="ignore"):
        floor = np.where(pos, sigma2 / np.where(pos, lam, 1.0), np.inf)
    fmin = np.where(ok, floor.min(axis=1), 0.0)
    lo, hi = fmin, fmin + p_t
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        spent = np.maximum(mid[:, None] - floor, 0.0).sum(axis=1)
        over = spent > p_t
        hi = np.where(over, mid, hi)
        lo = np.where(over, lo, mid)
    w = 0.5 * (lo + hi)
    active = floor < w[:, None]
    k = active.sum(axis=1)
    w = (p_t + np.where(active, floor, 0.0).sum(axis=1)) / np.maximum(k, 1)
    p = np.where(active, np.maximum(w[:, None] - floor, 0.0), 0.0)
    cap = np.sum(np.log1p(lam * p / sigma2), axis=1) / LN2
    return WfBatch(p, w, cap, p.sum(axis=1), (lam * p).sum(axis=1), (p > 0).sum(axis=1), ok)


def solve_wf(spectrum, p_t: float, sigma2: float) -> WfSolution:
    """Water-filling allocation maximizing sum log2(1 + lambda_i p_i / sigma^2) at sum p_i = P_t."""
    lam = getattr(spectrum, "lambdas", spectrum)
    lam = clamp_rank(np.asarray(lam, dtype=float).ravel())
    if not p_t > 0:
        raise InvalidInputError(f"transmit power must be positive, got {p_t}")
    if not sigma2 > 0:
        raise InvalidInputError(f"sigma2 must be positive, got {sigma2}")
    if not np.any(lam > 0):
        raise DegenerateChannelError("spectrum has no positive eigenvalue")
    b = solve_wf_batch(lam[None, :], p_t, sigma2)
    return WfSolution(
        p=b.p[0],
        water_level=float(b.water_level[0]),
        capacity=float(b.capacity[0]),
        ptx=float(b.ptx[0]),
        prx=float(b.prx[0]),
        active=int(b.active[0]),
    )


def ergodic_capacity(n: int, p_t: float, sigma2: float, trials: int, seed: int) -> float:
    """Sample mean of the per-realization water-filling capacity over Rayleigh channels."""
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    lam = spectra_from_matrices(rayleigh_batch(n, seed, range(trials)))
    cap = solve_wf_batch(lam, p_t, sigma2).capacity
    return math.fsum(cap.tolist()) / cap.size
