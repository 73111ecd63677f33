"""Energy-efficient water-filling (EEWF) under a total receive-power constraint.

Problem, over the eigenmodes of a channel with gains ``lambda_i``::

    maximize   sum_i log2(1 + lambda_i p_i / sigma^2) / sum_i p_i
    subject to sum_i lambda_i p_i = P_r,  p >= 0.

The optimum is a water-filling allocation

    p_i = ( 1 / (ln2 (eta - mu P_t lambda_i)) - sigma^2 / lambda_i )^+

whose efficiency ``eta``, transmit power ``P_t`` and multiplier ``mu`` are
coupled. The coupling is resolved with a Dinkelbach loop on ``eta``: for a
fixed ``eta`` the remaining problem (maximize rate - eta * power on the
constraint set) is concave, and its multiplier comes from the root of the
rational equation in :mod:`eewf.multiplier`. Channels whose level clamps to
zero leave the active set and the root is re-solved until the set is stable.

All of the heavy lifting is written for a batch of spectra, shape (T, N).
Every row is processed independently, so a row's result does not depend on
which other rows share its batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import EigenSpectrum, clamp_rank
from .errors import (
    ConvergenceError,
    DegenerateChannelError,
    InfeasibleMultiplierError,
    InvalidInputError,
    NonpositiveMultiplierError,
    UndefinedEfficiencyError,
)
from .multiplier import LN2, bisect_roots

OK = 0
NOT_CONVERGED = 1
NONPOSITIVE_MU = 2
DEGENERATE = 3

STATUS_NAMES = {OK: "ok", NOT_CONVERGED: "not-converged", NONPOSITIVE_MU: "nonpositive-mu", DEGENERATE: "degenerate"}


@dataclass(frozen=True)
class SolveSettings:
    eta_tol: float = 1e-10
    max_outer: int = 200
    root_tol: float = 1e-12
    sigma2: float = 1.0
    p_r: float = 1.0

    def __post_init__(self):
        for name in ("eta_tol", "root_tol", "sigma2", "p_r"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise InvalidInputError(f"{name} must be a positive finite number, got {v!r}")
        if int(self.max_outer) != self.max_outer or self.max_outer < 1:
            raise InvalidInputError(f"max_outer must be an integer >= 1, got {self.max_outer!r}")

    def replace(self, **changes) -> "SolveSettings":
        kw = {k: getattr(self, k) for k in self.__dataclass_fields__}
        kw.update(changes)
        return SolveSettings(**kw)


@dataclass(frozen=True)
class EewfSolution:
    p: np.ndarray
    mu: float
    eta: float
    rate: float
    ptx: float
    active: int
    iterations: int
    x: float = math.nan

    @property
    def mu_pt(self) -> float:
        return self.mu * self.ptx


# --- scalar building blocks ---------------------------------------------------


def rate(lambdas, p, sigma2: float) -> float:
    """Transmission rate sum log2(1 + lambda_i p_i / sigma^2), bit/s/Hz."""
    lam = np.asarray(lambdas, dtype=float)
    p = np.asarray(p, dtype=float)
    if lam.shape != p.shape:
        raise InvalidInputError(f"length mismatch: {lam.shape} vs {p.shape}")
    if np.any(p < 0):
        raise InvalidInputError("allocation must be nonnegative")
    if not sigma2 > 0:
        raise InvalidInputError("sigma2 must be positive")
    return float(np.sum(np.log1p(lam * p / sigma2)) / LN2)


def energy_efficiency(rate_val: float, ptx_val: float) -> float:
    if ptx_val == 0:
        raise UndefinedEfficiencyError("energy efficiency is undefined at zero transmit power")
    if ptx_val < 0:
        raise InvalidInputError(f"transmit power must be positive, got {ptx_val}")
    return rate_val / ptx_val


def allocation_from_levels(lambdas_active, eta: float, mu_pt: float, sigma2: float) -> np.ndarray:
    """Per-channel power from the water levels 1 / (ln2 (eta - mu P_t lambda_i))."""
    lam = np.asarray(lambdas_active, dtype=float)
    denom = eta - mu_pt * lam
    if np.any(denom <= 0):
        raise InfeasibleMultiplierError(
            f"nonpositive water-level denominator eta - mu*P_t*lambda = {denom.min():.3e}"
        )
    return _positive_part(1.0 / (LN2 * denom) - sigma2 / lam)


def _positive_part(v):
    return np.maximum(v, 0.0)


# --- batch solver -------------------------------------------------------------


@dataclass
class BatchSolution:
    """Row-aligned results for a batch of spectra; ``status`` is 0 where the row solved."""

    p: np.ndarray
    q: np.ndarray
    x: np.ndarray
    mu: np.ndarray
    eta: np.ndarray
    rate: np.ndarray
    ptx: np.ndarray
    active: np.ndarray
    iterations: np.ndarray
    status: np.ndarray = field(repr=False)

    @property
    def ok(self) -> np.ndarray:
        return self.status == OK

    def row(self, i: int) -> EewfSolution:
        return EewfSolution(
            p=self.p[i].copy(),
            mu=float(self.mu[i]),
            eta=float(self.eta[i]),
            rate=float(self.rate[i]),
            ptx=float(self.ptx[i]),
            active=int(self.active[i]),
            iterations=int(self.iterations[i]),
            x=float(self.x[i]),
        )


def _fixed_eta_step(lam, pos, theta, sigma2, p_r, root_tol):
    """Maximize rate - theta * power on the receive-power set, rows independently.

    Returns receive powers q = lambda * p, the root x, the active mask and
    S = n sigma^2 + P_r for the final active set.
    """
    safe = np.where(pos, lam, 1.0)
    active = pos.copy()
    while True:
        n = active.sum(axis=1)
        s = n * sigma2 + p_r
        alpha = np.where(active, LN2 * theta[:, None] * s[:, None] / safe, np.inf)
        x = bisect_roots(alpha, active, root_tol)
        q_raw = np.where(active, s[:, None] / (alpha - x[:, None]) - sigma2, 0.0)
        q = _positive_part(q_raw)
        drop = active & ~(q > 0)
        if not drop.any():
            return q, x, active, s
        active &= ~drop


def _rate_rows(q, sigma2):
    return np.sum(np.log1p(q / sigma2), axis=1) / LN2


def solve_eewf_batch(lambdas, settings: SolveSettings) -> BatchSolution:
    """Solve many spectra at once. Rows must be sorted nonincreasing and clamped."""
    lam = np.atleast_2d(np.asarray(lambdas, dtype=float))
    T, N = lam.shape
    sigma2, p_r = float(settings.sigma2), float(settings.p_r)
    pos = lam > 0
    npos = pos.sum(axis=1)
    safe = np.where(pos, lam, 1.0)
    status = np.where(npos == 0, DEGENERATE, OK)
    live = npos > 0

    # start from equal receive power on every positive channel
    q = np.where(pos, p_r / np.maximum(npos, 1)[:, None], 0.0)
    p = np.where(pos, q / safe, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        eta = _rate_rows(q, sigma2) / p.sum(axis=1)
    x = np.full(T, np.nan)
    iterations = np.zeros(T, dtype=int)
    within = np.zeros(T, dtype=bool)

    # one positive eigenvalue: channel inversion is exact, no iteration needed
    todo = live & (npos > 1)
    for _ in range(int(settings.max_outer)):
        idx = np.flatnonzero(todo)
        if idx.size == 0:
            break
        qi, xi, act, _ = _fixed_eta_step(lam[idx], pos[idx], eta[idx], sigma2, p_r, settings.root_tol)
        pi = np.where(act, qi / safe[idx], 0.0)
        eta_new = _rate_rows(qi, sigma2) / pi.sum(axis=1)
        close = np.abs(eta_new - eta[idx]) <= settings.eta_tol * eta[idx]
        # one extra step once within tolerance: convergence is superlinear, so
        # it brings eta to roundoff level at the cost of a single inner solve
        done = close & within[idx]
        within[idx] = close
        q[idx], p[idx], x[idx] = qi, pi, xi
        eta[idx] = eta_new
        iterations[idx] += 1
        todo[idx[done]] = False
    status = np.where(todo, NOT_CONVERGED, status)

    rate_v = _rate_rows(q, sigma2)
    ptx = p.sum(axis=1)
    n_act = (p > 0).sum(axis=1)
    s = n_act * sigma2 + p_r
    with np.errstate(divide="ignore", invalid="ignore"):
        eta = rate_v / ptx
        siso = live & (npos == 1)
        x = np.where(siso, LN2 * eta * s / lam[:, 0] - 1.0, x)
        mu = x / (LN2 * ptx * s)
    status = np.where((status == OK) & ~(mu > 0), NONPOSITIVE_MU, status)
    return BatchSolution(p, q, x, mu, eta, rate_v, ptx, n_act, iterations, status)


def _as_lambdas(spectrum) -> np.ndarray:
    if isinstance(spectrum, EigenSpectrum):
        return clamp_rank(spectrum.lambdas)
    lam = np.asarray(spectrum, dtype=float).ravel()
    if lam.size == 0 or np.any(lam < 0) or not np.all(np.isfinite(lam)):
        raise InvalidInputError("eigenvalues must be a nonempty vector of finite nonnegative reals")
    return clamp_rank(lam)


def solve_eewf(spectrum, settings: SolveSettings | None = None) -> EewfSolution:
    """Energy-efficiency maximizing allocation for one eigenvalue spectrum.

    ``p`` is returned in the spectrum's nonincreasing eigenvalue order.
    """
    settings = settings or SolveSettings()
    lam = _as_lambdas(spectrum)
    res = solve_eewf_batch(lam[None, :], settings)
    st = int(res.status[0])
    if st == DEGENERATE:
        raise DegenerateChannelError("spectrum has no positive eigenvalue")
    sol = res.row(0)
    if st == NOT_CONVERGED:
        raise ConvergenceError(
            f"no convergence within {settings.max_outer} outer iterations (eta={sol.eta:.12g})",
            last_iterate=sol,
        )
    if st == NONPOSITIVE_MU:
        raise NonpositiveMultiplierError(
            f"converged multiplier mu={sol.mu:.3e} is not positive (root x={sol.x:.3e})",
            mu=sol.mu,
            x=sol.x,
        )
    return sol


def kkt_residual(solution: EewfSolution, lambdas, settings: SolveSettings) -> float:
    """Relative KKT violation of an allocation with its multiplier.

    Active channels: |marginal rate - (eta - mu P_t lambda_i)| / eta.
    Inactive channels: positive part of the same difference at p_i = 0.
    Returns the sum of the two maxima; zero certifies a KKT point.
    """
    lam = np.asarray(lambdas, dtype=float)
    p = np.asarray(solution.p, dtype=float)
    sigma2 = settings.sigma2
    q = lam * p
    ptx = p.sum()
    eta = float(np.sum(np.log1p(q / sigma2)) / LN2) / ptx
    marginal = lam / (LN2 * (sigma2 + q))
    level = eta - solution.mu * ptx * lam
    act = p > 0
    inact = ~act & (lam > 0)
    stat = np.max(np.abs(marginal[act] - level[act]), initial=0.0) / eta
    sign = np.max(np.maximum(marginal[inact] - level[inact], 0.0), initial=0.0) / eta
    return float(stat + sign)
