"""Exact EEWF solutions for the isotropic, rank-1 and SISO channels,
their large-array limits, the SISO fading bounds and the inequality chain
behind those bounds.

Static spectra are normalized so that sum(lambda) = N^2: isotropic means
lambda_i = N, rank-1 means lambda_1 = N^2 and the rest zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, InvalidInputError

LN2 = math.log(2.0)


class Family(str, enum.Enum):
    ISOTROPIC = "Isotropic"
    RANK1 = "Rank1"
    SISO = "Siso"


@dataclass(frozen=True)
class ClosedFormSolution:
    p_per_channel: float
    eta: float
    rate: float
    ptx: float
    family: Family


def _check(n, p_r, sigma2):
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    if not (p_r > 0 and sigma2 > 0):
        raise InvalidInputError("p_r and sigma2 must be positive")


def isotropic_eewf(n: int, p_r: float, sigma2: float) -> ClosedFormSolution:
    _check(n, p_r, sigma2)
    r = n * math.log2(1.0 + p_r / (sigma2 * n))
    return ClosedFormSolution(p_r / n**2, n**2 / p_r * math.log2(1.0 + p_r / (sigma2 * n)), r, p_r / n, Family.ISOTROPIC)


def rank1_eewf(n: int, p_r: float, sigma2: float) -> ClosedFormSolution:
    _check(n, p_r, sigma2)
    r = math.log2(1.0 + p_r / sigma2)
    return ClosedFormSolution(p_r / n**2, n**2 / p_r * r, r, p_r / n**2, Family.RANK1)


def siso_eewf(lambda1: float, p_r: float, sigma2: float) -> ClosedFormSolution:
    """Single channel: the receive constraint forces channel inversion p = P_r / lambda."""
    if not lambda1 > 0:
        raise InvalidInputError("channel gain must be positive")
    _check(1, p_r, sigma2)
    r = math.log2(1.0 + p_r / sigma2)
    return ClosedFormSolution(p_r / lambda1, lambda1 * r / p_r, r, p_r / lambda1, Family.SISO)


# Shannon-matching transmit budgets: WF at these budgets reaches the EEWF rate.


def siso_matching_ptx(lambda1: float, p_r: float) -> float:
    return p_r / lambda1


def isotropic_matching_ptx(n: int, p_r: float) -> float:
    return p_r / n


def rank1_matching_ptx(n: int, p_r: float) -> float:
    return p_r / n**2


# Large-array limits. Power and per-channel allocation go to 0, efficiency to infinity.


def isotropic_rate_limit(p_r: float, sigma2: float) -> float:
    return p_r / (LN2 * sigma2)


def rank1_rate_limit(p_r: float, sigma2: float) -> float:
    return math.log2(1.0 + p_r / sigma2)


def transmit_power_limit() -> float:
    return 0.0


def efficiency_limit() -> float:
    return math.inf


# --- SISO fading bounds -------------------------------------------------------


def _check_inv_mean(inv_lambda_mean):
    if not (inv_lambda_mean >= 1 and math.isfinite(inv_lambda_mean)):
        raise DomainError(f"<1/lambda> must lie in [1, inf), got {inv_lambda_mean}")


def siso_rate_ratio_bounds(inv_lambda_mean: float) -> tuple[float, float]:
    """Bounds on R^a / C_e under the equal-SNR budget P_t = <1/lambda> P_r."""
    _check_inv_mean(inv_lambda_mean)
    return 1.0 / inv_lambda_mean, 1.0


def siso_efficiency_ratio_bounds(inv_lambda_mean: float) -> tuple[float, float]:
    """Bounds on eta^a / eta^a_Ce, with <lambda> = 1."""
    _check_inv_mean(inv_lambda_mean)
    return 1.0, float(inv_lambda_mean)


def siso_rate_ratio(lambdas, gamma: float) -> float:
    """R^a / C_e on a sample: log2(1 + gamma/<1/lambda>) / <log2(1 + lambda gamma)>."""
    lam = np.asarray(lambdas, dtype=float)
    inv = float(np.mean(1.0 / lam))
    return math.log2(1.0 + gamma / inv) / float(np.mean(np.log2(1.0 + lam * gamma)))


# --- inequality validators ----------------------------------------------------


class HmChain(NamedTuple):
    holds: bool
    slack: float
    hm_gm_slack: float
    mahler_slack: float


class BernoulliJensen(NamedTuple):
    holds: bool
    bernoulli_slack: float
    jensen_slack: float


def _validate(lambdas, gamma):
    lam = np.asarray(lambdas, dtype=float).ravel()
    if lam.size == 0 or np.any(lam <= 0) or not gamma > 0:
        raise InvalidInputError("need positive eigenvalues and gamma > 0")
    return lam


def check_hm_logsum_inequality(lambdas, gamma: float, tol: float = 1e-12) -> HmChain:
    """log2(1 + n / sum 1/(lambda gamma)) <= mean log2(1 + lambda gamma).

    Goes through harmonic <= geometric mean of lambda*gamma, then
    1 + GM(x) <= GM(1 + x). ``slack`` is right side minus left side; the two
    step slacks are in log2 units as well. ``tol`` absorbs roundoff.
    """
    lam = _validate(lambdas, gamma)
    n = lam.size
    x = lam * gamma
    hm = n / np.sum(1.0 / x)
    log_gm = float(np.mean(np.log(x)))
    left = math.log1p(hm) / LN2
    middle = math.log1p(math.exp(log_gm)) / LN2
    right = float(np.mean(np.log1p(x))) / LN2
    s1, s2 = middle - left, right - middle
    scale = tol * max(1.0, abs(right))
    holds = s1 >= -scale and s2 >= -scale
    return HmChain(holds, right - left, s1, s2)


def check_bernoulli_jensen_bounds(lambdas, gamma: float, tol: float = 1e-12) -> BernoulliJensen:
    """Bernoulli: log2(1 + gamma/<1/lambda>) >= log2(1 + gamma)/<1/lambda>.
    Jensen: <log2(1 + lambda gamma)> <= log2(1 + <lambda> gamma).
    """
    lam = _validate(lambdas, gamma)
    inv = float(np.mean(1.0 / lam))
    if inv < 1.0 - 1e-12:
        raise DomainError(f"sample <1/lambda> = {inv} < 1")
    bern = (math.log1p(gamma / inv) - math.log1p(gamma) / inv) / LN2
    jensen = (math.log1p(float(np.mean(lam)) * gamma) - float(np.mean(np.log1p(lam * gamma)))) / LN2
    scale = tol * max(1.0, math.log2(1.0 + gamma))
    return BernoulliJensen(bern >= -scale and jensen >= -scale, bern, jensen)
