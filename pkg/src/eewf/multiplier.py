"""Receive-power multiplier for the energy-efficient water-filling.

With the active set fixed, the receive-power constraint collapses to

    sum_i 1 / (x - alpha_i) = -1,    alpha_i = ln2 * eta * (n sigma^2 + P_r) / lambda_i,

and the multiplier follows from ``mu = x / (ln2 * P_t * (n sigma^2 + P_r))``.
The feasible root is the one below ``min(alpha)``: there every water-level
denominator ``alpha_i - x`` is positive. It is located by bisection on

    g(x) = sum_i 1 / (alpha_i - x) - 1,

which is strictly increasing there. Since every term is at most 1/(min alpha - x),
the root always lies in ``[min alpha - n, min alpha - 1]``.

The equivalent monic polynomial (clearing denominators) is kept as an
independent cross-check; its other n - 1 real roots sit between consecutive
alphas and make at least one water level negative.
"""

from __future__ import annotations

import math
import warnings
from typing import NamedTuple

import numpy as np

from .errors import (
    InvalidActiveSetError,
    InvalidInputError,
    NonpositiveMultiplierWarning,
    RootBracketingError,
)

LN2 = math.log(2.0)


def alpha_coefficients(lambdas_active, eta: float, sigma2: float, p_r: float) -> np.ndarray:
    lam = np.asarray(lambdas_active, dtype=float)
    if lam.size == 0:
        raise InvalidActiveSetError("empty active set")
    if np.any(lam <= 0):
        raise InvalidActiveSetError("active set contains a zero-gain channel")
    if not eta > 0:
        raise InvalidInputError(f"eta must be positive, got {eta}")
    n = lam.size
    return LN2 * eta * (n * sigma2 + p_r) / lam


def _poly_mul_linear(coeffs: np.ndarray, root: float) -> np.ndarray:
    # coeffs in ascending order; returns coeffs of coeffs(x) * (x - root)
    out = np.zeros(coeffs.size + 1)
    out[1:] += coeffs
    out[:-1] -= root * coeffs
    return out


def _product_coeffs(alphas) -> np.ndarray:
    """Ascending coefficients of prod (x - alpha_i), i.e. signed elementary symmetric sums."""
    c = np.array([1.0])
    for a in alphas:
        c = _poly_mul_linear(c, a)
    return c


def mu_polynomial_coefficients(alphas) -> np.ndarray:
    """Ascending coefficients c_0..c_n of prod(x - a_i) + sum_i prod_{j != i}(x - a_j).

    c_n is 1. Each leave-one-out product is expanded the same way as the full
    product, by incremental multiplication with linear factors.
    """
    a = np.asarray(alphas, dtype=float).ravel()
    if a.size == 0:
        raise InvalidInputError("alphas must be nonempty")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("alphas must be finite")
    c = _product_coeffs(a)
    for i in range(a.size):
        b = _product_coeffs(np.delete(a, i))
        c[: b.size] += b
    return c


def polynomial_real_roots(alphas, polish: int = 3) -> np.ndarray:
    """Real roots of the multiplier polynomial (companion matrix + Newton polish)."""
    c = mu_polynomial_coefficients(alphas)
    roots = np.roots(c[::-1])
    real = roots[np.abs(roots.imag) <= 1e-7 * np.maximum(1.0, np.abs(roots.real))].real
    desc = c[::-1]
    d_desc = np.polyder(desc)
    for _ in range(polish):
        f = np.polyval(desc, real)
        df = np.polyval(d_desc, real)
        step = np.divide(f, df, out=np.zeros_like(f), where=df != 0)
        real = real - step
    return np.sort(real)


def g_bracket(alphas, x) -> float:
    """g(x) = sum 1/(alpha_i - x) - 1 (strictly increasing below min alpha)."""
    a = np.asarray(alphas, dtype=float)
    return float(np.sum(1.0 / (a - x)) - 1.0)


def bisection_iterations(n: int, root_tol: float) -> int:
    # the bracket has width n - 1; a fixed count keeps batch rows independent
    width = max(n - 1, 1)
    return max(1, int(math.ceil(math.log2(width / root_tol))) + 1)


def bisect_roots(alphas: np.ndarray, active: np.ndarray, root_tol: float = 1e-12) -> np.ndarray:
    """Row-wise bisection for the feasible root; ``alphas`` has shape (T, N).

    Inactive entries are ignored. Each row's result depends on that row only.
    """
    a = np.where(active, alphas, np.inf)
    n = active.sum(axis=1)
    amin = a.min(axis=1)
    lo = amin - n
    hi = amin - 1.0
    if not (np.all(np.isfinite(lo)) and np.all(n >= 1)):
        raise RootBracketingError("no finite bracket: empty active set or non-finite alpha")
    for _ in range(bisection_iterations(alphas.shape[1], root_tol)):
        mid = 0.5 * (lo + hi)
        g = np.sum(1.0 / (a - mid[:, None]), axis=1) - 1.0
        below = g < 0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def solve_mu_root(alphas, root_tol: float = 1e-12) -> float:
    """Unique root of sum 1/(x - alpha_i) = -1 below min(alpha).

    Warns with :class:`NonpositiveMultiplierWarning` when the root is not
    positive beyond the bisection tolerance, since the multiplier would then
    be nonpositive (or indistinguishable from zero).
    """
    a = np.asarray(alphas, dtype=float).ravel()
    if a.size == 0:
        raise InvalidInputError("alphas must be nonempty")
    if not np.all(np.isfinite(a)):
        raise RootBracketingError("non-finite alpha")
    if not a.min() > 0:
        raise InvalidInputError("alphas must be positive")
    n = a.size
    lo, hi = a.min() - n, a.min() - 1.0
    if g_bracket(a, lo) > 0 or g_bracket(a, hi) < 0:
        raise RootBracketingError(f"no sign change on [{lo}, {hi}]")
    x = float(bisect_roots(a[None, :], np.ones((1, n), dtype=bool), root_tol)[0])
    if x <= root_tol * max(1.0, float(a.min())):
        warnings.warn(
            f"multiplier root x={x:.3e} is not positive (sum 1/alpha = {np.sum(1 / a):.6f})",
            NonpositiveMultiplierWarning,
            stacklevel=2,
        )
    return x


def mu_from_root(x: float, ptx: float, sigma2: float, p_r: float, n_active: int) -> float:
    if not ptx > 0:
        raise InvalidInputError(f"transmit power must be positive, got {ptx}")
    return x / (LN2 * ptx * (n_active * sigma2 + p_r))


class RootComparison(NamedTuple):
    bisection: float
    polynomial_roots: np.ndarray
    closest: float
    largest_positive: float | None
    largest_positive_feasible: bool
    rel_error: float


def compare_root_rules(alphas, root_tol: float = 1e-12) -> RootComparison:
    """Bisection root against the polynomial route, plus the largest-positive-root rule.

    ``largest_positive_feasible`` tells whether the largest positive real
    polynomial root keeps every water level positive (x < min alpha).
    """
    a = np.asarray(alphas, dtype=float).ravel()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonpositiveMultiplierWarning)
        xb = solve_mu_root(a, root_tol)
    roots = polynomial_real_roots(a)
    closest = float(roots[np.argmin(np.abs(roots - xb))]) if roots.size else math.nan
    pos = roots[roots > 0]
    largest = float(pos.max()) if pos.size else None
    feasible = largest is not None and largest < a.min()
    scale = max(abs(xb), 1.0)
    return RootComparison(xb, roots, closest, largest, feasible, abs(closest - xb) / scale)
