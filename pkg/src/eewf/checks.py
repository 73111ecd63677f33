"""Property battery behind ``eewf verify``.

Each check returns a :class:`CheckResult` carrying its worst observed value,
the threshold it was held to and, on failure, the offending instance in a
JSON-serializable form so it can be replayed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import closed_forms as cf
from .errors import EewfError, UnsupportedDimensionError
from .multiplier import compare_root_rules
from .oracle import MAX_DIM, simplex_grid_search
from .solver import SolveSettings, kkt_residual, solve_eewf
from .waterfilling import solve_wf


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    threshold: float
    count: int
    instance: dict | None = field(default=None)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name:<24} worst={self.worst:.3e} threshold={self.threshold:.1e} n={self.count}"


def _random_spectrum(rng, n):
    return np.sort(rng.exponential(1.0, n) * n)[::-1]


def check_closed_forms(settings: SolveSettings, tol=1e-9) -> CheckResult:
    worst, bad = 0.0, None
    count = 0
    for n in (1, 2, 4, 8, 16):
        for fam, lam in (("isotropic", np.full(n, float(n))), ("rank1", np.r_[float(n * n), np.zeros(n - 1)])):
            ref = (cf.isotropic_eewf if fam == "isotropic" else cf.rank1_eewf)(n, settings.p_r, settings.sigma2)
            try:
                sol = solve_eewf(lam, settings)
                err = max(
                    abs(sol.p[0] - ref.p_per_channel) / ref.p_per_channel,
                    abs(sol.eta - ref.eta) / ref.eta,
                    abs(sol.rate - ref.rate) / ref.rate,
                    abs(sol.ptx - ref.ptx) / ref.ptx,
                )
            except EewfError:
                err = np.inf
            count += 1
            if not err <= worst:
                worst = err
                bad = {"family": fam, "n": n, "p_r": settings.p_r, "sigma2": settings.sigma2}
    return CheckResult("closed_forms", worst <= tol, worst, tol, count, None if worst <= tol else bad)


def check_oracle(settings: SolveSettings, instances: int, max_dim: int, seed: int, eta_tol=1e-4, p_tol=1e-3) -> CheckResult:
    if max_dim > MAX_DIM or max_dim < 2:
        raise UnsupportedDimensionError(f"oracle dimension must be in [2, {MAX_DIM}], got {max_dim}")
    rng = np.random.default_rng(seed)
    worst, bad = 0.0, None
    for _ in range(instances):
        k = int(rng.integers(2, max_dim + 1))
        lam = _random_spectrum(rng, k)
        sigma2 = float(10 ** rng.uniform(-1, 1))
        s = settings.replace(sigma2=sigma2)
        o = simplex_grid_search(lam, s.p_r, sigma2)
        try:
            sol = solve_eewf(lam, s)
            # normalized so both tolerances map to 1.0
            score = max(abs(sol.eta - o.eta) / o.eta / eta_tol, np.abs(sol.p - o.p).max() / p_tol)
        except EewfError:
            score = np.inf
        if not score <= worst:
            worst = score
            bad = {"lambdas": lam.tolist(), "p_r": s.p_r, "sigma2": sigma2}
    return CheckResult("oracle_agreement", worst <= 1.0, worst, 1.0, instances, None if worst <= 1.0 else bad)


def check_kkt(settings: SolveSettings, instances: int, seed: int, tol=1e-8) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst, bad = 0.0, None
    for _ in range(instances):
        n = int(rng.integers(1, 17))
        lam = _random_spectrum(rng, n)
        s = settings.replace(sigma2=float(10 ** rng.uniform(-3, 2)))
        try:
            res = kkt_residual(solve_eewf(lam, s), lam, s)
        except EewfError:
            res = np.inf
        if not res <= worst:
            worst = res
            bad = {"lambdas": lam.tolist(), "p_r": s.p_r, "sigma2": s.sigma2}
    return CheckResult("kkt_residual", worst <= tol, worst, tol, instances, None if worst <= tol else bad)


def check_roots(instances: int, seed: int, tol=1e-8) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst, bad = 0.0, None
    for _ in range(instances):
        n = int(rng.integers(1, 9))
        alphas = rng.uniform(0.2, 20.0, n)
        err = compare_root_rules(alphas).rel_error
        if not err <= worst:
            worst = err
            bad = {"alphas": alphas.tolist()}
    return CheckResult("root_cross_check", worst <= tol, worst, tol, instances, None if worst <= tol else bad)


def check_inequalities(instances: int, seed: int) -> CheckResult:
    """Nonnegative slack of the HM/GM/Mahler chain, Bernoulli and Jensen."""
    rng = np.random.default_rng(seed)
    worst, bad = 0.0, None
    for _ in range(instances):
        n = int(rng.integers(1, 33))
        lam = rng.exponential(1.0, n) + 1e-3
        lam = lam / lam.mean()
        gamma = float(10 ** rng.uniform(-3, 3))
        hm = cf.check_hm_logsum_inequality(lam, gamma)
        bj = cf.check_bernoulli_jensen_bounds(lam, gamma)
        viol = max(0.0, -hm.hm_gm_slack, -hm.mahler_slack, -bj.bernoulli_slack, -bj.jensen_slack)
        worst = max(worst, viol)
        if not (hm.holds and bj.holds) and bad is None:
            bad = {"lambdas": lam.tolist(), "gamma": gamma}
    return CheckResult("inequality_chain", bad is None, worst, 0.0, instances, bad)


def check_wf_slackness(instances: int, seed: int, tol=1e-9) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst, bad = 0.0, None
    for _ in range(instances):
        n = int(rng.integers(1, 17))
        lam = _random_spectrum(rng, n)
        sigma2 = float(10 ** rng.uniform(-2, 1))
        p_t = float(10 ** rng.uniform(-2, 1))
        w = solve_wf(lam, p_t, sigma2)
        floor = sigma2 / lam
        act = w.p > 0
        err = max(
            np.max(np.abs(w.p[act] + floor[act] - w.water_level), initial=0.0),
            np.max(np.maximum(w.water_level - floor[~act], 0.0), initial=0.0),
            abs(w.ptx - p_t) / p_t,
        ) / max(w.water_level, 1.0)
        if err > worst:
            worst = err
            bad = {"lambdas": lam.tolist(), "p_t": p_t, "sigma2": sigma2}
    return CheckResult("wf_slackness", worst <= tol, worst, tol, instances, None if worst <= tol else bad)


def run_battery(settings: SolveSettings | None = None, instances: int = 200, oracle_dim: int = 4, seed: int = 7) -> list[CheckResult]:
    settings = settings or SolveSettings()
    return [
        check_closed_forms(settings),
        check_oracle(settings, max(1, instances // 4), oracle_dim, seed),
        check_kkt(settings, instances, seed + 1),
        check_roots(instances, seed + 2),
        check_inequalities(instances * 5, seed + 3),
        check_wf_slackness(instances, seed + 4),
    ]
