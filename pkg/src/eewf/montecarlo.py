"""Rayleigh-fading ensembles: per-realization EEWF and WF solves, ensemble
averages, (N, SNR) sweeps and the truncated-SISO bound experiment.

Reproducibility contract: trial ``t`` of antenna count ``n`` always sees the
same channel (keyed substream), trials are processed in fixed-size chunks
whose boundaries do not depend on the worker count, and every average is an
exactly rounded sum (``math.fsum``). Results are therefore identical for any
number of workers.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .channel import rayleigh_batch, spectra_from_matrices
from .errors import EnsembleError, InvalidInputError
from .solver import OK, SolveSettings, solve_eewf_batch
from .waterfilling import solve_wf_batch
from .closed_forms import siso_efficiency_ratio_bounds, siso_rate_ratio_bounds

log = logging.getLogger(__name__)

CHUNK = 1000
MAX_FAILURE_FRACTION = 0.01

CSV_COLUMNS = (
    "algorithm",
    "n",
    "target_snr_db",
    "realized_snr_db",
    "eta_avg",
    "eta_stderr",
    "rate_avg",
    "rate_stderr",
    "ptx_avg",
    "ptx_stderr",
    "nchan_avg",
    "prx_avg",
    "trials",
    "failures",
    "seed",
)


@dataclass(frozen=True)
class SimConfig:
    antenna_counts: tuple = (1, 2, 4, 8, 16)
    snr_grid_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0)
    p_r: float = 1.0
    p_t: float = 1.0
    trials: int = 10_000
    seed: int = 2012
    truncation_cut: float = 0.01
    pilot_trials: int = 500

    def __post_init__(self):
        object.__setattr__(self, "antenna_counts", tuple(int(n) for n in self.antenna_counts))
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        if not self.antenna_counts or min(self.antenna_counts) < 1:
            raise InvalidInputError("antenna_counts must be a nonempty list of positive integers")
        if not self.snr_grid_db:
            raise InvalidInputError("snr_grid_db must be nonempty")
        if self.trials < 1 or self.pilot_trials < 1:
            raise InvalidInputError("trials and pilot_trials must be >= 1")
        if not (self.p_r > 0 and self.p_t > 0):
            raise InvalidInputError("p_r and p_t must be positive")
        if not self.truncation_cut >= 0:
            raise InvalidInputError("truncation_cut must be nonnegative")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidInputError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class AlgoStats:
    """Ensemble averages for one algorithm at one noise level."""

    algorithm: str
    sigma2: float
    trials: int
    failures: int
    eta_avg: float
    eta_stderr: float
    rate_avg: float
    rate_stderr: float
    ptx_avg: float
    ptx_stderr: float
    nchan_avg: float
    nchan_stderr: float
    prx_avg: float
    prx_stderr: float

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.ptx_avg / self.sigma2)


@dataclass(frozen=True)
class EnsembleStats:
    n: int
    sigma2: float
    eewf: AlgoStats
    wf: AlgoStats

    @property
    def eta_avg(self):
        return self.eewf.eta_avg

    @property
    def rate_avg(self):
        return self.eewf.rate_avg

    @property
    def ptx_avg(self):
        return self.eewf.ptx_avg

    @property
    def nchan_avg(self):
        return self.eewf.nchan_avg

    @property
    def snr_db(self):
        return self.eewf.snr_db


@dataclass(frozen=True)
class SweepRow:
    algorithm: str
    n: int
    target_snr_db: float
    realized_snr_db: float
    eta_avg: float
    eta_stderr: float
    rate_avg: float
    rate_stderr: float
    ptx_avg: float
    ptx_stderr: float
    nchan_avg: float
    prx_avg: float
    trials: int
    failures: int
    seed: int
    sigma2: float = field(default=math.nan, compare=False)


def worker_count(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("EEWF_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _chunks(total: int):
    return [(s, min(s + CHUNK, total)) for s in range(0, total, CHUNK)]


def _map_chunks(fn, total: int, workers: int | None):
    spans = _chunks(total)
    w = worker_count(workers)
    if w == 1 or len(spans) == 1:
        return [fn(a, b) for a, b in spans]
    with ThreadPoolExecutor(max_workers=w) as pool:
        return list(pool.map(lambda ab: fn(*ab), spans))


def ensemble_spectra(n: int, seed: int, trials: int, workers: int | None = None) -> np.ndarray:
    """Raw eigenvalue spectra of ``trials`` Rayleigh channels, shape (trials, n)."""
    parts = _map_chunks(lambda a, b: spectra_from_matrices(rayleigh_batch(n, seed, range(a, b))), trials, workers)
    return np.vstack(parts)


def solve_eewf_chunked(lam: np.ndarray, settings: SolveSettings, workers: int | None = None):
    parts = _map_chunks(lambda a, b: solve_eewf_batch(lam[a:b], settings), lam.shape[0], workers)
    return {k: np.concatenate([getattr(r, k) for r in parts]) for k in ("p", "q", "eta", "rate", "ptx", "active", "status", "mu")}


def _mean_stderr(v: np.ndarray) -> tuple[float, float]:
    m = math.fsum(v.tolist()) / v.size
    if v.size < 2:
        return m, math.nan
    var = math.fsum(((v - m) ** 2).tolist()) / (v.size - 1)
    return m, math.sqrt(var / v.size)


def _stats(algorithm, sigma2, eta, rate, ptx, nchan, prx, failures) -> AlgoStats:
    e, es = _mean_stderr(eta)
    r, rs = _mean_stderr(rate)
    p, ps = _mean_stderr(ptx)
    c, cs = _mean_stderr(nchan.astype(float))
    x, xs = _mean_stderr(prx)
    return AlgoStats(algorithm, sigma2, int(eta.size), int(failures), e, es, r, rs, p, ps, c, cs, x, xs)


def eewf_stats(lam: np.ndarray, sigma2: float, p_r: float, settings: SolveSettings | None = None, workers=None) -> AlgoStats:
    settings = (settings or SolveSettings()).replace(sigma2=sigma2, p_r=p_r)
    res = solve_eewf_chunked(lam, settings, workers)
    ok = res["status"] == OK
    failures = int((~ok).sum())
    if failures > MAX_FAILURE_FRACTION * lam.shape[0]:
        raise EnsembleError(f"{failures} of {lam.shape[0]} EEWF trials failed at sigma2={sigma2:.6g}")
    if failures:
        log.warning("excluded %d failed EEWF trials (sigma2=%.6g)", failures, sigma2)
    prx = res["q"].sum(axis=1)
    return _stats("EEWF", sigma2, res["eta"][ok], res["rate"][ok], res["ptx"][ok], res["active"][ok], prx[ok], failures)


def wf_stats(lam: np.ndarray, sigma2: float, p_t: float, workers=None) -> AlgoStats:
    parts = _map_chunks(lambda a, b: solve_wf_batch(lam[a:b], p_t, sigma2), lam.shape[0], workers)
    cap = np.concatenate([b.capacity for b in parts])
    ptx = np.concatenate([b.ptx for b in parts])
    prx = np.concatenate([b.prx for b in parts])
    act = np.concatenate([b.active for b in parts])
    ok = np.concatenate([b.ok for b in parts])
    failures = int((~ok).sum())
    if failures > MAX_FAILURE_FRACTION * lam.shape[0]:
        raise EnsembleError(f"{failures} of {lam.shape[0]} WF trials failed")
    return _stats("WF", sigma2, cap[ok] / ptx[ok], cap[ok], ptx[ok], act[ok], prx[ok], failures)


def run_ensemble(n: int, sigma2: float, config: SimConfig, settings: SolveSettings | None = None, workers=None) -> EnsembleStats:
    """EEWF (receive budget P_r) and WF (transmit budget P_t) on the same realizations."""
    if not sigma2 > 0:
        raise InvalidInputError("sigma2 must be positive")
    lam = ensemble_spectra(n, config.seed, config.trials, workers)
    return EnsembleStats(
        n,
        sigma2,
        eewf_stats(lam, sigma2, config.p_r, settings, workers),
        wf_stats(lam, sigma2, config.p_t, workers),
    )


def calibrate_sigma2(lam: np.ndarray, snr: float, p_r: float, pilot_trials: int, settings=None, workers=None) -> float:
    """Noise variance at which the average EEWF transmit power sits at ``snr`` times sigma^2.

    Start from the isotropic guess P_t = P_r / N, take one pilot step on the
    first ``pilot_trials`` trials, then one fixed-point correction on all trials.
    """
    n = lam.shape[1]
    s2 = p_r / (n * snr)
    s2 = eewf_stats(lam[:pilot_trials], s2, p_r, settings, workers).ptx_avg / snr
    s2 = eewf_stats(lam, s2, p_r, settings, workers).ptx_avg / snr
    return s2


def _row(stats: AlgoStats, n: int, target_db: float, seed: int) -> SweepRow:
    return SweepRow(
        stats.algorithm,
        n,
        target_db,
        stats.snr_db,
        stats.eta_avg,
        stats.eta_stderr,
        stats.rate_avg,
        stats.rate_stderr,
        stats.ptx_avg,
        stats.ptx_stderr,
        stats.nchan_avg,
        stats.prx_avg,
        stats.trials,
        stats.failures,
        seed,
        stats.sigma2,
    )


def sweep(config: SimConfig, settings: SolveSettings | None = None, workers: int | None = None) -> list[SweepRow]:
    """One EEWF row and one WF row per (N, target SNR).

    WF uses sigma^2 = P_t / SNR directly; EEWF's sigma^2 is calibrated since
    its transmit power is an output. Channels are shared across SNR points.
    """
    rows = []
    for n in config.antenna_counts:
        lam = ensemble_spectra(n, config.seed, config.trials, workers)
        for snr_db in config.snr_grid_db:
            snr = 10.0 ** (snr_db / 10.0)
            s2 = calibrate_sigma2(lam, snr, config.p_r, config.pilot_trials, settings, workers)
            rows.append(_row(eewf_stats(lam, s2, config.p_r, settings, workers), n, snr_db, config.seed))
            rows.append(_row(wf_stats(lam, config.p_t / snr, config.p_t, workers), n, snr_db, config.seed))
            log.info("n=%d snr=%.1f dB done", n, snr_db)
    return rows


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def write_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            d = asdict(r)
            w.writerow([_fmt(d[c]) for c in CSV_COLUMNS])


def read_csv(path) -> list[SweepRow]:
    types = {f.name: f.type for f in fields(SweepRow)}
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            kw = {}
            for k, v in rec.items():
                t = types[k]
                kw[k] = v if t == "str" else int(v) if t == "int" else float(v)
            out.append(SweepRow(**kw))
    return out


# --- truncated SISO bounds ----------------------------------------------------


@dataclass(frozen=True)
class BoundsRow:
    snr_db: float
    inv_lambda_mean: float
    retained: int
    rate_ratio: float
    rate_lower: float
    rate_upper: float
    eff_ratio: float
    eff_lower: float
    eff_upper: float

    @property
    def inside(self) -> bool:
        eps = 1e-12
        return (
            self.rate_lower - eps <= self.rate_ratio <= self.rate_upper + eps
            and self.eff_lower - eps <= self.eff_ratio <= self.eff_upper + eps
        )


def truncated_siso_gains(trials: int, seed: int, cut: float, workers=None) -> np.ndarray:
    """SISO Rayleigh power gains with fades below ``cut`` discarded, rescaled to unit mean."""
    lam = ensemble_spectra(1, seed, trials, workers)[:, 0]
    kept = lam[lam >= cut]
    if kept.size == 0:
        raise EnsembleError(f"truncation cut {cut} discards every realization")
    return kept / (math.fsum(kept.tolist()) / kept.size)


def siso_bounds_experiment(
    snr_grid_db=(0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0),
    trials: int = 10_000,
    seed: int = 2012,
    cut: float = 0.01,
    p_r: float = 1.0,
    settings: SolveSettings | None = None,
    workers=None,
) -> list[BoundsRow]:
    """Fading SISO channel with truncated inversion, WF budget P_t = <1/lambda> P_r.

    At each SNR = P_t / sigma^2 both algorithms are solved per realization and
    the ensemble ratios are compared with their bounds.
    """
    lam = truncated_siso_gains(trials, seed, cut, workers)
    inv = math.fsum((1.0 / lam).tolist()) / lam.size
    p_t = inv * p_r
    col = lam[:, None]
    rows = []
    for snr_db in snr_grid_db:
        sigma2 = p_t / 10.0 ** (snr_db / 10.0)
        ee = eewf_stats(col, sigma2, p_r, settings, workers)
        wf = wf_stats(col, sigma2, p_t, workers)
        rlo, rhi = siso_rate_ratio_bounds(inv)
        elo, ehi = siso_efficiency_ratio_bounds(inv)
        rows.append(
            BoundsRow(
                snr_db, inv, int(lam.size), ee.rate_avg / wf.rate_avg, rlo, rhi, ee.eta_avg / wf.eta_avg, elo, ehi
            )
        )
    return rows
