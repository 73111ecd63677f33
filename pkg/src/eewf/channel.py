"""Rayleigh channel realizations, eigenmode spectra and power normalizations.

Every channel is square (N receive = N transmit antennas). Entries are drawn
from a per-trial substream of one root seed, so a realization is a pure
function of ``(n, seed, trial_index)`` and never depends on call order or on
how trials are split between workers.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    DegenerateChannelError,
    InvalidDimensionError,
    InvalidInputError,
    NumericError,
)

# Eigenvalues below this fraction of the largest one are treated as zero.
RANK_CUTOFF = 1e-12


class Normalization(str, enum.Enum):
    STATIC_TRACE = "StaticTrace"
    ENSEMBLE_UNIT = "EnsembleUnit"
    RAW = "Raw"


@dataclass(frozen=True)
class ChannelMatrix:
    n: int
    entries: np.ndarray
    seed: int | None = None
    trial_index: int | None = None

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise InvalidDimensionError(f"channel must be square, got shape {entries.shape}")
        if entries.shape[0] != self.n or self.n < 1:
            raise InvalidDimensionError(f"n={self.n} does not match shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise NumericError("channel matrix has non-finite entries")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True)
class EigenSpectrum:
    lambdas: np.ndarray
    normalization: Normalization = Normalization.RAW

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float).ravel()
        if lam.size == 0:
            raise InvalidDimensionError("empty spectrum")
        if not np.all(np.isfinite(lam)):
            raise NumericError("spectrum has non-finite eigenvalues")
        if np.any(lam < 0):
            raise InvalidInputError("eigenvalues must be nonnegative")
        if np.any(np.diff(lam) > 0):
            lam = np.sort(lam)[::-1].copy()
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "normalization", Normalization(self.normalization))

    @property
    def n(self) -> int:
        return self.lambdas.size

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.lambdas > 0))


def trial_generator(n: int, seed: int, trial_index: int) -> np.random.Generator:
    """Independent generator for one trial; keyed by (n, trial_index) under ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(n), int(trial_index)))
    return np.random.Generator(np.random.PCG64(ss))


def _rayleigh_entries(n: int, seed: int, trial_index: int) -> np.ndarray:
    rng = trial_generator(n, seed, trial_index)
    z = rng.standard_normal((2, n, n))
    return (z[0] + 1j * z[1]) * np.sqrt(0.5)


def sample_rayleigh(n: int, seed: int, trial_index: int) -> ChannelMatrix:
    """I.i.d. circularly symmetric complex Gaussian channel with E|H_ij|^2 = 1."""
    if n < 1:
        raise InvalidDimensionError(f"antenna count must be >= 1, got {n}")
    return ChannelMatrix(n, _rayleigh_entries(n, seed, trial_index), seed, trial_index)


def rayleigh_batch(n: int, seed: int, trials: Iterable[int]) -> np.ndarray:
    """Stack of channel entries, shape (T, n, n), one substream per trial index."""
    if n < 1:
        raise InvalidDimensionError(f"antenna count must be >= 1, got {n}")
    trials = list(trials)
    out = np.empty((len(trials), n, n), dtype=complex)
    for k, t in enumerate(trials):
        out[k] = _rayleigh_entries(n, seed, t)
    return out


def clamp_rank(lambdas: np.ndarray) -> np.ndarray:
    """Sort rows nonincreasing and zero out numerically null eigenvalues."""
    lam = np.sort(np.clip(lambdas, 0.0, None), axis=-1)[..., ::-1]
    top = lam[..., :1]
    return np.where(lam < RANK_CUTOFF * top, 0.0, lam)


def spectra_from_matrices(h: np.ndarray) -> np.ndarray:
    """Squared singular values for a stack of matrices, shape (..., n)."""
    s = np.linalg.svd(h, compute_uv=False)
    return clamp_rank(s * s)


def eigen_spectrum(h: ChannelMatrix) -> EigenSpectrum:
    """Eigenvalues of H^H H, i.e. the power gains of the parallel eigenmodes."""
    if not np.all(np.isfinite(h.entries)):
        raise NumericError("channel matrix has non-finite entries")
    return EigenSpectrum(spectra_from_matrices(h.entries), Normalization.RAW)


def normalize_static(s: EigenSpectrum) -> EigenSpectrum:
    """Rescale so that the eigenvalues sum to N^2."""
    total = float(np.sum(s.lambdas))
    if not total > 0:
        raise DegenerateChannelError("cannot normalize an all-zero spectrum")
    return EigenSpectrum(s.lambdas * (s.n**2 / total), Normalization.STATIC_TRACE)


def receive_power(lambdas, p) -> float:
    """Noiseless receive power sum(lambda_i * p_i)."""
    lam = np.asarray(lambdas, dtype=float)
    p = np.asarray(p, dtype=float)
    if lam.shape != p.shape:
        raise InvalidInputError(f"length mismatch: {lam.shape} vs {p.shape}")
    if np.any(p < 0):
        raise InvalidInputError("allocation must be nonnegative")
    return float(np.dot(lam, p))


# --- JSON interchange -------------------------------------------------------
# A record is a JSON array of [re, im] pairs, row-major. Both a flat list of
# n*n pairs and a nested list of rows are accepted.


def matrix_from_record(record, seed: int | None = None, trial_index: int | None = None) -> ChannelMatrix:
    arr = np.asarray(record, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        entries = arr[..., 0] + 1j * arr[..., 1]
    elif arr.ndim == 2 and arr.shape[-1] == 2:
        n = int(round(np.sqrt(arr.shape[0])))
        if n * n != arr.shape[0]:
            raise InvalidDimensionError(f"{arr.shape[0]} entries do not form a square matrix")
        entries = (arr[:, 0] + 1j * arr[:, 1]).reshape(n, n)
    else:
        raise InvalidInputError(f"cannot interpret record of shape {arr.shape} as [re, im] pairs")
    return ChannelMatrix(entries.shape[0], entries, seed, trial_index)


def matrix_to_record(h: ChannelMatrix) -> list:
    e = h.entries.ravel()
    return [[float(z.real), float(z.imag)] for z in e]


def read_matrices(path) -> Iterator[ChannelMatrix]:
    """Read channel matrices, one JSON record per non-blank line."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            if line.strip():
                yield matrix_from_record(json.loads(line), trial_index=lineno)


def write_matrices(path, matrices: Iterable[ChannelMatrix]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for h in matrices:
            fh.write(json.dumps(matrix_to_record(h)) + "\n")
