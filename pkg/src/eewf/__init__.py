"""Energy-efficient water-filling for MIMO links under a receive-power constraint."""

from .channel import (
    ChannelMatrix,
    EigenSpectrum,
    Normalization,
    eigen_spectrum,
    normalize_static,
    rayleigh_batch,
    sample_rayleigh,
)
from .errors import EewfError
from .montecarlo import SimConfig, run_ensemble, siso_bounds_experiment, sweep
from .oracle import simplex_grid_search
from .solver import EewfSolution, SolveSettings, kkt_residual, solve_eewf, solve_eewf_batch
from .waterfilling import WfSolution, ergodic_capacity, solve_wf

__all__ = [
    "ChannelMatrix",
    "EigenSpectrum",
    "Normalization",
    "eigen_spectrum",
    "normalize_static",
    "rayleigh_batch",
    "sample_rayleigh",
    "EewfError",
    "SimConfig",
    "run_ensemble",
    "siso_bounds_experiment",
    "sweep",
    "simplex_grid_search",
    "EewfSolution",
    "SolveSettings",
    "kkt_residual",
    "solve_eewf",
    "solve_eewf_batch",
    "WfSolution",
    "ergodic_capacity",
    "solve_wf",
]
