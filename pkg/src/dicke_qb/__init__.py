"""Exact-diagonalization simulator for the driven, interacting Dicke quantum battery.

N two-level systems couple collectively to one cavity mode, with an
atom-atom interaction (eta/N) J_z^2 and a classical drive on the spins.
The package computes charging traces (stored energy, average power,
energy fluctuation, scaled inversion), their extrema, ground-state phase
diagrams, the analytic critical interaction line and power-law scaling
of the maximum charging power with battery size.
"""

from .analysis import (
    CutoffRow,
    GroundState,
    ScalingFit,
    SweepGrid,
    critical_eta,
    cutoff_convergence,
    fit_power_scaling,
    ground_state_sz,
    power_scaling,
    sweep,
)
from .dynamics import (
    ChargingTrace,
    ExtremumReport,
    SpectralDecomposition,
    charging_power,
    charging_trace,
    decompose,
    energy_fluctuation,
    evolve,
    find_extrema,
    initial_state,
    stored_energy,
)
from .hilbert import HilbertSpace, build_space, index_of, state_of
from .model import (
    ChargingProtocol,
    ModelParams,
    build_h0,
    build_h1,
    build_h_total,
    cross_check_formula,
    default_search_horizon,
)

__version__ = "0.1.0"

__all__ = [
    "ChargingProtocol",
    "ChargingTrace",
    "CutoffRow",
    "ExtremumReport",
    "GroundState",
    "HilbertSpace",
    "ModelParams",
    "ScalingFit",
    "SpectralDecomposition",
    "SweepGrid",
    "build_h0",
    "build_h1",
    "build_h_total",
    "build_space",
    "charging_power",
    "charging_trace",
    "critical_eta",
    "cross_check_formula",
    "cutoff_convergence",
    "decompose",
    "default_search_horizon",
    "energy_fluctuation",
    "evolve",
    "find_extrema",
    "fit_power_scaling",
    "ground_state_sz",
    "index_of",
    "initial_state",
    "power_scaling",
    "state_of",
    "stored_energy",
    "sweep",
    "__version__",
]
