"""Secure full-duplex two-way relaying with wireless power transfer."""

from .alternating import SolveTrace, StageRecord, optimize_joint, optimize_relay_only
from .experiments import ExperimentConfig, SweepRow, parse_config, run_sweep, trial_seed
from .linalg import dominant_rank1, hermitian_eig, null_space_basis, psd_factor
from .relay import RelayStageResult, build_relay_sdp, solve_relay_stage
from .scalar import PowerResult, RhoResult, optimize_power, optimize_rho, pb_bounds
from .sdp import Constraint, SdpProblem, SdpSolution, certify_solution, solve_sdp
from .system import (
    ChannelRealization,
    DesignPoint,
    PerfReport,
    SystemParams,
    draw_channels,
    evaluate_performance,
    satisfies_constraints,
)

__all__ = [
    "ChannelRealization", "Constraint", "DesignPoint", "ExperimentConfig", "PerfReport",
    "PowerResult", "RelayStageResult", "RhoResult", "SdpProblem", "SdpSolution", "SolveTrace",
    "StageRecord", "SweepRow", "SystemParams", "build_relay_sdp", "certify_solution",
    "dominant_rank1", "draw_channels", "evaluate_performance", "hermitian_eig",
    "null_space_basis", "optimize_joint", "optimize_power", "optimize_relay_only",
    "optimize_rho", "parse_config", "pb_bounds", "psd_factor", "run_sweep",
    "satisfies_constraints", "solve_relay_stage", "solve_sdp", "trial_seed",
]
