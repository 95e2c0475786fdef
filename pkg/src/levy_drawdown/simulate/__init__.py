"""Monte Carlo simulation of drawdown statistics."""

from .estimators import (
    THREADS_ENV,
    HorizonError,
    PathRecords,
    PathTracker,
    SimConfig,
    SimEstimate,
    encode_model,
    estimate_eta_eps_lt,
    estimate_eta_lt,
    estimate_running_max_cdf,
    estimate_tau_lt,
    ladder_bias_budget,
    path_increments,
    bridge_uniforms,
    monte_carlo_running_max,
    sample_increment,
    simulate_paths,
)

__all__ = [
    "THREADS_ENV",
    "HorizonError",
    "PathRecords",
    "PathTracker",
    "SimConfig",
    "SimEstimate",
    "encode_model",
    "estimate_eta_eps_lt",
    "estimate_eta_lt",
    "estimate_running_max_cdf",
    "estimate_tau_lt",
    "ladder_bias_budget",
    "path_increments",
    "bridge_uniforms",
    "monte_carlo_running_max",
    "sample_increment",
    "simulate_paths",
]
