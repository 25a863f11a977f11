"""Numerical toolkit for multiple radial SLE(0) systems."""

from .stationary import (
    AsymmetricConfigError,
    DegenerateConfigError,
    SolverOptions,
    StationarySolution,
    SystemConfig,
    census,
    drift_U,
    log_master,
    null_vector_residual,
    solve_stationary,
    stationary_residual,
)

__all__ = [
    "AsymmetricConfigError",
    "DegenerateConfigError",
    "SolverOptions",
    "StationarySolution",
    "SystemConfig",
    "census",
    "drift_U",
    "log_master",
    "null_vector_residual",
    "solve_stationary",
    "stationary_residual",
]

__version__ = "0.1.0"
