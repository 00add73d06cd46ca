"""Primal-dual saddle-point solvers and decentralized consensus experiments."""

import json as _json

from ._saddlekit import (
    AssumptionError,
    BoundsRegime,
    ConfigError,
    IoError,
    Problem,
    erdos_renyi,
    load_problem,
    metropolis_weights,
    nu_rho_estimate,
    problem_from_json,
    quadratic_regularity,
    save_problem,
    solve,
    solve_kkt_reference,
    spectral_quantities,
    step_size_bounds,
    theoretical_rate,
)
from ._saddlekit import run_experiment as _run_experiment

__version__ = "0.1.0"


def run_experiment(*args, **kwargs):
    """Run a scenario grid search and return the parsed summary."""
    return _json.loads(_run_experiment(*args, **kwargs))


__all__ = [
    "AssumptionError",
    "BoundsRegime",
    "ConfigError",
    "IoError",
    "Problem",
    "erdos_renyi",
    "load_problem",
    "metropolis_weights",
    "nu_rho_estimate",
    "problem_from_json",
    "quadratic_regularity",
    "run_experiment",
    "save_problem",
    "solve",
    "solve_kkt_reference",
    "spectral_quantities",
    "step_size_bounds",
    "theoretical_rate",
]
