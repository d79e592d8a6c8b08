"""Resistance-band price model with conditioned crossing dynamics.

A drifted geometric Brownian price is conditioned to complete a prescribed
number of downcrossings of the band below a resistance level before breaking
out above it.  The package derives the conditioned dynamics, the closed-form
log-utility strategies that exploit believed crossing counts, and a Monte
Carlo harness comparing them with the classic constant-fraction strategy.
"""

from ._kernels import BACKEND
from .config import ConfigError, RunConfig
from .laws import (
    FiniteSupportLaw,
    FixedCount,
    GeometricLaw,
    GeometricTailLaw,
    XiLaw,
    law_from_q,
    law_under_q,
    prob_axi,
)
from .model import MarketInputs, ModelParams, crossing_prob_p, derive_params, prob_an, scale_fn
from .montecarlo import (
    ExperimentConfig,
    LawSpec,
    McSummary,
    run_compare,
    run_sweep,
    validate_htransform,
    validate_martingale,
    validate_optimality,
    validate_pn,
)
from .simulate import (
    PathRecord,
    SimConfig,
    WealthSeries,
    evolve_wealth,
    path_rng,
    sample_xi,
    simulate_path,
    simulate_unconditioned,
)
from .strategy import (
    MixtureWeight,
    Phase,
    PhaseState,
    classic_strategy,
    conditioned_drift,
    martingale_value,
    mixture_weight,
    optimal_strategy_fixed,
    optimal_strategy_random,
    project_unit,
    strategy_grid,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "FiniteSupportLaw",
    "FixedCount",
    "GeometricLaw",
    "GeometricTailLaw",
    "MarketInputs",
    "ConfigError",
    "ExperimentConfig",
    "LawSpec",
    "McSummary",
    "MixtureWeight",
    "ModelParams",
    "PathRecord",
    "RunConfig",
    "Phase",
    "PhaseState",
    "SimConfig",
    "WealthSeries",
    "XiLaw",
    "classic_strategy",
    "conditioned_drift",
    "crossing_prob_p",
    "derive_params",
    "evolve_wealth",
    "law_from_q",
    "law_under_q",
    "martingale_value",
    "mixture_weight",
    "optimal_strategy_fixed",
    "optimal_strategy_random",
    "path_rng",
    "prob_an",
    "prob_axi",
    "project_unit",
    "run_compare",
    "run_sweep",
    "sample_xi",
    "scale_fn",
    "simulate_path",
    "simulate_unconditioned",
    "strategy_grid",
    "validate_htransform",
    "validate_martingale",
    "validate_optimality",
    "validate_pn",
    "__version__",
]
