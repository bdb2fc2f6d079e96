"""Optimal liquidation under multiplicative, randomly amplified market impact.

The package solves the discrete-time execution problem by backward
induction on an inventory grid, evaluates strategies by exact formulas and
Monte Carlo, and reproduces the closed-form limits the model admits.
"""

__version__ = "0.1.0"

from .models import (
    ConditionsReport,
    ImpactKind,
    ImpactModel,
    MarketParams,
    NoiseModel,
    RISK_NEUTRAL,
    UtilityFn,
    effective_impact_ghat,
    effective_impact_hhat,
    step_decay_factor,
    validate_conditions,
    validate_utility,
)
from .schedules import (
    DiscreteSchedule,
    RateSchedule,
    append_terminal_block,
    nearly_block,
    read_schedule_csv,
    to_rate,
    write_schedule_csv,
)
from .solver import (
    ConvergenceRow,
    SolveMode,
    SolveSpec,
    ValueSurface,
    convergence_sweep,
    default_grid_points,
    evaluate_discrete,
    extract_schedule,
    solve,
    solve_selloff,
)
from .montecarlo import (
    McConfig,
    PathState,
    draw_levy_increments,
    evaluate_rate_analytic,
    j_operator,
    simulate_continuous,
    simulate_discrete,
    trace_continuous,
    trace_discrete,
)
from .closedform import (
    ComparisonReport,
    compare_random_vs_baseline,
    fixed_gamma_tilde_params,
    loglinear_value,
    total_mi_cost,
)
from .config import ConfigError, ProblemConfig, load_config, parse_config

__all__ = [
    "__version__",
    "ConditionsReport",
    "ImpactKind",
    "ImpactModel",
    "MarketParams",
    "NoiseModel",
    "RISK_NEUTRAL",
    "UtilityFn",
    "effective_impact_ghat",
    "effective_impact_hhat",
    "step_decay_factor",
    "validate_conditions",
    "validate_utility",
    "DiscreteSchedule",
    "RateSchedule",
    "append_terminal_block",
    "nearly_block",
    "read_schedule_csv",
    "to_rate",
    "write_schedule_csv",
    "ConvergenceRow",
    "SolveMode",
    "SolveSpec",
    "ValueSurface",
    "convergence_sweep",
    "default_grid_points",
    "evaluate_discrete",
    "extract_schedule",
    "solve",
    "solve_selloff",
    "McConfig",
    "PathState",
    "draw_levy_increments",
    "evaluate_rate_analytic",
    "j_operator",
    "simulate_continuous",
    "simulate_discrete",
    "trace_continuous",
    "trace_discrete",
    "ComparisonReport",
    "compare_random_vs_baseline",
    "fixed_gamma_tilde_params",
    "loglinear_value",
    "total_mi_cost",
    "ConfigError",
    "ProblemConfig",
    "load_config",
    "parse_config",
]
