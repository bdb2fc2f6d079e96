"""Deterministic figure rendering for levyexec experiment artifacts."""

from .artifacts import (
    SchemaError,
    StrategyCurve,
    TotalCostTable,
    read_strategy_csv,
    read_tc_csv,
    strategy_coords,
)
from .render import FigureSpec, STRATEGY_SCENARIOS, plan_figures, render

__version__ = "0.1.0"

__all__ = [
    "SchemaError",
    "StrategyCurve",
    "TotalCostTable",
    "read_strategy_csv",
    "read_tc_csv",
    "strategy_coords",
    "FigureSpec",
    "STRATEGY_SCENARIOS",
    "plan_figures",
    "render",
]
