"""Multi-country, multi-sector trade model solved in changes, with a levels oracle."""

from .baseline import (
    ModelBaseline,
    Violation,
    baseline_from_icio,
    load_baseline,
    market_clearing_output,
    save_baseline,
    validate_baseline,
)
from .levels import LevelsEquilibrium, LevelsPrimitives, baseline_from_levels, levels_from_baseline, solve_levels_oracle
from .solver import (
    DEFAULT_PROHIBITIVE_CAP,
    EquilibriumChange,
    SolverConfig,
    TradeCostShock,
    gne_change,
    sector_output_change,
    solve_hat,
    trade_balance_residual,
)

__all__ = [
    "DEFAULT_PROHIBITIVE_CAP", "EquilibriumChange", "LevelsEquilibrium", "LevelsPrimitives",
    "ModelBaseline", "SolverConfig", "TradeCostShock", "Violation", "baseline_from_icio",
    "baseline_from_levels", "gne_change", "levels_from_baseline", "load_baseline", "market_clearing_output",
    "save_baseline", "sector_output_change", "solve_hat", "solve_levels_oracle",
    "trade_balance_residual", "validate_baseline",
]
