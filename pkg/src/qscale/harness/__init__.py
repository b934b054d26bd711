"""Sweep orchestration, reporting and the ``qscale`` command line."""
from .config import FUNCTIONS, SweepConfig, load_config, parse_config
from .report import emit, regression_check
from .sweep import ComparisonRecord, evaluate_cell, run_sweep

__all__ = [
    "FUNCTIONS",
    "ComparisonRecord",
    "SweepConfig",
    "emit",
    "evaluate_cell",
    "load_config",
    "parse_config",
    "regression_check",
    "run_sweep",
]
