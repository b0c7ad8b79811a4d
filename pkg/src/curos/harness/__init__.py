"""Experiment CLI and runners."""

from .config import EXPERIMENTS, METHODS, ExperimentConfig, load_config
from .emit import emit, parse_csv, write_table
from .records import METRIC_COLUMNS, MetricRecord
from .runners import RunResult, run_heat, run_spde, run_toy

__all__ = [
    "EXPERIMENTS",
    "METHODS",
    "METRIC_COLUMNS",
    "ExperimentConfig",
    "MetricRecord",
    "RunResult",
    "emit",
    "load_config",
    "parse_csv",
    "run_heat",
    "run_spde",
    "run_toy",
    "write_table",
]
