from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .experiment import ResultRow, run_experiment
from .results import plot_data, read_csv, summarize, write_csv

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ResultRow",
    "load_config",
    "parse_config",
    "plot_data",
    "read_csv",
    "run_experiment",
    "summarize",
    "write_csv",
]
