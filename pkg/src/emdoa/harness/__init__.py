"""Monte Carlo harness and command-line interface."""

from .config import ConfigError, bundled_config, ExperimentConfig, load_config, parse_config
from .engine import classify_wanted, match_and_error, rmse, run_experiment, run_trials

__all__ = [
    "ConfigError",
    "bundled_config",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "classify_wanted",
    "match_and_error",
    "rmse",
    "run_experiment",
    "run_trials",
]
