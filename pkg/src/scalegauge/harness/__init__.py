"""Config-driven experiments, reports and the command line."""
from .config import EXPERIMENTS, SEED_ENV, ExperimentConfig, default_config, load_config, merge_config
from .experiments import protocol_rows, run_experiment
from .protocol import OutcomeState, compare_outcomes, format_outcome, interpret, transmit
from .report import Report, dumps, table_csv

__all__ = [
    "EXPERIMENTS", "SEED_ENV", "ExperimentConfig", "default_config", "load_config", "merge_config",
    "protocol_rows", "run_experiment",
    "OutcomeState", "compare_outcomes", "format_outcome", "interpret", "transmit",
    "Report", "dumps", "table_csv",
]
