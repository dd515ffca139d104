"""Benchmark harness: experiment configs, Monte-Carlo runners, CSV and plot artifacts."""

from .config import (
    ALGORITHMS,
    ConfigError,
    ExperimentSpec,
    PhaseTransitionSpec,
    config_digest,
    load_experiment,
    load_phase,
)
from .plotting import ParseError, emit_plot_data, render_figures, write_plot_script
from .runner import (
    AGGREGATE_COLUMNS,
    PHASE_COLUMNS,
    TRIAL_COLUMNS,
    run_complexity_probe,
    run_phase_transition,
    run_sweep,
    run_sweep_trial,
    trial_seed,
)

__all__ = [
    "ALGORITHMS",
    "ConfigError",
    "ExperimentSpec",
    "PhaseTransitionSpec",
    "config_digest",
    "load_experiment",
    "load_phase",
    "ParseError",
    "emit_plot_data",
    "render_figures",
    "write_plot_script",
    "AGGREGATE_COLUMNS",
    "PHASE_COLUMNS",
    "TRIAL_COLUMNS",
    "run_complexity_probe",
    "run_phase_transition",
    "run_sweep",
    "run_sweep_trial",
    "trial_seed",
]
