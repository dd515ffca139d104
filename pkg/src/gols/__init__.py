"""Greedy sparse recovery: OLS, generalized OLS, OMP, seeded ensembles, and a benchmark harness."""

__version__ = "0.1.0"

from .linalg import (
    DegenerateColumn,
    InvalidDimension,
    ProjectionTracker,
    RankDeficient,
    least_squares,
)
from .solvers import (
    EmptyCandidates,
    RecoveryResult,
    SolverConfig,
    TooLarge,
    exhaustive_oracle,
    gols_run,
    ols_run,
    omp_run,
    score_column,
    select_top_L,
)
from .ensembles import (
    MatrixEnsemble,
    SignalEnsemble,
    SparseProblem,
    gen_matrix,
    gen_signal,
    load_problem,
    make_problem,
    save_problem,
    substream,
)
from .metrics import (
    EmptyAggregate,
    InvalidSparsity,
    MetricsReport,
    TrialOutcome,
    aggregate,
    err_components,
    exact_support,
    mse,
    truncate_top_k,
)

__all__ = [
    "__version__",
    "DegenerateColumn",
    "InvalidDimension",
    "ProjectionTracker",
    "RankDeficient",
    "least_squares",
    "EmptyCandidates",
    "RecoveryResult",
    "SolverConfig",
    "TooLarge",
    "exhaustive_oracle",
    "gols_run",
    "ols_run",
    "omp_run",
    "score_column",
    "select_top_L",
    "MatrixEnsemble",
    "SignalEnsemble",
    "SparseProblem",
    "gen_matrix",
    "gen_signal",
    "load_problem",
    "make_problem",
    "save_problem",
    "substream",
    "EmptyAggregate",
    "InvalidSparsity",
    "MetricsReport",
    "TrialOutcome",
    "aggregate",
    "err_components",
    "exact_support",
    "mse",
    "truncate_top_k",
]
