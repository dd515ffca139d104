"""Monte-Carlo drivers: seeded sweeps, the phase-transition experiment, the complexity probe."""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import __version__
from ..ensembles import MatrixEnsemble, SignalEnsemble, SparseProblem, make_problem
from ..metrics import (
    MetricsReport,
    TrialOutcome,
    aggregate,
    err_components,
    exact_support,
    mse,
    truncate_top_k,
)
from ..solvers import RecoveryResult, SolverConfig, gols_run, ols_run, omp_run
from .config import ExperimentSpec, PhaseTransitionSpec, config_digest

# Normative trial CSV schema; elapsed_s is exempt from determinism claims.
TRIAL_COLUMNS = (
    "algorithm", "n", "m", "k", "L", "trial", "seed",
    "err_components", "exact_support", "mse_full", "mse_topk",
    "residual_norm", "iterations", "elapsed_s",
)
AGGREGATE_COLUMNS = (
    "algorithm", "n", "m", "k", "L", "trials",
    "err", "exact_rate", "mse", "mse_topk",
    "time_mean", "time_stddev", "capped",
)
PHASE_COLUMNS = ("n", "trials", "successes", "success_rate")


def _fmt(value: float) -> str:
    # 17 significant digits: lossless float64 round trip
    return format(float(value), ".17g")


def trial_seed(master_seed: int, cell_key: tuple[int, ...], trial: int) -> int:
    """Derive the 64-bit seed of one trial from the master seed.

    Rule: ``SeedSequence(entropy=master_seed, spawn_key=(*cell_key, trial))``
    hashed to a single uint64.  The cell key deliberately excludes the
    algorithm and L so that every algorithm sees the identical problem in a
    given trial (paired comparisons).
    """
    ss = np.random.SeedSequence(entropy=int(master_seed),
                                spawn_key=tuple(int(c) for c in cell_key) + (int(trial),))
    return int(ss.generate_state(1, np.uint64)[0])


def outcome_from_result(problem: SparseProblem, result: RecoveryResult,
                        algorithm: str, L: int, trial: int, seed: int) -> TrialOutcome:
    """Score one solver run against the problem's ground truth."""
    k = problem.k
    return TrialOutcome(
        algorithm=algorithm,
        n=problem.n,
        m=problem.m,
        k=k,
        L=L,
        trial=trial,
        seed=seed,
        component_recovery=err_components(result.support, problem.support_true, k),
        exact_support=exact_support(result.support, problem.support_true, result.x_hat, k),
        mse_full=mse(problem.x_true, result.x_hat),
        mse_topk=mse(problem.x_true, truncate_top_k(result.x_hat, k)),
        residual_norm=result.residual_norm,
        iterations=result.iterations,
        elapsed=result.elapsed,
    )


def _algorithm_runs(spec: ExperimentSpec):
    """Expand the algorithm list into (algorithm, L) runs; non-GOLS runs use L=1."""
    runs = []
    for alg in spec.algorithms:
        if alg == "gols":
            runs.extend(("gols", L) for L in spec.L_values)
        else:
            runs.append((alg, 1))
    return runs


_SOLVER_WARMED = False


def _warm_solver() -> None:
    # first solver call in a process pays the compiled-kernel load; take it
    # here so per-trial timings stay clean
    global _SOLVER_WARMED
    if not _SOLVER_WARMED:
        gols_run(np.eye(2), np.ones(2), SolverConfig(L=1, k=1))
        _SOLVER_WARMED = True


def run_sweep_trial(spec: ExperimentSpec, k: int, trial: int) -> list[TrialOutcome]:
    """Run every configured algorithm on the one seeded problem of (k, trial)."""
    _warm_solver()
    seed = trial_seed(spec.master_seed, (k,), trial)
    problem = make_problem(
        MatrixEnsemble(spec.matrix_kind, spec.n, spec.m,
                       normalize_columns=spec.normalize_columns),
        SignalEnsemble(spec.signal_dist, spec.m, k),
        spec.noise_sigma,
        seed,
    )
    outcomes = []
    for alg, L in _algorithm_runs(spec):
        if alg == "ols":
            result = ols_run(problem.A, problem.y, k)
        elif alg == "omp":
            result = omp_run(problem.A, problem.y, k)
        else:
            result = gols_run(problem.A, problem.y, SolverConfig(L=L, k=k))
        outcomes.append(outcome_from_result(problem, result, alg, L, trial, seed))
    return outcomes


def _sweep_worker(args) -> list[TrialOutcome]:
    spec, k, trial = args
    return run_sweep_trial(spec, k, trial)


@dataclass
class SweepArtifacts:
    trial_csv: str
    aggregate_csv: str
    reports: list[MetricsReport]


def run_sweep(spec: ExperimentSpec, jobs: int = 1) -> SweepArtifacts:
    """Execute the full sweep grid and write the trial and aggregate CSVs.

    Numeric output is a pure function of the spec (elapsed columns aside):
    trials are independently seeded, results are sorted before writing, so
    ``jobs`` never changes the files.
    """
    work = [(spec, k, t) for k in spec.k_values for t in range(spec.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_sweep_worker, work, chunksize=8))
    else:
        chunks = [run_sweep_trial(spec, k, t) for (spec, k, t) in work]
    outcomes = [o for chunk in chunks for o in chunk]
    outcomes.sort(key=lambda o: (o.algorithm, o.k, o.L, o.trial))

    reports = []
    cells = sorted(set((o.algorithm, o.k, o.L) for o in outcomes))
    for cell in cells:
        members = [o for o in outcomes if (o.algorithm, o.k, o.L) == cell]
        reports.append(aggregate(members))

    os.makedirs(spec.output_dir, exist_ok=True)
    digest = config_digest(spec)
    comments = [
        f"gols-bench {__version__} config={digest}",
        "mse normalization: squared l2 error / m; err: fraction of true support recovered",
    ]

    trial_path = os.path.join(spec.output_dir, "trials.csv")
    trial_rows = [
        (o.algorithm, o.n, o.m, o.k, o.L, o.trial, o.seed,
         _fmt(o.component_recovery), int(o.exact_support), _fmt(o.mse_full),
         _fmt(o.mse_topk), _fmt(o.residual_norm), o.iterations, _fmt(o.elapsed))
        for o in outcomes
    ]
    _write_csv(trial_path, comments, TRIAL_COLUMNS, trial_rows)

    agg_path = os.path.join(spec.output_dir, "aggregate.csv")
    agg_rows = [
        (r.algorithm, r.n, r.m, r.k, r.L, r.trials,
         _fmt(r.err), _fmt(r.exact_rate), _fmt(r.mse), _fmt(r.mse_topk),
         _fmt(r.time_mean), _fmt(r.time_stddev), int(spec.capped(r.k, r.L)))
        for r in reports
    ]
    _write_csv(agg_path, comments, AGGREGATE_COLUMNS, agg_rows)
    return SweepArtifacts(trial_csv=trial_path, aggregate_csv=agg_path, reports=reports)


def run_phase_trial(spec: PhaseTransitionSpec, n: int, trial: int) -> bool:
    """One noiseless OLS recovery at measurement count n; True on exact recovery."""
    _warm_solver()
    seed = trial_seed(spec.master_seed, (), trial)  # paired across n
    problem = make_problem(
        MatrixEnsemble(spec.matrix_kind, n, spec.m,
                       normalize_columns=spec.normalize_columns),
        SignalEnsemble(spec.signal_dist, spec.m, spec.k),
        0.0,
        seed,
    )
    result = ols_run(problem.A, problem.y, spec.k)
    return exact_support(result.support, problem.support_true, result.x_hat, spec.k)


def _phase_worker(args) -> tuple[int, bool]:
    spec, n, trial = args
    return n, run_phase_trial(spec, n, trial)


@dataclass
class PhaseArtifacts:
    phase_csv: str
    rates: list[tuple[int, float]]
    threshold_n: int | None


def run_phase_transition(spec: PhaseTransitionSpec, jobs: int = 1) -> PhaseArtifacts:
    """Measure the OLS exact-recovery rate along n_values and write the CSV.

    Trial seeds depend only on the trial index, so every n sees the same
    random draws (common random numbers); the output also records the
    smallest n whose rate reaches 1 - delta_target, if any.
    """
    work = [(spec, n, t) for n in spec.n_values for t in range(spec.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            flags = list(pool.map(_phase_worker, work, chunksize=8))
    else:
        flags = [(n, run_phase_trial(spec, n, t)) for (spec, n, t) in work]

    successes = {n: 0 for n in spec.n_values}
    for n, ok in flags:
        successes[n] += int(ok)
    rates = [(n, successes[n] / spec.trials) for n in spec.n_values]
    threshold_n = next((n for n, rate in rates if rate >= 1.0 - spec.delta_target), None)

    os.makedirs(spec.output_dir, exist_ok=True)
    comments = [
        f"gols-bench {__version__} config={config_digest(spec)}",
        f"threshold_n={'none' if threshold_n is None else threshold_n} "
        f"(smallest n with success_rate >= {_fmt(1.0 - spec.delta_target)})",
    ]
    rows = [
        (n, spec.trials, successes[n], _fmt(successes[n] / spec.trials))
        for n in spec.n_values
    ]
    path = os.path.join(spec.output_dir, "phase.csv")
    _write_csv(path, comments, PHASE_COLUMNS, rows)
    return PhaseArtifacts(phase_csv=path, rates=rates, threshold_n=threshold_n)


# Probe grid: m doubles at fixed (n, k, L), so the fitted log-log slope
# isolates the m-linear factor of the per-iteration projection cost.
PROBE_M_VALUES = (128, 256, 512, 1024)
PROBE_N = 64
PROBE_K = 8
PROBE_L = 2


@dataclass
class ProbeArtifacts:
    probe_csv: str
    medians: list[tuple[int, float]]
    slope: float


def run_complexity_probe(output_dir: str = "results",
                         m_values: tuple[int, ...] = PROBE_M_VALUES,
                         n: int = PROBE_N, k: int = PROBE_K, L: int = PROBE_L,
                         repeats: int = 41, master_seed: int = 0) -> ProbeArtifacts:
    """Time GOLS runs across the m grid and fit the log-log runtime slope.

    Repeats are interleaved round-robin across the m grid so that slow
    drift in machine load biases every grid point equally, and the median
    per point discards the remaining spikes.
    """
    cfg = SolverConfig(L=L, k=k)
    problems = {
        m: make_problem(
            MatrixEnsemble("gaussian", n, m),
            SignalEnsemble("gaussian-unit", m, k),
            0.0,
            trial_seed(master_seed, (mi,), 0),
        )
        for mi, m in enumerate(m_values)
    }
    for problem in problems.values():
        gols_run(problem.A, problem.y, cfg)  # warm up compilation, caches, BLAS
    times: dict[int, list[float]] = {m: [] for m in m_values}
    for _ in range(repeats):
        for m in m_values:
            problem = problems[m]
            times[m].append(gols_run(problem.A, problem.y, cfg).elapsed)
    medians = [(m, float(np.median(times[m]))) for m in m_values]

    log_m = np.log([m for m, _ in medians])
    log_t = np.log([t for _, t in medians])
    slope = float(np.polyfit(log_m, log_t, 1)[0])

    os.makedirs(output_dir, exist_ok=True)
    comments = [
        f"gols-bench {__version__} config=probe",
        f"n={n} k={k} L={L} repeats={repeats} slope={_fmt(slope)}",
    ]
    rows = [(m, _fmt(median), repeats) for m, median in medians]
    path = os.path.join(output_dir, "complexity.csv")
    _write_csv(path, comments, ("m", "median_s", "repeats"), rows)
    return ProbeArtifacts(probe_csv=path, medians=medians, slope=slope)


def _write_csv(path, comment_lines, header, rows) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        for line in comment_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
