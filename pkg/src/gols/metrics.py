"""Per-trial recovery metrics and grid-cell aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import InvalidDimension, as_vector


class InvalidSparsity(ValueError):
    """Sparsity level is zero or inconsistent with the true support."""


class EmptyAggregate(ValueError):
    """Aggregation over an empty outcome list."""


@dataclass(frozen=True)
class TrialOutcome:
    """Metrics of a single (algorithm, problem) run.

    ``component_recovery`` is the fraction of true support indices present
    in the full estimated support; ``exact_support`` is the strict variant
    that requires the true support to survive top-k truncation of the
    estimate.  ``mse_topk`` applies the same truncation before measuring
    the error.  The identification fields mirror the trial CSV schema.
    """

    algorithm: str
    n: int
    m: int
    k: int
    L: int
    trial: int
    seed: int
    component_recovery: float
    exact_support: bool
    mse_full: float
    mse_topk: float
    residual_norm: float
    iterations: int
    elapsed: float


@dataclass(frozen=True)
class MetricsReport:
    """Aggregate over one grid cell (algorithm, k, L)."""

    algorithm: str
    n: int
    m: int
    k: int
    L: int
    trials: int
    err: float
    exact_rate: float
    mse: float
    mse_topk: float
    time_mean: float
    time_stddev: float


def err_components(S_est, S_true, k: int) -> float:
    """Fraction of the true support recovered: ``|S_est & S_true| / k``."""
    if k < 1:
        raise InvalidSparsity("k must be >= 1")
    true_set = set(int(i) for i in S_true)
    if len(true_set) != k:
        raise InvalidSparsity(f"true support has {len(true_set)} indices, expected {k}")
    est_set = set(int(i) for i in S_est)
    return len(est_set & true_set) / k


def _top_k_indices(x_hat: np.ndarray, candidates, k: int) -> np.ndarray:
    idx = np.asarray(sorted(int(i) for i in candidates), dtype=np.intp)
    if idx.size == 0:
        return idx
    order = np.lexsort((idx, -np.abs(x_hat[idx])))  # magnitude desc, index asc
    return idx[order[:k]]


def exact_support(S_est, S_true, x_hat, k: int) -> bool:
    """True iff the true support survives top-k-by-magnitude truncation of the estimate."""
    if k < 1:
        raise InvalidSparsity("k must be >= 1")
    x_hat = as_vector(x_hat)
    top = set(int(i) for i in _top_k_indices(x_hat, S_est, k))
    return set(int(i) for i in S_true) <= top


def truncate_top_k(x_hat, k: int) -> np.ndarray:
    """Keep the k largest-magnitude entries of ``x_hat``, zeroing the rest."""
    if k < 1:
        raise InvalidSparsity("k must be >= 1")
    x_hat = as_vector(x_hat)
    keep = _top_k_indices(x_hat, range(x_hat.shape[0]), k)
    out = np.zeros_like(x_hat)
    out[keep] = x_hat[keep]
    return out


def mse(x_true, x_hat) -> float:
    """Mean-square error ``||x_true - x_hat||_2^2 / m``.

    The normalization by the signal length m is this library's fixed
    convention and is stated in every output header.
    """
    x_true = as_vector(x_true)
    x_hat = as_vector(x_hat)
    if x_true.shape != x_hat.shape:
        raise InvalidDimension(f"length mismatch {x_true.shape[0]} vs {x_hat.shape[0]}")
    diff = x_true - x_hat
    return float(diff @ diff) / x_true.shape[0]


def aggregate(outcomes) -> MetricsReport:
    """Arithmetic means (and timing stddev) over one homogeneous grid cell.

    All outcomes must share (algorithm, n, m, k, L).  The timing standard
    deviation is the population value (ddof=0).  Sums use exact summation
    (math.fsum), so the outcome order never matters, bit for bit.
    """
    outcomes = list(outcomes)
    if not outcomes:
        raise EmptyAggregate("no outcomes to aggregate")
    cell = (outcomes[0].algorithm, outcomes[0].n, outcomes[0].m,
            outcomes[0].k, outcomes[0].L)
    for o in outcomes:
        if (o.algorithm, o.n, o.m, o.k, o.L) != cell:
            raise ValueError(f"mixed grid cell: {(o.algorithm, o.n, o.m, o.k, o.L)} vs {cell}")

    count = len(outcomes)

    def mean_of(values):
        return math.fsum(values) / count

    time_mean = mean_of(o.elapsed for o in outcomes)
    time_var = math.fsum((o.elapsed - time_mean) ** 2 for o in outcomes) / count
    return MetricsReport(
        algorithm=cell[0],
        n=cell[1],
        m=cell[2],
        k=cell[3],
        L=cell[4],
        trials=count,
        err=mean_of(o.component_recovery for o in outcomes),
        exact_rate=mean_of(1.0 if o.exact_support else 0.0 for o in outcomes),
        mse=mean_of(o.mse_full for o in outcomes),
        mse_topk=mean_of(o.mse_topk for o in outcomes),
        time_mean=time_mean,
        time_stddev=math.sqrt(time_var),
    )
