"""Greedy sparse recovery: OLS, generalized OLS, an OMP baseline, and a brute-force oracle."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np
from numba import jit

from .linalg import (
    DegenerateColumn,
    InvalidDimension,
    ProjectionTracker,
    as_matrix,
    as_vector,
    default_degeneracy_tol,
    least_squares,
)


class EmptyCandidates(ValueError):
    """Selection was asked to rank an empty candidate list."""


class TooLarge(ValueError):
    """Exhaustive enumeration would exceed the instance-size guard."""


SKIP_COLUMN = "skip-column"
ABORT = "abort"
_POLICIES = (SKIP_COLUMN, ABORT)


@dataclass(frozen=True)
class SolverConfig:
    """Greedy solver parameters.

    ``L`` columns are selected per iteration toward a target sparsity ``k``.
    ``residual_tol``, when set, stops the iteration once the projected
    residual falls below ``residual_tol * ||y||_2``; left unset the solver
    runs the full iteration count.  ``degeneracy_policy`` decides what to do
    with a candidate column that is numerically dependent on the selected
    set: "skip-column" drops it and moves on, "abort" raises.
    """

    L: int = 1
    k: int = 1
    residual_tol: float | None = None
    degeneracy_policy: str = SKIP_COLUMN

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.residual_tol is not None and self.residual_tol < 0:
            raise ValueError("residual_tol must be >= 0")
        if self.degeneracy_policy not in _POLICIES:
            raise ValueError(f"degeneracy_policy must be one of {_POLICIES}")


@dataclass
class RecoveryResult:
    """Solver output: selection order, dense estimate, and run statistics.

    ``support`` lists column indices in the order they were selected;
    ``x_hat`` is the full-length estimate, zero off the support;
    ``elapsed`` is the wall-clock time of the solver call in seconds.
    """

    support: list[int]
    x_hat: np.ndarray
    residual_norm: float
    iterations: int
    elapsed: float


def score_column(y, tracker: ProjectionTracker, a_j) -> float:
    """Normalized correlation of ``y`` with the complement-projected column.

    Returns ``|y^T D a_j| / ||D a_j||_2`` where ``D`` is the tracker's
    current complement projector.  Raises DegenerateColumn when the
    projected column norm is inside the tracker's degeneracy tolerance.
    """
    y = as_vector(y, tracker.n)
    z = tracker.apply(a_j)
    norm = float(np.linalg.norm(z))
    if norm <= tracker.degeneracy_tol:
        raise DegenerateColumn(
            f"projected column norm {norm:.3e} is within the "
            f"degeneracy tolerance {tracker.degeneracy_tol:.3e}"
        )
    return abs(float(y @ z)) / norm


def select_top_L(scores, L: int) -> list[int]:
    """Indices of the ``L`` largest scores; ties go to the smaller index.

    ``scores`` is an iterable of (index, score) pairs.  Returns
    ``min(L, len(scores))`` indices ordered by descending score, then
    ascending index.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    pairs = list(scores)
    if not pairs:
        raise EmptyCandidates("no candidate scores to select from")
    ranked = sorted(pairs, key=lambda p: (-p[1], p[0]))
    return [int(idx) for idx, _ in ranked[:L]]


@jit(nopython=True, cache=True)
def _greedy_select_kernel(A_T, y, L, max_iterations, tol_sq, residual_tol_sq,
                          abort_on_degenerate):
    """Compiled greedy selection loop maintaining the dense complement projector.

    Takes the transposed coefficient matrix so every inner loop streams
    contiguous rows.  Returns (selected, n_selected, iterations, bad_column,
    D); ``bad_column`` is -1 unless a degenerate candidate was hit under the
    abort policy.  The arithmetic mirrors ProjectionTracker.absorb exactly:
    per chosen column, d = D a / ||D a|| and D <- D - d d^T, in score order.
    D stays bitwise symmetric, so A^T D gives the projected columns as rows.
    """
    m, n = A_T.shape
    D = np.eye(n)
    selected = np.full(m, -1, dtype=np.int64)
    blocked = np.zeros(m, dtype=np.bool_)
    key = np.empty(m)
    z = np.empty(n)
    n_selected = 0
    iterations = 0
    y_sq = 0.0
    for i in range(n):
        y_sq += y[i] * y[i]

    for _ in range(max_iterations):
        projected = np.dot(A_T, D)  # row j holds D a_j
        # ranking key: squared normalized correlation (same order as the score)
        for j in range(m):
            if blocked[j]:
                key[j] = -np.inf
                continue
            row = projected[j]
            sq = 0.0
            corr = 0.0
            for i in range(n):
                pij = row[i]
                sq += pij * pij
                corr += y[i] * pij
            if sq <= tol_sq:
                if abort_on_degenerate:
                    return selected, n_selected, iterations, j, D
                blocked[j] = True  # skipped for good: the complement only shrinks
                key[j] = -np.inf
            else:
                key[j] = corr * corr / sq

        batch = 0
        while batch < L:
            # highest key, ties to the smaller index
            best = -1
            best_key = -np.inf
            for j in range(m):
                if not blocked[j] and key[j] > best_key:
                    best = j
                    best_key = key[j]
            if best == -1:
                break
            # rank-one downdate with the current projector
            arow = A_T[best]
            for i in range(n):
                acc = 0.0
                drow = D[i]
                for jj in range(n):
                    acc += drow[jj] * arow[jj]
                z[i] = acc
            nn = 0.0
            for i in range(n):
                nn += z[i] * z[i]
            if nn <= tol_sq:
                # collapsed inside the batch (e.g. duplicate of a chosen column)
                if abort_on_degenerate:
                    return selected, n_selected, iterations, best, D
                blocked[best] = True  # the next-best candidate takes the slot
                continue
            inv = 1.0 / np.sqrt(nn)
            for i in range(n):
                z[i] *= inv
            for i in range(n):
                zi = z[i]
                drow = D[i]
                for jj in range(n):
                    drow[jj] -= zi * z[jj]
            blocked[best] = True
            selected[n_selected] = best
            n_selected += 1
            batch += 1

        if batch == 0:
            break  # every remaining candidate is degenerate: partial result
        iterations += 1
        if residual_tol_sq >= 0.0:
            r_sq = 0.0
            for i in range(n):
                acc = 0.0
                drow = D[i]
                for jj in range(n):
                    acc += drow[jj] * y[jj]
                r_sq += acc * acc
            if r_sq <= residual_tol_sq * y_sq:
                break

    return selected, n_selected, iterations, -1, D


def gols_run(A, y, cfg: SolverConfig) -> RecoveryResult:
    """Generalized orthogonal least-squares.

    Per iteration, every remaining candidate column is scored by
    ``|y^T D a_j| / ||D a_j||_2`` with ``D`` the projector onto the
    complement of the selected columns' span, the top ``cfg.L`` scores are
    selected (ties to the smaller index), and the chosen columns are
    absorbed into the projector one rank-one downdate at a time, in score
    order.  The loop runs ``min(cfg.k, n // cfg.L)`` times; afterwards the
    estimate solves least squares on the selected columns.

    With ``cfg.L == 1`` this is exactly OLS: each step picks the column
    whose inclusion minimizes the least-squares residual norm.

    Candidates that turn degenerate are handled per
    ``cfg.degeneracy_policy``; under "skip-column" the next-best-scoring
    candidate fills the slot and the run returns a partial result if every
    remaining candidate is degenerate.
    """
    t0 = time.perf_counter()
    A = as_matrix(A)
    n, m = A.shape
    y = as_vector(y, n)
    if cfg.k > m:
        raise InvalidDimension(f"sparsity target {cfg.k} exceeds column count {m}")
    if cfg.L > n:
        raise InvalidDimension(f"per-iteration selection {cfg.L} exceeds row count {n}")

    tol = default_degeneracy_tol(n)
    residual_tol_sq = -1.0 if cfg.residual_tol is None else float(cfg.residual_tol) ** 2
    selected, n_selected, iterations, bad_column, _ = _greedy_select_kernel(
        np.ascontiguousarray(A.T), y, cfg.L, min(cfg.k, n // cfg.L), tol * tol,
        residual_tol_sq, cfg.degeneracy_policy == ABORT,
    )
    if bad_column >= 0:
        raise DegenerateColumn(f"candidate column {bad_column} is numerically dependent")
    return _finish(A, y, [int(j) for j in selected[:n_selected]], iterations, t0)


def ols_run(A, y, k: int, residual_tol: float | None = None,
            degeneracy_policy: str = SKIP_COLUMN) -> RecoveryResult:
    """Orthogonal least-squares: ``gols_run`` with one column per iteration."""
    cfg = SolverConfig(L=1, k=k, residual_tol=residual_tol,
                       degeneracy_policy=degeneracy_policy)
    return gols_run(A, y, cfg)


def omp_run(A, y, k: int) -> RecoveryResult:
    """Orthogonal matching pursuit baseline.

    Per iteration picks the remaining column most correlated with the
    current residual (``argmax_j |a_j^T r|``, ties to the smaller index),
    refits the coefficients on the selected set by least squares, and
    updates the residual.  Runs exactly ``k`` iterations, so the support
    has size ``k``.  The full refit is recomputed each iteration; this
    baseline favors correctness over speed.
    """
    t0 = time.perf_counter()
    A = as_matrix(A)
    n, m = A.shape
    y = as_vector(y, n)
    if not 1 <= k <= m:
        raise InvalidDimension(f"sparsity target {k} must be in [1, {m}]")

    active = np.ones(m, dtype=bool)
    selected: list[int] = []
    residual = y
    for _ in range(k):
        correlation = np.abs(A.T @ residual)
        correlation[~active] = -np.inf
        j = int(np.argmax(correlation))  # first occurrence: smaller index wins ties
        selected.append(j)
        active[j] = False
        coeffs = least_squares(A[:, selected], y)
        residual = y - A[:, selected] @ coeffs

    return _finish(A, y, selected, k, t0)


def exhaustive_oracle(A, y, k: int):
    """Brute-force l0-constrained least squares over every k-subset.

    Enumerates all ``C(m, k)`` supports in lexicographic order, solves the
    least-squares fit on each, and returns the tuple
    ``(support, x_hat, residual_norm)`` of the global minimizer; exact ties
    keep the lexicographically smallest support.  Guarded to instances with
    ``C(m, k) <= 10**6``.
    """
    A = as_matrix(A)
    n, m = A.shape
    y = as_vector(y, n)
    if not 1 <= k <= m:
        raise InvalidDimension(f"sparsity target {k} must be in [1, {m}]")
    if math.comb(m, k) > 10**6:
        raise TooLarge(f"C({m}, {k}) = {math.comb(m, k)} exceeds the 1e6 guard")

    best_res = math.inf
    best_support = None
    best_coeffs = None
    for support in itertools.combinations(range(m), k):
        cols = A[:, support]
        coeffs, *_ = np.linalg.lstsq(cols, y, rcond=None)
        res = float(np.linalg.norm(y - cols @ coeffs))
        if res < best_res:
            best_res = res
            best_support = support
            best_coeffs = coeffs

    x_hat = np.zeros(m)
    x_hat[list(best_support)] = best_coeffs
    return list(best_support), x_hat, best_res


def _finish(A, y, selected, iterations, t0) -> RecoveryResult:
    m = A.shape[1]
    x_hat = np.zeros(m)
    if selected:
        cols = A[:, selected]
        coeffs = least_squares(cols, y)
        x_hat[selected] = coeffs
        residual_norm = float(np.linalg.norm(y - cols @ coeffs))
    else:
        residual_norm = float(np.linalg.norm(y))
    return RecoveryResult(
        support=list(selected),
        x_hat=x_hat,
        residual_norm=residual_norm,
        iterations=iterations,
        elapsed=time.perf_counter() - t0,
    )
