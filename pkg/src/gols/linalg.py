"""Dense linear-algebra core: complement-projector tracking and QR least squares."""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import get_lapack_funcs


class InvalidDimension(ValueError):
    """An operand is empty or its dimensions do not match."""


class DegenerateColumn(ValueError):
    """Column lies, numerically, in the span of the already-absorbed columns."""


class RankDeficient(ValueError):
    """Matrix passed to the least-squares solver has dependent columns."""


def as_vector(v, length: int | None = None) -> np.ndarray:
    """Coerce ``v`` to a finite float64 1-D array, optionally of fixed length."""
    out = np.ascontiguousarray(v, dtype=np.float64)
    if out.ndim != 1 or out.size == 0:
        raise InvalidDimension(f"expected a non-empty vector, got shape {out.shape}")
    if length is not None and out.shape[0] != length:
        raise InvalidDimension(f"expected length {length}, got {out.shape[0]}")
    if not np.isfinite(out).all():
        raise InvalidDimension("vector entries must be finite")
    return out


def as_matrix(a, rows: int | None = None) -> np.ndarray:
    """Coerce ``a`` to a finite float64 2-D array, optionally with a fixed row count."""
    out = np.ascontiguousarray(a, dtype=np.float64)
    if out.ndim != 2 or out.shape[0] < 1 or out.shape[1] < 1:
        raise InvalidDimension(f"expected a non-empty matrix, got shape {out.shape}")
    if rows is not None and out.shape[0] != rows:
        raise InvalidDimension(f"expected {rows} rows, got {out.shape[0]}")
    if not np.isfinite(out).all():
        raise InvalidDimension("matrix entries must be finite")
    return out


def default_degeneracy_tol(n: int) -> float:
    """Default threshold on a projected column norm before it counts as dependent."""
    return 1e-10 * math.sqrt(n)


class ProjectionTracker:
    """Projector onto the orthogonal complement of a growing set of columns.

    Holds the dense matrix ``D``, initially the identity, and shrinks it by
    one rank-one downdate per absorbed column::

        d = D a / ||D a||_2,   D <- D - d d^T

    ``D`` stays symmetric and idempotent, annihilates every absorbed column,
    and satisfies trace(D) = n - absorbed.

    The default ``degeneracy_tol`` of ``1e-10 * sqrt(n)`` rejects columns
    that are numerically inside the absorbed span; exact dependence has
    probability zero for the random ensembles this library targets, so the
    tolerance only guards collapsed directions.
    """

    def __init__(self, n: int, degeneracy_tol: float | None = None):
        n = int(n)
        if n < 1:
            raise InvalidDimension("tracker dimension must be >= 1")
        if degeneracy_tol is None:
            degeneracy_tol = default_degeneracy_tol(n)
        if degeneracy_tol <= 0.0:
            raise ValueError("degeneracy_tol must be positive")
        self.n = n
        self.D = np.eye(n)
        self.absorbed = 0
        self.degeneracy_tol = float(degeneracy_tol)
        self._scratch = np.empty((n, n))

    def copy(self) -> "ProjectionTracker":
        dup = ProjectionTracker(self.n, self.degeneracy_tol)
        dup.D = self.D.copy()
        dup.absorbed = self.absorbed
        return dup

    def apply(self, v) -> np.ndarray:
        """Project ``v`` onto the tracked complement subspace (returns ``D v``)."""
        return self.D @ as_vector(v, self.n)

    def absorb(self, a) -> None:
        """Remove the direction of column ``a`` from the complement subspace.

        Raises DegenerateColumn when ``||D a||_2 <= degeneracy_tol``, i.e. the
        column adds nothing beyond the directions already absorbed.
        """
        a = as_vector(a, self.n)
        z = self.D @ a
        nn = float(z @ z)
        if nn <= self.degeneracy_tol ** 2:
            raise DegenerateColumn(
                f"projected column norm {math.sqrt(nn):.3e} is within the "
                f"degeneracy tolerance {self.degeneracy_tol:.3e}"
            )
        d = z / math.sqrt(nn)
        np.multiply(d[:, None], d, out=self._scratch)
        self.D -= self._scratch
        self.absorbed += 1

    def absorb_batch(self, cols) -> None:
        """Absorb the columns of ``cols`` left to right, all or nothing.

        Equivalent to calling ``absorb`` on each column in order (the running
        directions are orthogonalized against each other before a single
        rank-L downdate is applied), but with one projection pass instead of
        L.  If any column turns degenerate the tracker is left unchanged and
        DegenerateColumn carries the offending position.
        """
        cols = as_matrix(cols, rows=self.n)
        self.absorb_projected(self.D @ cols)

    def absorb_projected(self, projected) -> None:
        """Batch absorb from precomputed projections ``projected = D @ cols``.

        The caller must supply projections taken against the tracker's
        current matrix (solvers already hold them from the scoring pass).
        Atomic like ``absorb_batch``: on degeneracy the tracker is unchanged.
        """
        projected = as_matrix(projected, rows=self.n)
        width = projected.shape[1]
        directions = np.empty((self.n, width))
        tol_sq = self.degeneracy_tol ** 2
        for l in range(width):
            v = projected[:, l].copy()
            for p in range(l):
                v -= directions[:, p] * float(directions[:, p] @ v)
            nn = float(v @ v)
            if nn <= tol_sq:
                raise DegenerateColumn(
                    f"batch column {l}: projected norm {math.sqrt(nn):.3e} is "
                    f"within the degeneracy tolerance {self.degeneracy_tol:.3e}"
                )
            directions[:, l] = v / math.sqrt(nn)
        self.D -= directions @ directions.T
        self.absorbed += width

    def drift(self) -> float:
        """Frobenius idempotency defect ``||D D - D||_F``."""
        return float(np.linalg.norm(self.D @ self.D - self.D, ord="fro"))

    def resymmetrize(self) -> None:
        """Average ``D`` with its transpose.

        The downdates keep D exactly symmetric bit for bit (the rank-one and
        rank-L updates are symmetric by construction), so this is a no-op for
        trackers driven through absorb; it remains available as a hedge for
        externally perturbed matrices.
        """
        self.D = 0.5 * (self.D + self.D.T)


# Smallest permitted R diagonal relative to the largest before the system
# is declared rank deficient.
RANK_TOL = 1e-10

# LAPACK Householder-QR least-squares driver, resolved once for float64
_GELS, = get_lapack_funcs(("gels",), (np.empty((1, 1)), np.empty(1)))


def least_squares(A_S, y, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Solve ``min_x ||y - A_S x||_2`` through a Householder QR factorization.

    Parameters
    ----------
    A_S : (rows, cols) array with rows >= cols and independent columns
    y : (rows,) array
    rank_tol : relative tolerance on the R-factor diagonal

    Returns
    -------
    (cols,) coefficient array.  The residual ``y - A_S x`` is orthogonal to
    every column of ``A_S`` up to rounding.

    Raises RankDeficient when the smallest diagonal entry of R falls below
    ``rank_tol`` times the largest, and InvalidDimension for wide systems.
    Normal equations are deliberately not used here; they serve as the
    independent oracle in the test suite instead.
    """
    A_S = as_matrix(A_S)
    rows, cols = A_S.shape
    y = as_vector(y, rows)
    if rows < cols:
        raise InvalidDimension(f"least squares needs rows >= cols, got {rows}x{cols}")
    factors, solution, info = _GELS(A_S, y)
    diag = np.abs(np.diag(factors[:cols, :cols]))
    if info != 0 or diag.min() <= rank_tol * diag.max():
        raise RankDeficient(
            f"factor diagonal {diag.min():.3e} below {rank_tol:g} x {diag.max():.3e}"
        )
    return solution[:cols]
