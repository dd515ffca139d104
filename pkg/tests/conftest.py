"""Shared independent oracles for the test suite.

These deliberately take different numerical routes than the library:
normal-equations pseudo-inverse instead of QR, SVD-based lstsq instead of
the tracker recursion.
"""

import numpy as np


def pinv_normal_equations(B):
    """Moore-Penrose pseudo-inverse of a full-column-rank matrix via (B^T B)^{-1} B^T."""
    B = np.asarray(B, dtype=np.float64)
    return np.linalg.inv(B.T @ B) @ B.T


def complement_projector_oracle(B):
    """I - B B^+ with the pseudo-inverse from the normal equations."""
    B = np.asarray(B, dtype=np.float64)
    return np.eye(B.shape[0]) - B @ pinv_normal_equations(B)


def lstsq_residual_norm(A, y, support):
    """Residual norm of the least-squares fit on ``support`` via SVD lstsq."""
    cols = A[:, list(support)]
    coeffs, *_ = np.linalg.lstsq(cols, y, rcond=None)
    return float(np.linalg.norm(y - cols @ coeffs))
