"""Dense symmetric eigendecomposition and ridge solves."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg


class EigenResult(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def sym_eig(A: np.ndarray) -> EigenResult:
    """Full spectrum of ``(A + A') / 2`` in descending order.

    Each eigenvector is signed so that its largest-magnitude component is
    positive (first such index on ties).
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("sym_eig needs a square matrix")
    if not np.isfinite(A).all():
        raise ValueError("sym_eig: non-finite entries")
    w, V = np.linalg.eigh((A + A.T) / 2)
    w, V = w[::-1], V[:, ::-1]
    if V.size:
        pivot = np.argmax(np.abs(V), axis=0)
        signs = np.sign(V[pivot, np.arange(V.shape[1])])
        signs[signs == 0] = 1.0
        V = V * signs
    return EigenResult(w.copy(), np.ascontiguousarray(V))


def ridge_inverse_apply(A: np.ndarray, eta: float, B: np.ndarray) -> np.ndarray:
    """Solve ``(A + eta I) X = B`` for symmetric PSD ``A`` and ``eta > 0``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    if not (np.isfinite(A).all() and np.isfinite(B).all() and np.isfinite(eta)):
        raise ValueError("ridge_inverse_apply: non-finite input")
    M = (A + A.T) / 2
    M[np.diag_indices_from(M)] += eta
    try:
        return scipy.linalg.solve(M, B, assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        # slightly indefinite A can defeat Cholesky; fall back to LU
        return scipy.linalg.solve(M, B, assume_a="sym")
