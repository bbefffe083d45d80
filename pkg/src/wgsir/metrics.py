"""Agreement between estimated and true sufficient predictors.

Both measures are invariant to the affine indeterminacy of sufficient
predictors. Degenerate inputs (a sample with zero spread) give 0 and raise a
:class:`DegenerateWarning`.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.spatial.distance import cdist


class DegenerateWarning(RuntimeWarning):
    pass


def _as_sample(U) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    if U.ndim != 2:
        raise ValueError("predictor sample must be 1-D or 2-D")
    if not np.isfinite(U).all():
        raise ValueError("predictor sample has non-finite entries")
    return U


def multivariate_ranks(U) -> np.ndarray:
    """Spatial ranks ``n^-1 sum_l (U_l - U_i) / ||U_l - U_i||``.

    Pairs at distance zero (including ``l = i``) contribute nothing.
    """
    U = _as_sample(U)
    diff = U[None, :, :] - U[:, None, :]          # [i, l] = U_l - U_i
    norm = np.sqrt(np.sum(diff * diff, axis=2))
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(norm[:, :, None] > 0, diff / norm[:, :, None], 0.0)
    return unit.sum(axis=1) / U.shape[0]


def rvmr(U, V) -> float:
    """RV coefficient between the multivariate ranks of ``U`` and ``V``."""
    U, V = _as_sample(U), _as_sample(V)
    if U.shape[0] != V.shape[0]:
        raise ValueError(f"sample sizes differ: {U.shape[0]} vs {V.shape[0]}")
    n = U.shape[0]
    Ru = multivariate_ranks(U)
    Rv = multivariate_ranks(V)
    Ru = Ru - Ru.mean(axis=0)
    Rv = Rv - Rv.mean(axis=0)
    cuv = Ru.T @ Rv / n
    cvu = Rv.T @ Ru / n
    cuu = Ru.T @ Ru / n
    cvv = Rv.T @ Rv / n
    # tr(cov_uv cov_vu), summed both ways so rvmr(U, V) == rvmr(V, U) bitwise
    num = float((np.sum(cuv * cuv) + np.sum(cvu * cvu)) / 2)
    den = float(np.sqrt(np.sum(cuu * cuu) * np.sum(cvv * cvv)))
    if not den > 0:
        warnings.warn("RVMR undefined: rank sample has zero variance", DegenerateWarning,
                      stacklevel=2)
        return 0.0
    return float(min(max(num / den, 0.0), 1.0))


def _double_centered(X: np.ndarray) -> np.ndarray:
    A = cdist(X, X)
    return A - A.mean(axis=0, keepdims=True) - A.mean(axis=1, keepdims=True) + A.mean()


def distance_correlation(U, V) -> float:
    """Sample distance correlation (V-statistic form)."""
    U, V = _as_sample(U), _as_sample(V)
    if U.shape[0] != V.shape[0]:
        raise ValueError(f"sample sizes differ: {U.shape[0]} vs {V.shape[0]}")
    if U.shape[0] < 2:
        raise ValueError("need at least 2 observations")
    A = _double_centered(U)
    B = _double_centered(V)
    dcov2 = float(np.mean(A * B))
    dvar = float(np.mean(A * A)) * float(np.mean(B * B))
    if not dvar > 0:
        warnings.warn("distance correlation undefined: constant sample", DegenerateWarning,
                      stacklevel=2)
        return 0.0
    return float(np.sqrt(min(max(dcov2, 0.0) / np.sqrt(dvar), 1.0)))
