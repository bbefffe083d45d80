"""Tuning-constant selection by GCV and order determination by a BIC-type rule."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

EPS_GRID = tuple(10.0 ** k for k in range(-6, 1))


class SelectionError(ValueError):
    pass


def _gcv_curve(Kx: np.ndarray, Ky: np.ndarray, grid: Sequence[float]) -> np.ndarray:
    """GCV of ridge-smoothing ``Ky`` on ``Kx`` for every eps in ``grid``.

    With ``Kx = U diag(w) U'`` the residual operator ``I - Kx (Kx + eta I)^-1``
    is ``U diag(eta / (w + eta)) U'``, so one eigendecomposition serves the
    whole grid. Degenerate grid points come back as NaN.
    """
    Kx = np.asarray(Kx, dtype=float)
    Ky = np.asarray(Ky, dtype=float)
    if Kx.shape != Ky.shape or Kx.ndim != 2 or Kx.shape[0] != Kx.shape[1]:
        raise SelectionError("Kx and Ky must be square of equal size")
    w, U = np.linalg.eigh((Kx + Kx.T) / 2)
    lam_max = w[-1]
    P = U.T @ Ky
    out = np.empty(len(grid))
    for g, eps in enumerate(grid):
        if not eps > 0:
            raise SelectionError(f"eps must be positive, got {eps}")
        eta = eps * lam_max
        with np.errstate(invalid="ignore", divide="ignore"):
            shrink = eta / (w + eta)
        num = float(np.sum((shrink[:, None] * P) ** 2))
        den = float(np.sum(shrink)) ** 2
        out[g] = num / den if den > 0 and np.isfinite(den) else np.nan
    return out


def gcv(Kx: np.ndarray, Ky: np.ndarray, eps: float) -> float:
    """Generalized cross-validation score for the ridge constant ``eps``.

    ``||Ky - Kx (Kx + eps lmax I)^-1 Ky||_F^2 / tr(I - Kx (Kx + eps lmax I)^-1)^2``
    with ``lmax`` the largest eigenvalue of ``Kx``. Swap the arguments for the
    response-side criterion.
    """
    value = _gcv_curve(Kx, Ky, [eps])[0]
    if np.isnan(value):
        raise SelectionError("degenerate GCV: trace term vanishes")
    return float(value)


def select_tuning(Kx: np.ndarray, Ky: np.ndarray, grid: Sequence[float] = EPS_GRID) -> float:
    """Grid minimizer of ``gcv(Kx, Ky, .)``; ties go to the smallest grid value."""
    grid = sorted(float(e) for e in grid)
    return _argmin_grid(_gcv_curve(Kx, Ky, grid), grid)


def select_epsilon(Kx: np.ndarray, Ky: np.ndarray,
                   grid: Sequence[float] = EPS_GRID) -> tuple[float, float]:
    """``(eps_x, eps_y)``: the predictor-side and response-side GCV minimizers."""
    return select_tuning(Kx, Ky, grid), select_tuning(Ky, Kx, grid)


def _argmin_grid(scores: np.ndarray, grid: Sequence[float]) -> float:
    ok = ~np.isnan(scores)
    if not ok.any():
        raise SelectionError("GCV degenerate at every grid point")
    best = np.nanmin(scores)
    return grid[int(np.flatnonzero(ok & (scores == best))[0])]


@dataclass(frozen=True)
class OrderSelectionResult:
    d_hat: int
    scores: np.ndarray
    c0: float


def bic_order(eigenvalues: Sequence[float], n: int, c0: float = 2.0,
              k_max: int | None = None) -> OrderSelectionResult:
    """``argmax_k  sum_{i<=k} lambda_i - c0 lambda_1 n^{-1/2} log(n) k``.

    Eigenvalues in ``[-1e-8, 0)`` are treated as zero.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if not np.isfinite(lam).all():
        raise SelectionError("eigenvalues must be finite")
    if n < 2:
        raise SelectionError("n must be >= 2")
    if lam.size == 0:
        return OrderSelectionResult(0, np.zeros(1), float(c0))
    lam = np.where((lam < 0) & (lam >= -1e-8), 0.0, lam)
    if lam[0] < 0:
        raise SelectionError(f"leading eigenvalue is negative ({lam[0]:.3g})")
    k_max = lam.size if k_max is None else min(int(k_max), lam.size)
    k = np.arange(k_max + 1)
    penalty = c0 * lam[0] * np.log(n) / np.sqrt(n)
    scores = np.concatenate([[0.0], np.cumsum(lam[:k_max])]) - penalty * k
    d_hat = int(np.argmax(scores))   # first maximum = smallest k on ties
    return OrderSelectionResult(d_hat, scores, float(c0))
