"""Wasserstein, sliced-Wasserstein and Hellinger distances between measures.

Empirical distances reduce to one-dimensional optimal transport: for
univariate samples of equal size the 2-Wasserstein distance is the root mean
squared difference of order statistics; for unequal sizes the quantile
functions are compared on a fixed midpoint grid. Multivariate samples are
compared through random one-dimensional projections.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform
from scipy.special import betaln

from .measures import EmpiricalMeasure, MeasureError

QUANTILE_GRID = 1000
METRICS = ("W2", "SW2")


class DistanceError(ValueError):
    pass


@dataclass(frozen=True)
class SlicingSpec:
    """Monte Carlo slicing: ``L`` directions drawn uniformly on the sphere."""

    L: int
    seed: int
    dim: int

    def __post_init__(self):
        if self.L < 1:
            raise DistanceError(f"L must be >= 1, got {self.L}")
        if self.dim < 1:
            raise DistanceError(f"dim must be >= 1, got {self.dim}")

    @property
    def directions(self) -> np.ndarray:
        """Unit vectors, shape (L, dim)."""
        return _directions(self.L, self.seed, self.dim)


@functools.lru_cache(maxsize=64)
def _directions(L: int, seed: int, dim: int) -> np.ndarray:
    g = np.random.default_rng(seed).standard_normal((L, dim))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    theta = g / norms
    theta.setflags(write=False)
    return theta


@dataclass(frozen=True)
class DistanceMatrix:
    values: np.ndarray
    metric: str

    def __post_init__(self):
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DistanceError("distance matrix must be square")
        if self.metric not in METRICS:
            raise DistanceError(f"unknown metric {self.metric!r}")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def to_csv(self, path: str | Path) -> None:
        np.savetxt(path, self.values, delimiter=",", fmt="%.17g")


# ---------------------------------------------------------------- 1-D OT

def quantile_grid_values(sorted_x: np.ndarray, N: int = QUANTILE_GRID) -> np.ndarray:
    """Empirical quantile function at levels ``(j - 1/2)/N``, j = 1..N.

    Uses the left-continuous inverse ``inf{x : F(x) >= s}``, i.e. the order
    statistic of rank ``ceil(s m)``. Works along the last axis.
    """
    m = sorted_x.shape[-1]
    j = np.arange(1, N + 1)
    # ceil((2j-1) m / 2N) in exact integer arithmetic
    rank = ((2 * j - 1) * m + 2 * N - 1) // (2 * N)
    return sorted_x[..., rank - 1]


def _w2sq_sorted(sa: np.ndarray, sb: np.ndarray) -> float:
    if sa.shape[-1] == sb.shape[-1]:
        d = sa - sb
    else:
        d = quantile_grid_values(sa) - quantile_grid_values(sb)
    return float(np.mean(d * d))


def w2_empirical_1d(a: EmpiricalMeasure, b: EmpiricalMeasure) -> float:
    """2-Wasserstein distance between two univariate empirical measures."""
    if a.dim != 1 or b.dim != 1:
        raise DistanceError(f"w2_empirical_1d needs univariate measures, got dims {a.dim}, {b.dim}")
    return float(np.sqrt(_w2sq_sorted(a.sorted_values, b.sorted_values)))


def sliced_w2sq_terms(a: EmpiricalMeasure, b: EmpiricalMeasure,
                      slicing: SlicingSpec) -> np.ndarray:
    """Per-direction squared W2 between projections, shape (L,)."""
    if a.dim != b.dim:
        raise DistanceError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if slicing.dim != a.dim:
        raise DistanceError(f"slicing dim {slicing.dim} does not match measures ({a.dim})")
    theta = slicing.directions
    pa = np.sort(a.project(theta), axis=1)
    pb = np.sort(b.project(theta), axis=1)
    if pa.shape[1] == pb.shape[1]:
        d = pa - pb
    else:
        d = quantile_grid_values(pa) - quantile_grid_values(pb)
    return np.mean(d * d, axis=1)


def sw2_empirical(a: EmpiricalMeasure, b: EmpiricalMeasure,
                  slicing: SlicingSpec | None = None) -> float:
    """Monte Carlo sliced 2-Wasserstein distance.

    Univariate inputs bypass slicing and return :func:`w2_empirical_1d`.
    """
    if a.dim != b.dim:
        raise DistanceError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.dim == 1:
        return w2_empirical_1d(a, b)
    if slicing is None:
        raise DistanceError("SW2 on multivariate measures needs a SlicingSpec")
    return float(np.sqrt(np.mean(sliced_w2sq_terms(a, b, slicing))))


# ---------------------------------------------------------- closed forms

def _check_cov(S, name: str) -> np.ndarray:
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if S.shape[0] != S.shape[1]:
        raise DistanceError(f"{name} is not square")
    if not np.allclose(S, S.T, rtol=0, atol=1e-12 * max(1.0, np.abs(S).max())):
        raise DistanceError(f"{name} is not symmetric")
    return (S + S.T) / 2


def _psd_sqrt(S: np.ndarray, name: str) -> np.ndarray:
    w, V = np.linalg.eigh(S)
    if w.min() < -1e-10:
        raise DistanceError(f"{name} is indefinite (eigenvalue {w.min():.3g})")
    w = np.where(w < 1e-12, 0.0, w)
    return (V * np.sqrt(w)) @ V.T


def w2_gaussian(m1, S1, m2, S2) -> float:
    """2-Wasserstein distance between ``N(m1, S1)`` and ``N(m2, S2)``."""
    m1 = np.atleast_1d(np.asarray(m1, dtype=float))
    m2 = np.atleast_1d(np.asarray(m2, dtype=float))
    S1 = _check_cov(S1, "S1")
    S2 = _check_cov(S2, "S2")
    if not (m1.shape[0] == m2.shape[0] == S1.shape[0] == S2.shape[0]):
        raise DistanceError("mean/covariance dimensions disagree")
    _psd_sqrt(S1, "S1")
    r2 = _psd_sqrt(S2, "S2")
    cross = _psd_sqrt((r2 @ S1 @ r2 + (r2 @ S1 @ r2).T) / 2, "cross term")
    # symmetric form: tr S1 + tr S2 - 2 tr sqrt(S2^1/2 S1 S2^1/2)
    w2sq = float(np.sum((m1 - m2) ** 2) + np.trace(S1) + np.trace(S2) - 2 * np.trace(cross))
    return float(np.sqrt(max(w2sq, 0.0)))


def hellinger_beta(a1: float, b1: float, a2: float, b2: float) -> float:
    """``1 - BC`` between ``Beta(a1, b1)`` and ``Beta(a2, b2)``.

    ``BC = B((a1+a2)/2, (b1+b2)/2) / sqrt(B(a1,b1) B(a2,b2))`` is the
    Bhattacharyya coefficient. Accepts numpy arrays (broadcast).
    """
    a1, b1, a2, b2 = (np.asarray(x, dtype=float) for x in (a1, b1, a2, b2))
    if np.any(a1 <= 0) or np.any(b1 <= 0) or np.any(a2 <= 0) or np.any(b2 <= 0):
        raise DistanceError("Beta parameters must be positive")
    log_bc = betaln((a1 + a2) / 2, (b1 + b2) / 2) - 0.5 * (betaln(a1, b1) + betaln(a2, b2))
    h = np.clip(1.0 - np.exp(log_bc), 0.0, 1.0)
    return float(h) if h.ndim == 0 else h


def hellinger_gaussian_sq(m1, S1, m2, S2) -> float:
    """Squared Hellinger distance ``1 - BC`` between two Gaussians."""
    m1 = np.atleast_1d(np.asarray(m1, dtype=float))
    m2 = np.atleast_1d(np.asarray(m2, dtype=float))
    S1 = _check_cov(S1, "S1")
    S2 = _check_cov(S2, "S2")
    avg = (S1 + S2) / 2
    s1, ld1 = np.linalg.slogdet(S1)
    s2, ld2 = np.linalg.slogdet(S2)
    sa, lda = np.linalg.slogdet(avg)
    if s1 <= 0 or s2 <= 0:
        raise DistanceError("covariances must be positive definite")
    if sa <= 0 or not np.isfinite(lda):
        raise DistanceError("average covariance is singular")
    dm = m1 - m2
    maha = float(dm @ np.linalg.solve(avg, dm))
    log_bc = 0.25 * ld1 + 0.25 * ld2 - 0.5 * lda - maha / 8
    return float(np.clip(1.0 - np.exp(log_bc), 0.0, 1.0))


def hellinger_gaussian(m1, S1, m2, S2) -> float:
    """Hellinger distance (square root of :func:`hellinger_gaussian_sq`)."""
    return float(np.sqrt(hellinger_gaussian_sq(m1, S1, m2, S2)))


# ------------------------------------------------------------- matrices

def _check_metric(ms: Sequence[EmpiricalMeasure], metric: str,
                  slicing: SlicingSpec | None) -> int:
    if metric not in METRICS:
        raise DistanceError(f"unknown metric {metric!r}")
    dims = {mu.dim for mu in ms}
    if len(dims) != 1:
        raise DistanceError(f"measures have mixed dimensions {sorted(dims)}")
    r = dims.pop()
    if metric == "W2" and r != 1:
        raise DistanceError("W2 is only available for univariate measures; use SW2")
    if metric == "SW2" and r > 1:
        if slicing is None:
            raise DistanceError("SW2 on multivariate measures needs a SlicingSpec")
        if slicing.dim != r:
            raise DistanceError(f"slicing dim {slicing.dim} does not match measures ({r})")
    return r


def _features(ms: Sequence[EmpiricalMeasure], r: int,
              slicing: SlicingSpec | None) -> np.ndarray:
    """Sorted (projected) samples flattened so that Euclidean distance / sqrt(size) = metric."""
    if r == 1:
        rows = [mu.sorted_values for mu in ms]
    else:
        theta = slicing.directions
        rows = [np.sort(mu.project(theta), axis=1).ravel() for mu in ms]
    return np.vstack(rows)


def _pair_value(a: EmpiricalMeasure, b: EmpiricalMeasure, r: int,
                slicing: SlicingSpec | None) -> float:
    return w2_empirical_1d(a, b) if r == 1 else sw2_empirical(a, b, slicing)


def pairwise_matrix(ms: Sequence[EmpiricalMeasure], metric: str = "W2",
                    slicing: SlicingSpec | None = None) -> DistanceMatrix:
    """All pairwise W2 or SW2 distances; one direction set shared by every pair."""
    ms = list(ms)
    if len(ms) < 2:
        raise DistanceError("need at least 2 measures")
    r = _check_metric(ms, metric, slicing)
    n = len(ms)
    sizes = {mu.m for mu in ms}
    if len(sizes) == 1:
        F = _features(ms, r, slicing)
        D = squareform(np.sqrt(pdist(F, "sqeuclidean") / F.shape[1]))
    else:
        D = np.zeros((n, n))
        for i in range(n):
            for k in range(i + 1, n):
                try:
                    D[i, k] = D[k, i] = _pair_value(ms[i], ms[k], r, slicing)
                except (DistanceError, MeasureError) as exc:
                    raise DistanceError(f"pair ({i}, {k}): {exc}") from None
    np.fill_diagonal(D, 0.0)
    return DistanceMatrix(D, metric)


def cross_matrix(rows: Sequence[EmpiricalMeasure], cols: Sequence[EmpiricalMeasure],
                 metric: str = "W2", slicing: SlicingSpec | None = None) -> np.ndarray:
    """Rectangular distances between two lists of measures, shape (len(rows), len(cols))."""
    rows, cols = list(rows), list(cols)
    if not rows:
        return np.zeros((0, len(cols)))
    r = _check_metric(rows + cols, metric, slicing)
    sizes = {mu.m for mu in rows + cols}
    if len(sizes) == 1:
        A = _features(rows, r, slicing)
        B = _features(cols, r, slicing)
        return np.sqrt(cdist(A, B, "sqeuclidean") / A.shape[1])
    out = np.empty((len(rows), len(cols)))
    for i, a in enumerate(rows):
        for k, b in enumerate(cols):
            out[i, k] = _pair_value(a, b, r, slicing)
    return out
