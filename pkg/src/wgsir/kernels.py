"""Radial kernels on metric spaces of measures and Gram-matrix centering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distances import DistanceMatrix

FAMILIES = ("gaussian", "laplacian")
PSD_SLACK = 1e-8


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class KernelSpec:
    gamma: float
    family: str = "gaussian"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise KernelError(f"unknown kernel family {self.family!r}")
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise KernelError(f"gamma must be positive, got {self.gamma}")

    def evaluate(self, d: np.ndarray) -> np.ndarray:
        """Kernel values from distances: ``exp(-gamma d^2)`` or ``exp(-gamma d)``."""
        d = np.asarray(d, dtype=float)
        if self.family == "gaussian":
            return np.exp(-self.gamma * d * d)
        return np.exp(-self.gamma * d)


@dataclass(frozen=True)
class GramMatrix:
    K: np.ndarray
    G: np.ndarray
    spec: KernelSpec

    @property
    def n(self) -> int:
        return self.K.shape[0]


def default_gamma(D: DistanceMatrix | np.ndarray) -> float:
    """Bandwidth ``1 / (2 sigma^2)`` with ``sigma^2`` the mean squared pairwise distance."""
    values = D.values if isinstance(D, DistanceMatrix) else np.asarray(D, dtype=float)
    iu = np.triu_indices(values.shape[0], k=1)
    sigma2 = float(np.mean(values[iu] ** 2)) if iu[0].size else 0.0
    if not sigma2 > 0:
        raise KernelError("degenerate distance matrix: all pairwise distances are zero")
    return 1.0 / (2.0 * sigma2)


def center_gram(K: np.ndarray) -> np.ndarray:
    """Double centering ``Q K Q`` with ``Q = I - 11'/n``."""
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise KernelError("center_gram needs a square matrix")
    if K.shape[0] == 0:
        raise KernelError("center_gram needs n >= 1")
    Kc = K - K.mean(axis=0, keepdims=True)
    Kc = Kc - Kc.mean(axis=1, keepdims=True)
    return (Kc + Kc.T) / 2


def gram_matrix(D: DistanceMatrix, spec: KernelSpec, check_psd: bool = True) -> GramMatrix:
    """Kernel matrix and its centered version from a distance matrix.

    Raises :class:`KernelError` if ``K`` has an eigenvalue below
    ``-1e-8 * lambda_max``.
    """
    K = spec.evaluate(D.values)
    K = (K + K.T) / 2
    np.fill_diagonal(K, 1.0)
    if check_psd:
        w = np.linalg.eigvalsh(K)
        if w[0] < -PSD_SLACK * w[-1]:
            raise KernelError(
                f"kernel matrix not positive semidefinite: eigenvalue {w[0]:.3e} "
                f"(lambda_max {w[-1]:.3e})")
    return GramMatrix(K=K, G=center_gram(K), spec=spec)
