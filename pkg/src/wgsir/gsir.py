"""Generalized sliced inverse regression on Gram matrices of measures.

Two variants are supported. ``GSIR1`` eigendecomposes

    Lambda1 = (Gx + eta_x I)^-1 Gx Gy Gx (Gx + eta_x I)^-1

and ``GSIR2`` replaces ``Gy`` by ``Gy (Gy + eta_y I)^-1``. The coordinates
of the j-th sufficient predictor in the centered kernel basis are
``(Gx + eta_x I)^-1 v_j``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .distances import SlicingSpec, cross_matrix
from .kernels import GramMatrix, KernelSpec
from .linalg import ridge_inverse_apply, sym_eig
from .measures import EmpiricalMeasure

VARIANTS = ("GSIR1", "GSIR2")
BIC_C0 = {"GSIR1": 2.0, "GSIR2": 4.0}


class GsirError(ValueError):
    pass


def normalize_variant(variant: str) -> str:
    v = variant.upper().replace("-", "")
    if v not in VARIANTS:
        raise GsirError(f"unknown variant {variant!r}; expected gsir1 or gsir2")
    return v


@dataclass(frozen=True)
class RegularizationSpec:
    eps_x: float
    eps_y: float = 1e-3

    def __post_init__(self):
        for name in ("eps_x", "eps_y"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise GsirError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class TrainingRefs:
    """What out-of-sample evaluation needs to rebuild kernel rows."""

    measures: list[EmpiricalMeasure]
    kernel: KernelSpec
    metric: str
    slicing: SlicingSpec | None = None


@dataclass(frozen=True)
class GsirFit:
    variant: str
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    d: int
    eta_x: float
    eta_y: float | None
    reg: RegularizationSpec
    train_gram: GramMatrix
    train_refs: TrainingRefs | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.eigenvectors.shape[0]

    @property
    def coefficients(self) -> np.ndarray:
        """``C = (Gx + eta_x I)^-1 V_d``, shape (n, d)."""
        return ridge_inverse_apply(self.train_gram.G, self.eta_x, self.eigenvectors[:, :self.d])

    def with_dimension(self, d: int) -> "GsirFit":
        if not 0 <= d <= self.n:
            raise GsirError(f"d must lie in [0, {self.n}], got {d}")
        return replace(self, d=int(d))

    def to_json(self, path: str | Path | None = None) -> str:
        """Serialize the fit summary; returns the JSON text."""
        refs = self.train_refs
        doc = {
            "variant": self.variant,
            "d": self.d,
            "eps_x": self.reg.eps_x,
            "eps_y": self.reg.eps_y,
            "eta_x": self.eta_x,
            "eta_y": self.eta_y,
            "eigenvalues": self.eigenvalues.tolist(),
            "coefficients": self.coefficients.tolist(),
            "kernel": {"family": self.train_gram.spec.family, "gamma": self.train_gram.spec.gamma},
        }
        if refs is not None:
            doc["metric"] = refs.metric
            doc["slicing"] = (None if refs.slicing is None else
                              {"L": refs.slicing.L, "seed": refs.slicing.seed,
                               "dim": refs.slicing.dim})
            doc["training_digests"] = [measure_digest(mu) for mu in refs.measures]
        text = json.dumps(doc, indent=1)
        if path is not None:
            Path(path).write_text(text + "\n", encoding="utf-8")
        return text


def measure_digest(mu: EmpiricalMeasure) -> str:
    h = hashlib.sha256()
    h.update(np.asarray(mu.points.shape, dtype=np.int64).tobytes())
    h.update(np.ascontiguousarray(mu.points, dtype="<f8").tobytes())
    return h.hexdigest()[:16]


def assemble_lambda(Gx: np.ndarray, Gy: np.ndarray, eta_x: float,
                    variant: str = "GSIR1", eta_y: float | None = None) -> np.ndarray:
    """The symmetric n x n matrix whose leading eigenvectors define the predictors."""
    variant = normalize_variant(variant)
    M = ridge_inverse_apply(Gx, eta_x, Gx)   # (Gx + eta I)^-1 Gx, equals Gx (Gx + eta I)^-1
    if variant == "GSIR1":
        inner = Gy
    else:
        if eta_y is None:
            raise GsirError("GSIR2 needs eta_y")
        inner = ridge_inverse_apply(Gy, eta_y, Gy)
        inner = (inner + inner.T) / 2
    Lam = M @ inner @ M.T
    return (Lam + Lam.T) / 2


def fit(Gx: GramMatrix, Gy: GramMatrix, reg: RegularizationSpec,
        variant: str = "GSIR1", d: int = 1,
        train_refs: TrainingRefs | None = None) -> GsirFit:
    """Fit GSIR and keep the full spectrum for order determination."""
    variant = normalize_variant(variant)
    n = Gx.n
    if Gy.n != n:
        raise GsirError(f"Gram sizes differ: {n} vs {Gy.n}")
    if not 0 <= d <= n:
        raise GsirError(f"d must lie in [0, {n}], got {d}")
    eta_x = reg.eps_x * _lambda_max(Gx.G)
    eta_y = reg.eps_y * _lambda_max(Gy.G) if variant == "GSIR2" else None
    if not eta_x > 0:
        raise GsirError("Gx has no positive eigenvalue; predictors are constant")
    if eta_y is not None and not eta_y > 0:
        raise GsirError("Gy has no positive eigenvalue")
    Lam = assemble_lambda(Gx.G, Gy.G, eta_x, variant, eta_y)
    eig = sym_eig(Lam)
    return GsirFit(variant=variant, eigenvalues=eig.eigenvalues, eigenvectors=eig.eigenvectors,
                   d=int(d), eta_x=float(eta_x), eta_y=None if eta_y is None else float(eta_y),
                   reg=reg, train_gram=Gx, train_refs=train_refs)


def _lambda_max(G: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(G)[-1])


def predictors_insample(fit: GsirFit) -> np.ndarray:
    """Sufficient predictors at the training points, ``Gx C``."""
    return fit.train_gram.G @ fit.coefficients


def kernel_rows(fit: GsirFit, test: Sequence[EmpiricalMeasure]) -> np.ndarray:
    """Kernel values between test measures and training measures, shape (t, n)."""
    refs = fit.train_refs
    if refs is None:
        raise GsirError("fit carries no training measures; out-of-sample evaluation unavailable")
    test = list(test)
    dims = {mu.dim for mu in test}
    train_dim = refs.measures[0].dim
    if dims and dims != {train_dim}:
        raise GsirError(f"test dimension {sorted(dims)} does not match training dimension {train_dim}")
    D = cross_matrix(test, refs.measures, refs.metric, refs.slicing)
    return refs.kernel.evaluate(D)


def predictors_outsample(fit: GsirFit, test: Sequence[EmpiricalMeasure] | None = None,
                         kx: np.ndarray | None = None) -> np.ndarray:
    """Evaluate the fitted predictors at new measures.

    ``f_j(x) = sum_i C_ij (k(x, X_i) - mean_l k(x, X_l))`` shifted by the
    training mean of ``f_j``, so that evaluating at the training measures
    reproduces :func:`predictors_insample`. A precomputed kernel block ``kx``
    (t x n) may be passed instead of ``test``.
    """
    C = fit.coefficients
    if kx is None:
        if test is None:
            raise GsirError("pass test measures or a kernel block")
        test = list(test)
        if not test:
            return np.zeros((0, fit.d))
        kx = kernel_rows(fit, test)
    kx = np.atleast_2d(np.asarray(kx, dtype=float))
    if kx.shape[1] != fit.n:
        raise GsirError(f"kernel block has {kx.shape[1]} columns, expected {fit.n}")
    K = fit.train_gram.K
    raw = (kx - kx.mean(axis=1, keepdims=True)) @ C
    train_raw = (K - K.mean(axis=1, keepdims=True)) @ C
    return raw - train_raw.mean(axis=0, keepdims=True)
