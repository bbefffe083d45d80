"""Synthetic distribution-on-distribution regression scenarios.

Scenario I draws univariate Beta predictors and Gaussian responses whose
location/scale depend on distances from the predictor to two reference Beta
laws. Scenario II uses bivariate Gaussian predictors and responses. Every
generator returns the analytic true predictors alongside the samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import betainc, betaln

from .distances import QUANTILE_GRID, hellinger_beta, hellinger_gaussian, \
    hellinger_gaussian_sq, w2_gaussian
from .measures import DatasetPair, EmpiricalMeasure

SCENARIOS = ("I-1", "I-2", "I-3", "I-4", "II-1", "II-2", "II-3", "II-4")
TRUE_DIM = {"I-1": 1, "I-2": 2, "I-3": 2, "I-4": 2,
            "II-1": 1, "II-2": 2, "II-3": 2, "II-4": 2}

# reference measures
BETA_REF = ((2.0, 1.0), (2.0, 3.0))
GAUSS_REF = ((np.array([-1.0, 0.0]), np.diag([1.0, 0.5])),
             (np.array([0.0, 1.0]), np.diag([0.5, 1.0])))
ROT_A = np.sqrt(2) / 2 * np.array([[1.0, 1.0], [-1.0, 1.0]])
ROT_B = np.sqrt(2) / 2 * np.array([[1.0, 1.0], [1.0, -1.0]])
TGAMMA_RANGE = (0.2, 2.0)
MU_NOISE_SD = 0.2


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class SimScenario:
    id: str
    n: int
    m: int
    seed: int = 0

    def __post_init__(self):
        if self.id not in SCENARIOS:
            raise SimulationError(f"unknown scenario {self.id!r}")
        if self.n < 2 or self.m < 2:
            raise SimulationError("n and m must be >= 2")

    @property
    def d0(self) -> int:
        return TRUE_DIM[self.id]


@dataclass(frozen=True)
class GeneratedData:
    data: DatasetPair
    true_predictors: np.ndarray
    d0: int
    # latent response parameters: "mu" (n, r) and "sigma" (n,) or "cov" (n, 2, 2)
    latent: dict = field(default_factory=dict, repr=False)


# ------------------------------------------------------------ Beta quantile

def beta_quantile(a, b, p, tol: float = 1e-12, max_iter: int = 200):
    """Inverse regularized incomplete Beta function.

    Newton steps on ``I_x(a, b) - p`` inside a shrinking bisection bracket;
    any step leaving the bracket is replaced by the midpoint, so the result is
    at least as accurate as plain bisection (bracket below 1e-10 on exit).
    Broadcasts over ``a``, ``b`` and ``p``.
    """
    a, b, p = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, p)))
    if np.any(a <= 0) or np.any(b <= 0):
        raise SimulationError("Beta parameters must be positive")
    if np.any((p < 0) | (p > 1)):
        raise SimulationError("probabilities must lie in [0, 1]")
    shape = p.shape
    a, b, p = a.ravel(), b.ravel(), p.ravel()
    out = np.where(p >= 1, 1.0, 0.0)
    act = np.flatnonzero((p > 0) & (p < 1))
    aa, bb, pp = a[act], b[act], p[act]
    lo = np.zeros(act.size)
    hi = np.ones(act.size)
    x = np.clip(aa / (aa + bb), 1e-3, 1 - 1e-3)
    lnB = betaln(aa, bb)
    idx = np.arange(act.size)
    for _ in range(max_iter):
        if idx.size == 0:
            break
        xi, ai, bi = x[idx], aa[idx], bb[idx]
        F = betainc(ai, bi, xi) - pp[idx]
        below = F < 0
        lo[idx] = np.where(below, xi, lo[idx])
        hi[idx] = np.where(below, hi[idx], xi)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            pdf = np.exp((ai - 1) * np.log(xi) + (bi - 1) * np.log1p(-xi) - lnB[idx])
            xn = xi - F / pdf
        bad = ~np.isfinite(xn) | (xn <= lo[idx]) | (xn >= hi[idx])
        xn = np.where(bad, 0.5 * (lo[idx] + hi[idx]), xn)
        xn = np.where(F == 0, xi, xn)
        x[idx] = xn
        done = (F == 0) | (np.abs(xn - xi) < tol) | (hi[idx] - lo[idx] < 1e-10)
        idx = idx[~done]
    out[act] = x
    out = out.reshape(shape)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=16)
def _reference_quantiles(a: float, b: float, N: int = QUANTILE_GRID) -> np.ndarray:
    q = beta_quantile(a, b, (np.arange(1, N + 1) - 0.5) / N)
    q.setflags(write=False)
    return q


def w2_beta(a, b, refs, N: int = QUANTILE_GRID) -> np.ndarray:
    """W2 from ``Beta(a, b)`` (vectorized over a, b) to fixed Beta laws.

    L2 distance between quantile functions on the midpoint grid
    ``(j - 1/2)/N``. ``refs`` is a sequence of ``(a_ref, b_ref)`` pairs;
    the result has one column per reference.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    levels = (np.arange(1, N + 1) - 0.5) / N
    qx = beta_quantile(a[:, None], b[:, None], levels[None, :])
    cols = [np.sqrt(np.mean((qx - _reference_quantiles(float(ar), float(br), N)) ** 2, axis=1))
            for ar, br in refs]
    return np.column_stack(cols)


# ---------------------------------------------------------------- samplers

def _log_gamma_unit(shape: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """log of Gamma(shape, 1) draws, Marsaglia-Tsang squeeze-free rejection.

    Shapes below one use the boost ``G(a) = G(a + 1) U^(1/a)`` in log space,
    which keeps tiny shapes from underflowing.
    """
    shape = np.asarray(shape, dtype=float)
    flat = shape.ravel()
    boost = flat < 1
    a = np.where(boost, flat + 1, flat)
    d = a - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(flat.size)
    pending = np.arange(flat.size)
    while pending.size:
        z = rng.standard_normal(pending.size)
        u = rng.random(pending.size)
        v = (1 + c[pending] * z) ** 3
        with np.errstate(invalid="ignore", divide="ignore"):
            ok = (v > 0) & (np.log(u) < 0.5 * z * z + d[pending] - d[pending] * v
                            + d[pending] * np.log(v))
        acc = pending[ok]
        out[acc] = np.log(d[acc]) + np.log(v[ok])
        pending = pending[~ok]
    if boost.any():
        ib = np.flatnonzero(boost)
        u = 1.0 - rng.random(ib.size)        # in (0, 1]
        out[ib] += np.log(u) / flat[ib]
    return out.reshape(shape.shape)


def _as_shape(size) -> tuple[int, ...]:
    return (int(size),) if np.isscalar(size) else tuple(int(k) for k in size)


def sample_gamma(shape, rate, rng: np.random.Generator, size=None):
    """Gamma draws with the given shape and rate.

    Shape exactly 2 uses a sum of two unit exponentials.
    """
    shape = np.asarray(shape, dtype=float)
    rate = np.asarray(rate, dtype=float)
    if np.any(shape <= 0) or np.any(rate <= 0):
        raise SimulationError("gamma shape and rate must be positive")
    target = np.broadcast_shapes(shape.shape, rate.shape) if size is None else \
        np.broadcast_shapes(shape.shape, rate.shape, _as_shape(size))
    shape = np.broadcast_to(shape, target)
    rate = np.broadcast_to(rate, target)
    if np.all(shape == 2.0):
        u = 1.0 - rng.random((2,) + target)
        g = -np.log(u[0]) - np.log(u[1])
    else:
        g = np.exp(_log_gamma_unit(shape, rng))
    out = g / rate
    return float(out) if out.ndim == 0 else out


def sample_truncated_gamma(shape: float, rate: float, lo: float, hi: float,
                           rng: np.random.Generator, size=None,
                           max_proposals: int = 10 ** 6):
    """Gamma(shape, rate) conditioned on the open interval ``(lo, hi)``.

    Plain rejection from :func:`sample_gamma`; raises
    :class:`SimulationError` after ``max_proposals`` proposals per draw.
    """
    if not (0 <= lo < hi):
        raise SimulationError(f"invalid truncation range ({lo}, {hi})")
    count = 1 if size is None else int(np.prod(size))
    out = np.empty(count)
    filled = 0
    used = 0
    batch = 64
    while filled < count:
        if used >= max_proposals * count:
            raise SimulationError(
                f"truncated gamma: no acceptance after {used} proposals "
                f"(shape={shape}, rate={rate}, range=({lo}, {hi}))")
        g = np.atleast_1d(sample_gamma(shape, rate, rng, size=batch))
        used += batch
        keep = g[(g > lo) & (g < hi)]
        take = min(keep.size, count - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
        batch = min(batch * 2, 1 << 16)
    return float(out[0]) if size is None else out.reshape(size)


def sample_beta(a, b, rng: np.random.Generator, size=None) -> np.ndarray:
    """Beta draws as ``X / (X + Y)`` of independent unit gammas, kept inside (0, 1)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    target = np.broadcast_shapes(a.shape, b.shape) if size is None else \
        np.broadcast_shapes(a.shape, b.shape, _as_shape(size))
    lx = _log_gamma_unit(np.broadcast_to(a, target), rng)
    ly = _log_gamma_unit(np.broadcast_to(b, target), rng)
    x = 1.0 / (1.0 + np.exp(ly - lx))
    tiny = np.nextafter(0.0, 1.0)
    return np.clip(x, tiny, np.nextafter(1.0, 0.0))


# -------------------------------------------------------------- generators

def generate(scenario: SimScenario, rng: np.random.Generator | None = None) -> GeneratedData:
    """Dispatch to the Scenario I or II generator."""
    if rng is None:
        rng = np.random.default_rng(scenario.seed)
    if scenario.id.startswith("II-"):
        return gen_model_II(scenario, rng)
    return gen_model_I(scenario, rng)


def gen_model_I(scenario: SimScenario, rng: np.random.Generator) -> GeneratedData:
    """Beta predictors ``Beta(a_i, b_i)``, ``a_i ~ Gamma(2, 1)``, ``b_i ~ Gamma(2, 3)``;
    responses ``N(mu_Y, sigma_Y^2)``."""
    sid, n, m = scenario.id, scenario.n, scenario.m
    if sid not in ("I-1", "I-2", "I-3", "I-4"):
        raise SimulationError(f"{sid!r} is not a Scenario I model")
    a = sample_gamma(2.0, 1.0, rng, size=n)
    b = sample_gamma(2.0, 3.0, rng, size=n)
    X = sample_beta(a[:, None], b[:, None], rng, size=(n, m))

    if sid in ("I-1", "I-2"):
        w1, w2 = w2_beta(a, b, BETA_REF).T
    if sid == "I-1":
        centre = np.exp(w1 ** 2) + np.exp(w2 ** 2)
        mu = centre + MU_NOISE_SD * rng.standard_normal(n)
        sigma = np.ones(n)
        truth = w1[:, None]
    elif sid == "I-2":
        mu = np.exp(w1 ** 2) + MU_NOISE_SD * rng.standard_normal(n)
        sigma = sample_gamma(w2 ** 2, w2, rng)
        truth = np.column_stack([w1, w2])
    elif sid == "I-3":
        h1 = hellinger_beta(a, b, *BETA_REF[0])
        h2 = hellinger_beta(a, b, *BETA_REF[1])
        mu = np.exp(h1) + MU_NOISE_SD * rng.standard_normal(n)
        sigma = np.exp(h2)
        truth = np.column_stack([h1, h2])
    else:
        mean = a / (a + b)
        var = a * b / ((a + b) ** 2 * (a + b + 1))
        mu = mean + MU_NOISE_SD * rng.standard_normal(n)
        sigma = sample_gamma(var, np.sqrt(var), rng)
        truth = np.column_stack([mean, var])

    Y = mu[:, None] + sigma[:, None] * rng.standard_normal((n, m))
    data = DatasetPair([EmpiricalMeasure(x) for x in X], [EmpiricalMeasure(y) for y in Y])
    latent = {"a": a, "b": b, "mu": mu[:, None], "sigma": sigma}
    return GeneratedData(data, truth, TRUE_DIM[sid], latent)


def gen_model_II(scenario: SimScenario, rng: np.random.Generator) -> GeneratedData:
    """Bivariate Gaussian predictors ``N(a_i (1,1), b_i I)``, ``a_i ~ N(0.5, 0.5^2)``,
    ``b_i ~ Beta(2, 3)``; responses ``N(mu_Y, Sigma_Y)``."""
    sid, n, m = scenario.id, scenario.n, scenario.m
    if sid not in ("II-1", "II-2", "II-3", "II-4"):
        raise SimulationError(f"{sid!r} is not a Scenario II model")
    a = 0.5 + 0.5 * rng.standard_normal(n)
    b = sample_beta(2.0, 3.0, rng, size=n)
    if np.any(b <= 0):
        raise SimulationError("nonpositive predictor variance")
    ones = np.ones(2)
    X = a[:, None, None] * ones + np.sqrt(b)[:, None, None] * rng.standard_normal((n, m, 2))

    means = [ai * ones for ai in a]
    covs = [bi * np.eye(2) for bi in b]
    if sid == "II-4":
        h1sq = np.array([hellinger_gaussian_sq(mx, Sx, *GAUSS_REF[0]) for mx, Sx in zip(means, covs)])
        h2 = np.array([hellinger_gaussian(mx, Sx, *GAUSS_REF[1]) for mx, Sx in zip(means, covs)])
        h1 = np.sqrt(h1sq)
        truth = np.column_stack([h1, h2])
    else:
        w1 = np.array([w2_gaussian(mx, Sx, *GAUSS_REF[0]) for mx, Sx in zip(means, covs)])
        w2 = np.array([w2_gaussian(mx, Sx, *GAUSS_REF[1]) for mx, Sx in zip(means, covs)])
        truth = w1[:, None] if sid == "II-1" else np.column_stack([w1, w2])

    Y = np.empty((n, m, 2))
    mus = np.empty((n, 2))
    covs_y = np.empty((n, 2, 2))
    for i in range(n):
        if sid == "II-1":
            mu = w1[i] * ones + rng.standard_normal(2)
            factor = np.eye(2)
        elif sid == "II-2":
            mu = np.sqrt(w1[i]) * ones
            lam = np.abs(w2[i] * ones + 0.5 * rng.standard_normal(2))
            factor = ROT_A * np.sqrt(lam)
        elif sid == "II-3":
            mu = w1[i] * ones + rng.standard_normal(2)
            lam = sample_truncated_gamma(w2[i] ** 2, w2[i], *TGAMMA_RANGE, rng, size=2)
            factor = ROT_A * np.sqrt(lam)
        else:
            mu = h1sq[i] * ones + rng.standard_normal(2)
            lam = sample_truncated_gamma(h2[i] ** 2, h2[i], *TGAMMA_RANGE, rng, size=2)
            factor = ROT_B * np.sqrt(lam)
        # Sigma_Y = Gamma Lambda Gamma' = factor factor'
        Y[i] = mu + rng.standard_normal((m, 2)) @ factor.T
        mus[i] = mu
        covs_y[i] = factor @ factor.T
    data = DatasetPair([EmpiricalMeasure(x) for x in X], [EmpiricalMeasure(y) for y in Y])
    latent = {"a": a, "b": b, "mu": mus, "cov": covs_y}
    return GeneratedData(data, truth, TRUE_DIM[sid], latent)

