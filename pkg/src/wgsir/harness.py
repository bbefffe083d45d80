"""Replicated simulation runs and estimation on user-supplied measure files."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from . import simgen
from .distances import SlicingSpec, pairwise_matrix
from .gsir import BIC_C0, GsirFit, RegularizationSpec, TrainingRefs, fit, \
    normalize_variant, predictors_insample, predictors_outsample
from .kernels import KernelSpec, default_gamma, gram_matrix
from .measures import EmpiricalMeasure, MeasureError, load_measures_csv
from .metrics import distance_correlation, rvmr
from .selection import EPS_GRID, bic_order, select_epsilon

log = logging.getLogger(__name__)

RESULT_FIELDS = ("scenario", "variant", "n", "m", "replication", "rvmr", "dcor",
                 "d_hat", "eps_x", "eps_y", "wall_time_seconds")


@dataclass
class ExperimentConfig:
    scenario: str | None = None
    x_path: str | None = None
    y_path: str | None = None
    n: int = 100
    m: int = 50
    L: int = 50
    replications: int = 20
    seed: int = 0
    variant: str = "GSIR1"
    kernel: str = "gaussian"
    metric: str = "auto"
    eps_grid: list[float] | None = None
    d: int | None = None
    true_d: bool = False
    out: str | None = None
    jobs: int = 1
    timing: bool = False

    def __post_init__(self):
        self.variant = normalize_variant(self.variant)
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.metric not in ("auto", "W2", "SW2"):
            self.metric = self.metric.upper()
            if self.metric not in ("W2", "SW2"):
                raise ValueError(f"unknown metric {self.metric!r}")
        if self.scenario is not None and self.scenario not in simgen.SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if (self.x_path is None) != (self.y_path is None):
            raise ValueError("real-data mode needs both predictor and response files")
        if self.d is not None and self.d < 1:
            raise ValueError("d override must be >= 1")

    @classmethod
    def from_json(cls, path: str | Path, **overrides) -> "ExperimentConfig":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        doc.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**doc)

    @property
    def grid(self) -> tuple[float, ...]:
        return tuple(self.eps_grid) if self.eps_grid else EPS_GRID


@dataclass(frozen=True)
class ResultRow:
    scenario: str
    variant: str
    n: int
    m: int
    replication: int
    rvmr: float
    dcor: float
    d_hat: int
    eps_x: float
    eps_y: float
    wall_time_seconds: float


@dataclass(frozen=True)
class Estimate:
    """Output of :func:`estimate`: fitted model plus the selection trail."""

    fit: GsirFit
    d_hat: int
    eps_x: float
    eps_y: float
    scores: np.ndarray


def _metric_for(dim: int, requested: str) -> str:
    if requested == "auto":
        return "W2" if dim == 1 else "SW2"
    return requested


def estimate(X: Sequence[EmpiricalMeasure], Y: Sequence[EmpiricalMeasure], *,
             variant: str = "GSIR1", family: str = "gaussian", metric: str = "auto",
             L: int = 50, slicing_seed: int = 0, eps_grid: Sequence[float] = EPS_GRID,
             d: int | None = None) -> Estimate:
    """Full training pipeline on paired measures.

    Distances, bandwidths from the mean squared distance, GCV-selected ridge
    constants, GSIR fit, and BIC order (unless ``d`` is given). The returned
    fit carries at least one direction even when the BIC picks zero.
    """
    variant = normalize_variant(variant)
    X, Y = list(X), list(Y)
    sides = []
    for ms in (X, Y):
        r = ms[0].dim
        met = _metric_for(r, metric)
        slicing = SlicingSpec(L, slicing_seed, r) if (met == "SW2" and r > 1) else None
        D = pairwise_matrix(ms, met, slicing)
        spec = KernelSpec(default_gamma(D), family)
        sides.append((gram_matrix(D, spec), met, slicing))
    (gx, met_x, sl_x), (gy, _, _) = sides
    eps_x, eps_y = select_epsilon(gx.K, gy.K, eps_grid)
    refs = TrainingRefs(X, gx.spec, met_x, sl_x)
    f = fit(gx, gy, RegularizationSpec(eps_x, eps_y), variant, d=1, train_refs=refs)
    order = bic_order(f.eigenvalues, len(X), BIC_C0[variant])
    d_hat = order.d_hat if d is None else int(d)
    f = f.with_dimension(max(d_hat, 1))
    return Estimate(f, d_hat, eps_x, eps_y, order.scores)


def run_replication(cfg: ExperimentConfig, rep: int) -> ResultRow:
    """One train/test replication of a simulated scenario."""
    t0 = time.perf_counter()
    rng = np.random.default_rng([cfg.seed, rep])
    slicing_seed = int(rng.integers(2 ** 32))
    gen = simgen.generate(simgen.SimScenario(cfg.scenario, 2 * cfg.n, cfg.m), rng)
    train = range(cfg.n)
    test = range(cfg.n, 2 * cfg.n)
    data = gen.data
    d = cfg.d if cfg.d is not None else (gen.d0 if cfg.true_d else None)
    est = estimate([data.predictors[i] for i in train], [data.responses[i] for i in train],
                   variant=cfg.variant, family=cfg.kernel, metric=cfg.metric, L=cfg.L,
                   slicing_seed=slicing_seed, eps_grid=cfg.grid, d=d)
    pred = predictors_outsample(est.fit, [data.predictors[i] for i in test])
    truth = gen.true_predictors[cfg.n:]
    elapsed = time.perf_counter() - t0 if cfg.timing else math.nan
    return ResultRow(cfg.scenario, cfg.variant, cfg.n, cfg.m, rep,
                     rvmr(pred, truth), distance_correlation(pred, truth),
                     est.d_hat, est.eps_x, est.eps_y, elapsed)


def _safe_replication(args):
    cfg, rep = args
    try:
        return run_replication(cfg, rep)
    except Exception as exc:  # noqa: BLE001 - a failed replication must not stop the run
        log.error("replication %d failed: %s: %s", rep, type(exc).__name__, exc)
        return None


def summarize(rows: Sequence[ResultRow]) -> dict[str, float]:
    """Mean and Monte Carlo standard error (sample SD / sqrt(R)) per metric."""
    out: dict[str, float] = {"replications": len(rows)}
    for key in ("rvmr", "dcor", "d_hat"):
        v = np.array([getattr(r, key) for r in rows], dtype=float)
        out[f"{key}_mean"] = float(v.mean()) if v.size else math.nan
        out[f"{key}_se"] = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else math.nan
    return out


def run_experiment(cfg: ExperimentConfig) -> tuple[list[ResultRow], dict[str, float]]:
    """Run ``cfg.replications`` independent replications; failures are logged and counted."""
    if cfg.scenario is None:
        raise ValueError("run_experiment needs a scenario")
    tasks = [(cfg, rep) for rep in range(cfg.replications)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_safe_replication, tasks))
    else:
        results = [_safe_replication(t) for t in tasks]
    rows = [r for r in results if r is not None]
    summary = summarize(rows)
    summary["failures"] = len(results) - len(rows)
    return rows, summary


def _fmt(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def format_results(rows: Sequence[ResultRow], summary: dict[str, float]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_FIELDS)
    for r in rows:
        d = asdict(r)
        w.writerow([_fmt(d[k]) for k in RESULT_FIELDS])
    for k, v in summary.items():
        buf.write(f"# {k}={_fmt(v)}\n")
    return buf.getvalue()


def write_results(path: str | Path, rows: Sequence[ResultRow], summary: dict[str, float]) -> None:
    Path(path).write_text(format_results(rows, summary), encoding="utf-8")


def read_results(path: str | Path) -> tuple[list[dict[str, str]], dict[str, str]]:
    """Parse a results file back into row dicts and the summary trailer."""
    rows, summary = [], {}
    with Path(path).open(encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    body = [ln for ln in lines if not ln.startswith("#")]
    for ln in lines:
        if ln.startswith("# ") and "=" in ln:
            k, v = ln[2:].split("=", 1)
            summary[k] = v
    rows = list(csv.DictReader(body))
    return rows, summary


# ---------------------------------------------------------------- real data

def _load_pair(cfg: ExperimentConfig):
    ids_x, X = load_measures_csv(cfg.x_path)
    ids_y, Y = load_measures_csv(cfg.y_path)
    extra_y = [i for i in ids_y if i not in set(ids_x)]
    if extra_y:
        raise MeasureError(f"response file has ids missing from predictor file: {extra_y[0]!r}")
    missing = [i for i in ids_x if i not in set(ids_y)]
    if missing:
        raise MeasureError(f"predictor file has ids missing from response file: {missing[0]!r}")
    if len(ids_x) < 2:
        raise MeasureError("need at least 2 observations")
    pos = {k: j for j, k in enumerate(ids_y)}
    return ids_x, X, [Y[pos[k]] for k in ids_x]


def run_real_data(cfg: ExperimentConfig):
    """Fit on every observation of the two files and return ``(ids, predictors, estimate)``.

    When ``cfg.out`` is set the predictors are written there as
    ``id,f1..fd`` and the eigenvalue spectrum next to it as
    ``<stem>_spectrum.csv``.
    """
    ids, X, Y = _load_pair(cfg)
    est = estimate(X, Y, variant=cfg.variant, family=cfg.kernel, metric=cfg.metric, L=cfg.L,
                   slicing_seed=cfg.seed, eps_grid=cfg.grid, d=cfg.d)
    pred = predictors_insample(est.fit)
    if cfg.out:
        write_predictors(cfg.out, ids, pred)
        out = Path(cfg.out)
        write_spectrum(out.with_name(out.stem + "_spectrum.csv"), est)
    return ids, pred, est


def write_predictors(path: str | Path, ids: Sequence[str], pred: np.ndarray) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id"] + [f"f{j + 1}" for j in range(pred.shape[1])])
        for key, row in zip(ids, pred):
            w.writerow([key] + [repr(float(v)) for v in row])


def write_spectrum(path: str | Path, est: Estimate) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "eigenvalue", "bic_score"])
        lam = est.fit.eigenvalues
        for k in range(len(lam)):
            w.writerow([k + 1, repr(float(lam[k])), repr(float(est.scores[k + 1]))])
        fh.write(f"# d_hat={est.d_hat}\n# eps_x={est.eps_x!r}\n# eps_y={est.eps_y!r}\n"
                 f"# variant={est.fit.variant}\n")
