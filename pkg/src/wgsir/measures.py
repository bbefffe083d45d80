"""Distribution-valued observations stored as finite samples.

An :class:`EmpiricalMeasure` is the plug-in estimate ``m^-1 sum_j delta_{x_j}``
of one observed distribution. Measures are immutable; the ascending order
statistics of univariate measures are computed lazily and cached.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class MeasureError(ValueError):
    """Invalid sample data or malformed measure file."""


class EmpiricalMeasure:
    """Uniform empirical measure on ``m`` points in ``R^r``.

    Parameters
    ----------
    points : array_like, shape (m, r) or (m,)
        Sample points. A 1-D array is read as ``m`` univariate points.
    """

    __slots__ = ("_points", "_sorted")

    def __init__(self, points):
        arr = np.array(points, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise MeasureError("empty sample")
        bad = np.flatnonzero(~np.isfinite(arr).all(axis=1))
        if bad.size:
            raise MeasureError(f"non-finite value at index {bad[0]}")
        arr.setflags(write=False)
        self._points = arr
        self._sorted = None

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def m(self) -> int:
        return self._points.shape[0]

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    @property
    def sorted_values(self) -> np.ndarray:
        """Ascending order statistics (univariate measures only)."""
        if self.dim != 1:
            raise MeasureError(f"order statistics need dim 1, got {self.dim}")
        cached = self._sorted
        if cached is None:
            # compute-then-publish: concurrent fills produce identical arrays
            cached = np.sort(self._points[:, 0], kind="stable")
            cached.setflags(write=False)
            self._sorted = cached
        return cached

    def project(self, directions: np.ndarray) -> np.ndarray:
        """Projections ``<theta_l, x_j>``, returned with shape (L, m)."""
        return np.asarray(directions) @ self._points.T

    def __len__(self) -> int:
        return self.m

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmpiricalMeasure):
            return NotImplemented
        return np.array_equal(self._points, other._points)

    __hash__ = None

    def __repr__(self) -> str:
        return f"EmpiricalMeasure(m={self.m}, dim={self.dim})"


def empirical_from_samples(points: Sequence[Sequence[float]] | np.ndarray) -> EmpiricalMeasure:
    """Validate a list of r-vectors and wrap it as an :class:`EmpiricalMeasure`.

    Scalars are accepted as 1-vectors. Errors name the offending index.
    """
    if isinstance(points, np.ndarray):
        return EmpiricalMeasure(points)
    rows = list(points)
    if not rows:
        raise MeasureError("empty sample")
    vecs = []
    dim = None
    for i, p in enumerate(rows):
        v = np.atleast_1d(np.asarray(p, dtype=float))
        if v.ndim != 1:
            raise MeasureError(f"point at index {i} is not a vector")
        if dim is None:
            dim = v.shape[0]
        elif v.shape[0] != dim:
            raise MeasureError(f"ragged dimensions at index {i}")
        if not np.isfinite(v).all():
            raise MeasureError(f"non-finite value at index {i}")
        vecs.append(v)
    return EmpiricalMeasure(np.vstack(vecs))


@dataclass(frozen=True)
class DatasetPair:
    """Paired predictor/response measures for ``n`` observations."""

    predictors: list[EmpiricalMeasure]
    responses: list[EmpiricalMeasure]
    ids: list[str] = field(default_factory=list)

    def __post_init__(self):
        n = len(self.predictors)
        if n != len(self.responses):
            raise MeasureError(
                f"{n} predictors but {len(self.responses)} responses")
        if n < 2:
            raise MeasureError("need at least 2 observations")
        if not self.ids:
            object.__setattr__(self, "ids", [str(i) for i in range(n)])
        elif len(self.ids) != n:
            raise MeasureError("ids length does not match observations")
        for name, ms in (("predictor", self.predictors), ("response", self.responses)):
            dims = {mu.dim for mu in ms}
            if len(dims) != 1:
                raise MeasureError(f"{name} measures have mixed dimensions {sorted(dims)}")

    @property
    def n(self) -> int:
        return len(self.predictors)

    def subset(self, idx: Iterable[int]) -> "DatasetPair":
        idx = list(idx)
        return DatasetPair([self.predictors[i] for i in idx],
                           [self.responses[i] for i in idx],
                           [self.ids[i] for i in idx])


def load_measures_csv(path: str | Path, id_column: str | None = None,
                      value_columns: Sequence[str] | None = None
                      ) -> tuple[list[str], list[EmpiricalMeasure]]:
    """Read a long-format CSV (``id,v1[,v2,...]``) into one measure per id.

    Rows are grouped by id in order of first appearance; group sizes may
    differ. By default the first column holds the id and every remaining
    column is a coordinate.

    Returns
    -------
    ids : list of str
    measures : list of EmpiricalMeasure
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or not any(h.strip() for h in header):
            raise MeasureError(f"{path}: empty file")
        header = [h.strip() for h in header]
        if _looks_numeric(header[1:]) and len(header) > 1:
            raise MeasureError(f"{path}: missing header row")
        id_idx = header.index(id_column) if id_column else 0
        if value_columns:
            try:
                val_idx = [header.index(c) for c in value_columns]
            except ValueError as exc:
                raise MeasureError(f"{path}: {exc}") from None
        else:
            val_idx = [j for j in range(len(header)) if j != id_idx]
        if not val_idx:
            raise MeasureError(f"{path}: no value columns")

        groups: dict[str, list[list[float]]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise MeasureError(
                    f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}")
            vals = []
            for j in val_idx:
                try:
                    vals.append(float(row[j]))
                except ValueError:
                    raise MeasureError(
                        f"{path}: unparsable number {row[j]!r} at row {lineno}, "
                        f"column {header[j]!r}") from None
            groups.setdefault(row[id_idx].strip(), []).append(vals)

    if not groups:
        raise MeasureError(f"{path}: no data rows")
    ids = list(groups)
    measures = []
    for key in ids:
        try:
            measures.append(empirical_from_samples(groups[key]))
        except MeasureError as exc:
            raise MeasureError(f"{path}: id {key!r}: {exc}") from None
    return ids, measures


def write_measures_csv(path: str | Path, ids: Sequence[str],
                       measures: Sequence[EmpiricalMeasure]) -> None:
    """Write measures in the long format read by :func:`load_measures_csv`.

    Values are written with 17 significant digits so reloading is exact.
    """
    if len(ids) != len(measures):
        raise MeasureError("ids and measures differ in length")
    dims = {mu.dim for mu in measures}
    if len(dims) > 1:
        raise MeasureError(f"mixed dimensions {sorted(dims)}")
    r = dims.pop() if dims else 1
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id"] + [f"v{k + 1}" for k in range(r)])
        for key, mu in zip(ids, measures):
            for p in mu.points:
                w.writerow([key] + [format(float(x), ".17g") for x in p])


def _looks_numeric(cells: Sequence[str]) -> bool:
    if not cells:
        return False
    for c in cells:
        try:
            float(c)
        except ValueError:
            return False
    return True
