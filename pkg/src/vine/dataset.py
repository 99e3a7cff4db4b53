"""Tabular dataset loading, encoding, quantile grids, and synthetic fixtures.

A :class:`Dataset` is an immutable bundle of a column schema, a fully numeric
feature matrix ``X`` and a regression target ``y``. String columns in a CSV
are one-hot expanded at load time; everything downstream works on encoded
(numeric) columns only.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import (
    ConstantFeature,
    EmptyDataset,
    MissingTarget,
    MissingValue,
    NonNumericTarget,
)

DEFAULT_GRID_SIZE = 40
DEFAULT_ORDINAL_MAX_CARDINALITY = 24


class FeatureKind(str, Enum):
    NUMERIC = "numeric"
    ORDINAL = "ordinal"
    BINARY = "binary"


@dataclass(frozen=True)
class ColumnSchema:
    """One encoded column: its name, kind, and provenance.

    ``source_column`` is set exactly when the column is a one-hot member of an
    original categorical column. ``display_name`` is an optional human label.
    """

    name: str
    kind: FeatureKind
    source_column: str | None = None
    display_name: str | None = None

    @property
    def label(self) -> str:
        return self.display_name if self.display_name is not None else self.name


@dataclass(frozen=True)
class Dataset:
    """Immutable tabular dataset: schema, N x K matrix X, length-N target y."""

    schema: tuple[ColumnSchema, ...]
    X: np.ndarray
    y: np.ndarray
    name: str = "dataset"

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "schema", tuple(self.schema))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if X.ndim != 2:
            raise ValueError("X must be a 2-D matrix")
        n, k = X.shape
        if n < 2:
            raise EmptyDataset(f"need at least 2 rows, got {n}")
        if k < 1:
            raise EmptyDataset("need at least 1 feature column")
        if y.shape != (n,):
            raise ValueError(f"y must have shape ({n},), got {y.shape}")
        if not np.isfinite(X).all():
            raise MissingValue(int(np.argwhere(~np.isfinite(X))[0][0]) + 1, "<matrix>")
        if not np.isfinite(y).all():
            raise NonNumericTarget("target contains non-finite values")
        if len(self.schema) != k:
            raise ValueError(f"schema has {len(self.schema)} columns, X has {k}")
        names = [c.name for c in self.schema]
        if len(set(names)) != len(names):
            raise ValueError("column names must be unique")
        for j, col in enumerate(self.schema):
            if col.kind is FeatureKind.BINARY:
                vals = set(np.unique(X[:, j]))
                if not vals <= {0.0, 1.0}:
                    raise ValueError(f"binary column {col.name!r} has values outside {{0, 1}}")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[1]

    def feature_index(self, name: str) -> int:
        for j, col in enumerate(self.schema):
            if col.name == name:
                return j
        raise KeyError(name)

    def column(self, j: int) -> np.ndarray:
        return self.X[:, j]


@dataclass(frozen=True)
class FeatureGrid:
    """Ascending evaluation grid for one feature, from its empirical quantiles."""

    feature_index: int
    values: np.ndarray
    f_min: float
    f_max: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("grid needs at least 2 values")
        if not (np.diff(values) > 0).all():
            raise ValueError("grid values must be strictly ascending")
        if self.f_min != values[0] or self.f_max != values[-1]:
            raise ValueError("f_min/f_max must match the grid endpoints")

    @property
    def size(self) -> int:
        return int(self.values.size)


def quantile_grid(ds: Dataset, feature_index: int, m: int = DEFAULT_GRID_SIZE) -> FeatureGrid:
    """Empirical quantile grid for one feature.

    Returns the ``m`` lower-interpolation quantiles at probabilities
    ``i / (m - 1)``, deduplicated. Binary columns always get the grid
    ``[0, 1]`` regardless of ``m``.
    """
    if m < 2:
        raise ValueError(f"grid size must be >= 2, got {m}")
    col = ds.schema[feature_index]
    if col.kind is FeatureKind.BINARY:
        return FeatureGrid(feature_index, np.array([0.0, 1.0]), 0.0, 1.0)
    x = ds.column(feature_index)
    probs = np.arange(m) / (m - 1)
    values = np.unique(np.quantile(x, probs, method="lower"))
    if values.size < 2:
        raise ConstantFeature(
            f"feature {col.name!r} is constant; cannot build a grid"
        )
    return FeatureGrid(feature_index, values, float(values[0]), float(values[-1]))


def _parse_float(text: str) -> float | None:
    try:
        return float(text)
    except ValueError:
        return None


def load_csv(
    path: str | Path,
    target: str,
    *,
    categorical: Iterable[str] = (),
    ordinal_max_cardinality: int = DEFAULT_ORDINAL_MAX_CARDINALITY,
    name: str | None = None,
) -> Dataset:
    """Load an RFC-4180 CSV with a header row into a Dataset.

    String-valued columns (and any column named in ``categorical``) are
    one-hot expanded into binary ``col=value`` members with their
    ``source_column`` recorded. Numeric columns are kept verbatim and their
    kind inferred: binary when the value set is within {0, 1}, ordinal when
    integer-valued with at most ``ordinal_max_cardinality`` distinct values,
    numeric otherwise. Missing cells are an error; no imputation is done.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataset(f"{path} is empty") from None
        rows = [row for row in reader if row]

    if target not in header:
        raise MissingTarget(f"target column {target!r} not in header {header}")
    if not rows:
        raise EmptyDataset(f"{path} has a header but no data rows")

    ncols = len(header)
    columns: dict[str, list[str]] = {h: [] for h in header}
    for i, row in enumerate(rows):
        if len(row) != ncols:
            raise MissingValue(i + 1, f"<row has {len(row)} of {ncols} cells>")
        for h, cell in zip(header, row):
            if cell.strip() == "":
                raise MissingValue(i + 1, h)
            columns[h].append(cell)

    forced = set(categorical)
    unknown = forced - set(header)
    if unknown:
        raise MissingTarget(f"categorical column(s) not in header: {sorted(unknown)}")

    y_parsed = [_parse_float(v) for v in columns[target]]
    if any(v is None for v in y_parsed):
        raise NonNumericTarget(f"target column {target!r} has non-numeric values")
    y = np.array(y_parsed, dtype=float)

    schema: list[ColumnSchema] = []
    mats: list[np.ndarray] = []
    for h in header:
        if h == target:
            continue
        raw = columns[h]
        parsed = [_parse_float(v) for v in raw]
        is_numeric = all(v is not None for v in parsed)
        if is_numeric and h not in forced:
            x = np.array(parsed, dtype=float)
            schema.append(ColumnSchema(h, _infer_kind(x, ordinal_max_cardinality)))
            mats.append(x)
        else:
            for level in sorted(set(raw)):
                x = np.array([1.0 if v == level else 0.0 for v in raw])
                schema.append(
                    ColumnSchema(f"{h}={level}", FeatureKind.BINARY, source_column=h)
                )
                mats.append(x)

    if not schema:
        raise EmptyDataset("no feature columns besides the target")
    X = np.column_stack(mats)
    return Dataset(tuple(schema), X, y, name=name or path.stem)


def _infer_kind(x: np.ndarray, ordinal_max_cardinality: int) -> FeatureKind:
    distinct = np.unique(x)
    if set(distinct) <= {0.0, 1.0}:
        return FeatureKind.BINARY
    if np.all(distinct == np.round(distinct)) and distinct.size <= ordinal_max_cardinality:
        return FeatureKind.ORDINAL
    return FeatureKind.NUMERIC


def synth_interaction(n: int, seed: int) -> Dataset:
    """Synthetic regression dataset with one planted feature interaction.

    x1, x2, x3 ~ Uniform[0, 1], binary x4 ~ Bernoulli(0.5), and
    y = x1 + 2*x2 + 5*x3*x4 + eps with eps ~ Normal(0, 0.01). The x3*x4
    product term is the regional behavior the pipeline is expected to find.
    Deterministic for a fixed (n, seed).
    """
    rng = np.random.default_rng(seed)
    x1 = rng.random(n)
    x2 = rng.random(n)
    x3 = rng.random(n)
    x4 = rng.integers(0, 2, n).astype(float)
    eps = rng.normal(0.0, 0.01, n)
    y = x1 + 2.0 * x2 + 5.0 * x3 * x4 + eps
    schema = (
        ColumnSchema("x1", FeatureKind.NUMERIC),
        ColumnSchema("x2", FeatureKind.NUMERIC),
        ColumnSchema("x3", FeatureKind.NUMERIC),
        ColumnSchema("x4", FeatureKind.BINARY),
    )
    X = np.column_stack([x1, x2, x3, x4])
    return Dataset(schema, X, y, name=f"synth-interaction-n{n}-s{seed}")
