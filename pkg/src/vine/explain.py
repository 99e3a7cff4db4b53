"""One-split predicate explanations for clusters.

A cluster is explained by the depth-1 decision stump that best separates its
members from all other rows (one-vs-all, Shannon entropy gain). The matched
side of the split becomes a predicate like ``weight <= 3.1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .dataset import ColumnSchema, Dataset
from .errors import DegenerateSplit


class Direction(str, Enum):
    LE = "<="
    GT = ">"


@dataclass(frozen=True)
class FitMetrics:
    """Set agreement between cluster members A and predicate matches B."""

    accuracy: float
    precision: float
    recall: float
    f1: float
    cluster_size: int
    matched_size: int

    def to_json_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "cluster_size": self.cluster_size,
            "matched_size": self.matched_size,
        }


@dataclass(frozen=True)
class Predicate:
    """A single threshold condition on one feature, with its fit metrics.

    A row matches iff ``x[feature] <= value`` (LE) or ``x[feature] > value``
    (GT). The threshold always lies strictly inside the feature's observed
    range.
    """

    feature: int
    direction: Direction
    value: float
    metrics: FitMetrics | None = None

    def matches(self, X: np.ndarray) -> np.ndarray:
        col = X[:, self.feature]
        if self.direction is Direction.LE:
            return col <= self.value
        return col > self.value


def predicate_text(p: Predicate, schema: Sequence[ColumnSchema]) -> str:
    """Human-readable rendering, threshold at 4 significant digits."""
    return f"{schema[p.feature].label} {p.direction.value} {p.value:.4g}"


def evaluate_predicate(ds: Dataset, p: Predicate, members: np.ndarray) -> FitMetrics:
    """Score a predicate against a member set (precision is 0 on empty B)."""
    a = np.zeros(ds.n, dtype=bool)
    a[np.asarray(members, dtype=int)] = True
    b = p.matches(ds.X)
    inter = int((a & b).sum())
    n_a = int(a.sum())
    n_b = int(b.sum())
    precision = inter / n_b if n_b else 0.0
    recall = inter / n_a if n_a else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = (inter + int((~a & ~b).sum())) / ds.n
    return FitMetrics(accuracy, precision, recall, f1, n_a, n_b)


def _branch_entropy(pos: np.ndarray, total: np.ndarray) -> np.ndarray:
    """Shannon entropy of binary branches given positive counts, in bits."""
    with np.errstate(divide="ignore", invalid="ignore"):
        p = pos / total
        q = 1.0 - p
        h = -np.where(p > 0, p * np.log2(p), 0.0) - np.where(q > 0, q * np.log2(q), 0.0)
    return h


def fit_stump(ds: Dataset, members: np.ndarray) -> Predicate:
    """Best single-split explanation of a member set, one-vs-all.

    Tries every feature and every midpoint between adjacent distinct sorted
    values, maximizing information gain of the membership label. Ties resolve
    to the lowest feature index, then the lowest threshold. The predicate
    matches the split side with the higher member density.
    """
    members = np.asarray(members, dtype=int)
    n = ds.n
    z = np.zeros(n, dtype=bool)
    z[members] = True
    n_pos = int(z.sum())
    if n_pos == 0 or n_pos == n:
        raise DegenerateSplit("members must be a nonempty strict subset of the rows")

    h_parent = float(_branch_entropy(np.array([n_pos]), np.array([n]))[0])
    counts = np.arange(1, n)
    best_gain = 0.0
    best: tuple[int, float, int] | None = None
    for j in range(ds.k):
        x = ds.X[:, j]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        valid = xs[:-1] < xs[1:]
        if not valid.any():
            continue
        left_pos = np.cumsum(z[order])[:-1]
        h_left = _branch_entropy(left_pos, counts)
        h_right = _branch_entropy(n_pos - left_pos, n - counts)
        gain = h_parent - (counts * h_left + (n - counts) * h_right) / n
        gain[~valid] = -np.inf
        p = int(np.argmax(gain))
        if gain[p] > best_gain:
            best_gain = float(gain[p])
            best = (j, float((xs[p] + xs[p + 1]) / 2.0), p)

    if best is None:
        raise DegenerateSplit("no split with positive information gain")

    j, threshold, p = best
    x = ds.X[:, j]
    left = x <= threshold
    left_density = z[left].mean()
    right_density = z[~left].mean()
    direction = Direction.LE if left_density > right_density else Direction.GT
    metrics = evaluate_predicate(ds, Predicate(j, direction, threshold), members)
    return Predicate(j, direction, threshold, metrics)
