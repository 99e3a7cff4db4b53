"""Curve distances, per-feature overview scores, and pairwise H-statistics."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import EmptySeries, ZeroDenominatorWarning
from .model import ModelOracle, predict
from .pdcurves import CurveSet

DEFAULT_H_SAMPLE = 100


def dtw(a: np.ndarray, b: np.ndarray) -> float:
    """Dynamic time warping distance with |a_i - b_j| local cost.

    Unconstrained warping window, unnormalized path cost. Symmetric, zero on
    identical series; the triangle inequality is not guaranteed.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise EmptySeries("dtw needs two nonempty series")
    la, lb = a.size, b.size
    prev = np.full(lb + 1, np.inf)
    prev[0] = 0.0
    for i in range(la):
        cur = np.empty(lb + 1)
        cur[0] = np.inf
        cost = np.abs(a[i] - b)
        for j in range(1, lb + 1):
            cur[j] = cost[j - 1] + min(prev[j - 1], prev[j], cur[j - 1])
        prev = cur
    return float(prev[lb])


@dataclass(frozen=True)
class FeatureScores:
    """Overview-position scores for one feature.

    ``importance`` is the standard deviation of the PDP. The interaction
    strength sums each regional curve's warped distance from the PDP,
    normalized by max |pdp| (left unnormalized when the PDP is identically
    zero); it is 0 for a feature with no regional curves.
    """

    feature_index: int
    importance: float
    interaction_strength: float


def feature_scores(curves: CurveSet, vine_centroids: np.ndarray) -> FeatureScores:
    """Importance and interaction strength from the PDP and regional curves."""
    pdp = curves.pdp
    importance = float(pdp.std())
    total = sum(dtw(centroid, pdp) for centroid in vine_centroids)
    denom = float(np.max(np.abs(pdp)))
    strength = total / denom if denom > 0 else total
    return FeatureScores(curves.feature_index, importance, float(strength))


def _pd_values(oracle: ModelOracle, S: np.ndarray, cols: tuple[int, ...]) -> np.ndarray:
    """Centered partial dependence of the given columns at each sample row.

    Entry i is the average prediction over the sample with the chosen columns
    forced to row i's values, minus the mean of those averages.
    """
    s = S.shape[0]
    batch = np.tile(S, (s, 1))
    for c in cols:
        batch[:, c] = np.repeat(S[:, c], s)
    pd = predict(oracle, batch).reshape(s, s).mean(axis=1)
    return pd - pd.mean()


def h_statistic(
    ds: Dataset,
    oracle: ModelOracle,
    j: int,
    k: int,
    *,
    sample_size: int = DEFAULT_H_SAMPLE,
    seed: int = 0,
) -> float:
    """Pairwise interaction strength in [0, 1] between features j and k.

    Compares the two-feature partial dependence against the sum of the
    one-feature partial dependences on a seeded row subsample; 0 means the
    joint effect is exactly additive. Returns 0 with a warning when the
    two-feature partial dependence is identically zero.
    """
    if j == k:
        raise ValueError("h_statistic needs two distinct features")
    if sample_size > ds.n:
        raise ValueError(f"sample_size {sample_size} exceeds N={ds.n}")
    idx = np.sort(np.random.default_rng(seed).choice(ds.n, sample_size, replace=False))
    S = ds.X[idx]
    return _h_from_sample(oracle, S, j, k)


def _h_from_sample(oracle: ModelOracle, S: np.ndarray, j: int, k: int,
                   f_j: np.ndarray | None = None, f_k: np.ndarray | None = None) -> float:
    if f_j is None:
        f_j = _pd_values(oracle, S, (j,))
    if f_k is None:
        f_k = _pd_values(oracle, S, (k,))
    f_jk = _pd_values(oracle, S, (j, k))
    denom = float((f_jk**2).sum())
    if denom == 0.0:
        warnings.warn(
            f"two-feature partial dependence of ({j}, {k}) is identically zero",
            ZeroDenominatorWarning,
        )
        return 0.0
    h2 = float(((f_jk - f_j - f_k) ** 2).sum()) / denom
    return float(np.sqrt(np.clip(h2, 0.0, 1.0)))


@dataclass(frozen=True)
class HMatrix:
    """Symmetric matrix of pairwise H values; the diagonal is undefined (nan)."""

    values: np.ndarray
    sample_indices: np.ndarray
    seed: int

    def top_interactors(self, feature: int, count: int = 3) -> list[int]:
        """Feature indices most strongly interacting with ``feature``."""
        row = self.values[feature].copy()
        row[feature] = -np.inf
        row[np.isnan(row)] = -np.inf
        order = np.argsort(-row, kind="stable")
        return [int(f) for f in order[:count] if np.isfinite(row[f])]

    def to_csv(self, names: list[str]) -> str:
        lines = ["feature," + ",".join(names)]
        for i, name in enumerate(names):
            cells = []
            for v in self.values[i]:
                cells.append("" if np.isnan(v) else f"{v:.6g}")
            lines.append(name + "," + ",".join(cells))
        return "\n".join(lines) + "\n"


def h_matrix(
    ds: Dataset,
    oracle: ModelOracle,
    *,
    sample_size: int = DEFAULT_H_SAMPLE,
    seed: int = 0,
) -> HMatrix:
    """All pairwise H-statistics on one shared seeded row subsample."""
    sample_size = min(sample_size, ds.n)
    idx = np.sort(np.random.default_rng(seed).choice(ds.n, sample_size, replace=False))
    S = ds.X[idx]
    singles = [_pd_values(oracle, S, (j,)) for j in range(ds.k)]
    values = np.full((ds.k, ds.k), np.nan)
    for j in range(ds.k):
        for k in range(j + 1, ds.k):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ZeroDenominatorWarning)
                h = _h_from_sample(oracle, S, j, k, f_j=singles[j], f_k=singles[k])
            values[j, k] = h
            values[k, j] = h
    return HMatrix(values, idx, seed)
