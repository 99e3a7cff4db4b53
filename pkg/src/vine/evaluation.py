"""Benchmarks for the explanation pipeline.

Three checks: explanation accuracy against randomly drawn clusters, agreement
of explanation features with pairwise H-statistics, and the reconstruction
ceiling, which scores how well predictions can be rebuilt from the curves
alone (mean prediction plus one curve lookup per feature, summed).

Reconstruction, sketched for an additive model pred(x) = sum_f g_f(x_f):
the centered PDP of feature f is exactly g_f(v) - mean_i g_f(x_i_f), so
summing PDP lookups over features and adding the mean prediction returns
pred(x) identically; its ceiling r-squared is 1. An instance's own ICE curve,
by contrast, carries the instance's full deviation at every point, so summing
raw ICE lookups would count that deviation once per feature; likewise a
cluster centroid carries its subset's mean deviation, which the interacting
partner's curve counts again. Re-anchoring each looked-up curve by its own
grid mean removes those offsets: an ICE row becomes g_f(v) - mean_grid g_f,
which sums to pred(x) up to the grid-vs-data mean gap (zero when each
feature's values cover its grid uniformly). The ICE and regional-curve paths
below therefore subtract each curve's grid mean before summing; the PDP is
used as stored, since the global mean prediction already anchors it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .errors import DegenerateSplit, NoClusters
from .explain import FitMetrics, fit_stump
from .interaction import HMatrix
from .model import ModelOracle, predict
from .pipeline import AnalysisResult

BASELINE_N_CLUSTERS = 5


def percent(x: float) -> str:
    """Ratio as a percentage with one decimal, e.g. 0.2308 -> '23.1%'."""
    return f"{x * 100:.1f}%"


# --- random-cluster baseline -------------------------------------------------


@dataclass
class BaselineReport:
    """Explanation metrics for the pipeline's clusters vs random partitions."""

    real: dict[int, list[FitMetrics]]
    random: dict[int, list[FitMetrics]]
    seed: int
    dataset: str

    def _mean_accuracy(self, metrics: dict[int, list[FitMetrics]]) -> float:
        accs = [m.accuracy for per_feature in metrics.values() for m in per_feature]
        return float(np.mean(accs)) if accs else float("nan")

    @property
    def mean_real_accuracy(self) -> float:
        return self._mean_accuracy(self.real)

    @property
    def mean_random_accuracy(self) -> float:
        return self._mean_accuracy(self.random)

    def to_json_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "seed": self.seed,
            "mean_real_accuracy": self.mean_real_accuracy,
            "mean_random_accuracy": self.mean_random_accuracy,
            "per_feature": {
                str(f): {
                    "real": [m.to_json_dict() for m in self.real.get(f, [])],
                    "random": [m.to_json_dict() for m in self.random.get(f, [])],
                }
                for f in sorted(set(self.real) | set(self.random))
            },
        }


def _random_partition(n: int, parts: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Shuffle rows and cut them into ``parts`` nonempty groups of random size.

    Sizes come from a uniformly random composition of n: sort ``parts - 1``
    distinct cut points drawn from 1..n-1.
    """
    cuts = np.sort(rng.choice(np.arange(1, n), size=parts - 1, replace=False))
    perm = rng.permutation(n)
    return np.split(perm, cuts)


def _zero_metrics(n: int, cluster_size: int) -> FitMetrics:
    return FitMetrics(
        accuracy=(n - cluster_size) / n,
        precision=0.0,
        recall=0.0,
        f1=0.0,
        cluster_size=cluster_size,
        matched_size=0,
    )


def random_cluster_baseline(
    ds: Dataset,
    result: AnalysisResult,
    *,
    n_clusters: int = BASELINE_N_CLUSTERS,
    seed: int = 0,
) -> BaselineReport:
    """Compare explanation metrics for pipeline clusters vs random partitions.

    For every analyzed feature, the rows are split into ``n_clusters`` random
    nonempty groups, each explained by the same stump fit used on real
    clusters; the real side reports the metrics of the pipeline's explained
    clusters after merging. A random group with no explainable boundary
    scores zero.
    """
    rng = np.random.default_rng(seed)
    real: dict[int, list[FitMetrics]] = {}
    random: dict[int, list[FitMetrics]] = {}
    for f in sorted(result.features):
        fa = result.features[f]
        real[f] = [p.metrics for p in fa.predicates if p.metrics is not None]
        random[f] = []
        for members in _random_partition(ds.n, n_clusters, rng):
            try:
                random[f].append(fit_stump(ds, members).metrics)
            except DegenerateSplit:
                random[f].append(_zero_metrics(ds.n, members.size))
    return BaselineReport(real=real, random=random, seed=seed, dataset=ds.name)


# --- correspondence with H-statistics ---------------------------------------


@dataclass
class CorrespondenceReport:
    """How often explanation features rank among a feature's top interactors."""

    pct_top3: float
    baseline: float
    total_clusters: int
    matched_clusters: int
    dataset: str
    per_feature: dict[int, tuple[int, int]] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "pct_top3": self.pct_top3,
            "baseline": self.baseline,
            "pct_top3_text": percent(self.pct_top3),
            "baseline_text": percent(self.baseline),
            "total_clusters": self.total_clusters,
            "matched_clusters": self.matched_clusters,
            "per_feature": {
                str(f): {"clusters": c, "matched": m}
                for f, (c, m) in sorted(self.per_feature.items())
            },
        }


def hstat_correspondence(result: AnalysisResult, hmat: HMatrix) -> CorrespondenceReport:
    """Fraction of surviving explanations whose feature is a top-3 interactor.

    For each plotted feature, its surviving clusters' explanation features
    are checked against the three features with the highest H value for that
    feature. The baseline is the chance rate 3 / K.
    """
    total = 0
    hits = 0
    per_feature: dict[int, tuple[int, int]] = {}
    for f in sorted(result.features):
        preds = result.features[f].surviving_predicates
        if not preds:
            continue
        top3 = set(hmat.top_interactors(f, 3))
        matched = sum(1 for p in preds if p.feature in top3)
        per_feature[f] = (len(preds), matched)
        total += len(preds)
        hits += matched
    if total == 0:
        raise NoClusters("no surviving clusters anywhere; nothing to score")
    k = result.dataset.k
    return CorrespondenceReport(
        pct_top3=hits / total,
        baseline=3.0 / k,
        total_clusters=total,
        matched_clusters=hits,
        dataset=result.dataset.name,
        per_feature=per_feature,
    )


# --- reconstruction ceiling ---------------------------------------------------


@dataclass
class CeilingReport:
    """Reconstruction r-squared per method plus predicate-match counters."""

    r2: dict[str, float]
    n_multi_match: int
    n_no_match: int
    dataset: str
    degenerate_variance: bool = False

    def to_json_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "r2": dict(self.r2),
            "n_multi_match": self.n_multi_match,
            "n_no_match": self.n_no_match,
            "degenerate_variance": self.degenerate_variance,
        }


def _interp_rows(rows: np.ndarray, grid: np.ndarray, x: np.ndarray) -> np.ndarray:
    """rows[i] linearly interpolated at x[i], clamped at the grid ends.

    Exact (no interpolation error) whenever x[i] hits a grid value.
    """
    m = grid.size
    pos = np.clip(np.searchsorted(grid, x, side="right") - 1, 0, m - 2)
    span = grid[pos + 1] - grid[pos]
    t = np.clip((x - grid[pos]) / span, 0.0, 1.0)
    idx = np.arange(rows.shape[0])
    return rows[idx, pos] * (1.0 - t) + rows[idx, pos + 1] * t


def information_ceiling(
    ds: Dataset,
    oracle: ModelOracle,
    result: AnalysisResult,
) -> CeilingReport:
    """Upper bound on prediction fidelity readable from each curve family.

    Per instance and feature, a delta-Y is looked up from the PDP, from the
    instance's own ICE row, or from the centroid of the regional curve whose
    predicate the instance satisfies; matching several predicates averages
    their values and matching none falls back to the PDP. ICE rows and
    centroids are re-anchored by their grid mean (see the module docstring).
    The per-feature deltas are summed, added to the mean prediction, and
    scored with r-squared against the model's own predictions.
    """
    m = result.mean_prediction
    y_model = predict(oracle, ds.X)
    n = ds.n

    pdp_sum = np.zeros(n)
    ice_sum = np.zeros(n)
    vine_sum = np.zeros(n)
    n_multi = 0
    n_none = 0

    for f in sorted(result.features):
        fa = result.features[f]
        grid = fa.curves.grid.values
        x = ds.X[:, f]

        pdp_vals = np.interp(x, grid, fa.curves.pdp)
        pdp_sum += pdp_vals

        ice_vals = _interp_rows(fa.curves.ice, grid, x)
        ice_sum += ice_vals - fa.curves.ice.mean(axis=1)

        match_count = np.zeros(n, dtype=int)
        acc = np.zeros(n)
        for c, pred in enumerate(fa.surviving_predicates):
            mask = pred.matches(ds.X)
            centroid = fa.surviving.centroids[c]
            acc[mask] += np.interp(x[mask], grid, centroid) - centroid.mean()
            match_count[mask] += 1
        vine_vals = np.where(
            match_count > 0, acc / np.maximum(match_count, 1), pdp_vals
        )
        vine_sum += vine_vals
        n_multi += int((match_count >= 2).sum())
        n_none += int((match_count == 0).sum())

    ss_tot = float(((y_model - m) ** 2).sum())
    if ss_tot == 0.0:
        return CeilingReport(
            r2={"pdp": 1.0, "vine": 1.0, "ice": 1.0},
            n_multi_match=n_multi,
            n_no_match=n_none,
            dataset=ds.name,
            degenerate_variance=True,
        )

    def r2(total: np.ndarray) -> float:
        ss_res = float(((y_model - (m + total)) ** 2).sum())
        return 1.0 - ss_res / ss_tot

    return CeilingReport(
        r2={"pdp": r2(pdp_sum), "vine": r2(vine_sum), "ice": r2(ice_sum)},
        n_multi_match=n_multi,
        n_no_match=n_none,
        dataset=ds.name,
    )
