"""End-to-end per-feature analysis: curves, clusters, explanations, scores."""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .clustering import (
    DEFAULT_MERGE_THRESHOLD,
    DEFAULT_MIN_DTW_RATIO,
    DEFAULT_MIN_F1,
    DEFAULT_N_CLUSTERS,
    ClusterAssignment,
    agglomerative_cluster,
    filter_clusters,
    merge_clusters,
    slope_features,
)
from .dataset import DEFAULT_GRID_SIZE, Dataset, quantile_grid
from .errors import ConstantFeature, DegenerateSplit
from .explain import Predicate, fit_stump
from .interaction import FeatureScores, feature_scores
from .model import ModelOracle
from .pdcurves import CurveSet, compute_ice, mean_prediction_of


@dataclass(frozen=True)
class FilterParams:
    min_f1: float = DEFAULT_MIN_F1
    min_dtw_ratio: float = DEFAULT_MIN_DTW_RATIO
    min_size: float | None = None


@dataclass
class FeatureAnalysis:
    """Everything the pipeline derives for one feature.

    ``assignment``/``predicates`` hold the explained clusters after merging;
    ``surviving``/``surviving_predicates`` are what remains after filtering
    and is what gets exported as the feature's regional curves.
    """

    feature_index: int
    curves: CurveSet
    assignment: ClusterAssignment
    predicates: list[Predicate]
    surviving: ClusterAssignment
    surviving_predicates: list[Predicate]
    scores: FeatureScores


@dataclass
class AnalysisResult:
    dataset: Dataset
    mean_prediction: float
    features: dict[int, FeatureAnalysis] = field(default_factory=dict)
    n_clusters: int = DEFAULT_N_CLUSTERS
    grid_size: int = DEFAULT_GRID_SIZE


def analyze_feature(
    ds: Dataset,
    oracle: ModelOracle,
    feature_index: int,
    *,
    mean_prediction: float,
    grid_size: int = DEFAULT_GRID_SIZE,
    n_clusters: int = DEFAULT_N_CLUSTERS,
    merge_threshold: float = DEFAULT_MERGE_THRESHOLD,
    filter_params: FilterParams = FilterParams(),
) -> FeatureAnalysis:
    """Run the curve-to-explained-clusters pipeline for one feature."""
    grid = quantile_grid(ds, feature_index, grid_size)
    curves = compute_ice(ds, oracle, feature_index, grid, mean_prediction=mean_prediction)
    slopes = slope_features(curves)
    k = min(n_clusters, ds.n)
    assignment = agglomerative_cluster(slopes, k, curves.ice)

    # clusters with no explainable boundary are dropped before merging
    predicates: list[Predicate] = []
    keep: list[int] = []
    for c in range(assignment.k):
        try:
            predicates.append(fit_stump(ds, assignment.members(c)))
            keep.append(c)
        except DegenerateSplit:
            continue
    if len(keep) < assignment.k:
        relabel = np.full(assignment.k, -1, dtype=int)
        for new, old in enumerate(keep):
            relabel[old] = new
        labels = np.where(assignment.labels >= 0, relabel[assignment.labels], -1)
        assignment = ClusterAssignment(labels, len(keep), assignment.centroids[keep])

    assignment, predicates = merge_clusters(
        ds, assignment, predicates, threshold=merge_threshold
    )
    surviving, surviving_predicates = filter_clusters(
        assignment,
        predicates,
        curves.pdp,
        min_f1=filter_params.min_f1,
        min_dtw_ratio=filter_params.min_dtw_ratio,
        min_size=filter_params.min_size,
    )
    scores = feature_scores(curves, surviving.centroids)
    return FeatureAnalysis(
        feature_index=feature_index,
        curves=curves,
        assignment=assignment,
        predicates=predicates,
        surviving=surviving,
        surviving_predicates=surviving_predicates,
        scores=scores,
    )


def resolve_jobs(requested: int | None) -> int:
    """Worker count for feature-level parallelism.

    VINE_JOBS, when set, overrides any requested value; otherwise the request
    wins, falling back to the available cores.
    """
    env = os.environ.get("VINE_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    if requested is not None:
        return max(1, requested)
    return os.cpu_count() or 1


def analyze(
    ds: Dataset,
    oracle: ModelOracle,
    *,
    grid_size: int = DEFAULT_GRID_SIZE,
    n_clusters: int = DEFAULT_N_CLUSTERS,
    merge_threshold: float = DEFAULT_MERGE_THRESHOLD,
    filter_params: FilterParams = FilterParams(),
    feature_indices: list[int] | None = None,
    jobs: int | None = None,
) -> AnalysisResult:
    """Analyze every feature (or a subset) against the oracle.

    Constant features cannot take a grid and are skipped with a warning.
    Features are processed independently, in parallel up to ``jobs`` workers;
    the result is keyed by feature index and independent of scheduling order.
    """
    mean_prediction = mean_prediction_of(ds, oracle)
    if feature_indices is None:
        feature_indices = list(range(ds.k))
    jobs = resolve_jobs(jobs)

    def run(f: int) -> FeatureAnalysis | None:
        try:
            return analyze_feature(
                ds,
                oracle,
                f,
                mean_prediction=mean_prediction,
                grid_size=grid_size,
                n_clusters=n_clusters,
                merge_threshold=merge_threshold,
                filter_params=filter_params,
            )
        except ConstantFeature:
            warnings.warn(f"feature {ds.schema[f].name!r} is constant; skipped")
            return None

    if jobs > 1 and len(feature_indices) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            analyses = list(pool.map(run, feature_indices))
    else:
        analyses = [run(f) for f in feature_indices]

    result = AnalysisResult(
        dataset=ds,
        mean_prediction=mean_prediction,
        n_clusters=n_clusters,
        grid_size=grid_size,
    )
    for f, fa in zip(feature_indices, analyses):
        if fa is not None:
            result.features[f] = fa
    return result
