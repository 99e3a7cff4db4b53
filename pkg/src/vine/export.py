"""Serialization of a full analysis into the versioned JSON document the
exploration UI consumes.

The document is deterministic for a fixed analysis and seed: floats are cut
to 6 significant digits and every sampling step uses the given seed.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .dataset import Dataset, FeatureKind
from .explain import Direction, predicate_text
from .pipeline import AnalysisResult

SCHEMA_VERSION = "vine/1"
DEFAULT_ICE_SAMPLE_CAP = 200
DEFAULT_HISTOGRAM_BINS = 20


def _sig6(x: float) -> float:
    return float(f"{float(x):.6g}")


def _rounded(obj):
    if isinstance(obj, float):
        return _sig6(obj)
    if isinstance(obj, dict):
        return {key: _rounded(value) for key, value in obj.items()}
    if isinstance(obj, list):
        return [_rounded(value) for value in obj]
    return obj


def dataset_histogram(ds: Dataset, feature_index: int, bins: int = DEFAULT_HISTOGRAM_BINS):
    """Equal-width histogram over the observed range; binary columns get
    exactly two bins."""
    x = ds.X[:, feature_index]
    if ds.schema[feature_index].kind is FeatureKind.BINARY:
        edges = np.array([0.0, 0.5, 1.0])
    else:
        lo, hi = float(x.min()), float(x.max())
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(x, bins=edges)
    return edges, counts


def export_document(
    result: AnalysisResult,
    *,
    ice_sample_cap: int = DEFAULT_ICE_SAMPLE_CAP,
    histogram_bins: int = DEFAULT_HISTOGRAM_BINS,
    seed: int = 0,
    reports: dict | None = None,
    run_config: dict | None = None,
) -> dict:
    """Bundle curves, clusters, explanations, scores, and histograms."""
    ds = result.dataset
    rng = np.random.default_rng(seed)

    edges_by_feature = {}
    features_block = []
    for j, col in enumerate(ds.schema):
        edges, counts = dataset_histogram(ds, j, histogram_bins)
        edges_by_feature[j] = edges
        features_block.append(
            {
                "name": col.name,
                "display_name": col.label,
                "kind": col.kind.value,
                "source_column": col.source_column,
                "min": float(ds.X[:, j].min()),
                "max": float(ds.X[:, j].max()),
                "histogram": {
                    "bin_edges": [float(e) for e in edges],
                    "counts": [int(c) for c in counts],
                },
            }
        )

    analyses = []
    for f in sorted(result.features):
        fa = result.features[f]
        vine_curves = []
        ice_sample = []
        sizes = fa.surviving.sizes()
        for c, pred in enumerate(fa.surviving_predicates):
            split = pred.feature
            edges = edges_by_feature[split]
            member_vals = ds.X[fa.surviving.members(c), split]
            if pred.direction is Direction.LE:
                region = member_vals <= pred.value
            else:
                region = member_vals > pred.value
            in_counts, _ = np.histogram(member_vals[region], bins=edges)
            out_counts, _ = np.histogram(member_vals[~region], bins=edges)
            vine_curves.append(
                {
                    "id": c,
                    "size": int(sizes[c]),
                    "centroid": [float(v) for v in fa.surviving.centroids[c]],
                    "predicate": {
                        "feature": ds.schema[split].name,
                        "feature_index": split,
                        "direction": pred.direction.value,
                        "value": float(pred.value),
                        "text": predicate_text(pred, ds.schema),
                    },
                    "metrics": pred.metrics.to_json_dict(),
                    "member_histograms": {
                        ds.schema[split].name: {
                            "bin_edges": [float(e) for e in edges],
                            "in_region": [int(v) for v in in_counts],
                            "out_region": [int(v) for v in out_counts],
                        }
                    },
                }
            )
            members = fa.surviving.members(c)
            if members.size > ice_sample_cap:
                members = np.sort(rng.choice(members, ice_sample_cap, replace=False))
            for i in members:
                ice_sample.append(
                    {
                        "row": int(i),
                        "cluster": c,
                        "curve": [float(v) for v in fa.curves.ice[i]],
                    }
                )
        analyses.append(
            {
                "name": ds.schema[f].name,
                "feature_index": f,
                "grid": [float(v) for v in fa.curves.grid.values],
                "pdp": [float(v) for v in fa.curves.pdp],
                "scores": {
                    "importance": fa.scores.importance,
                    "interaction_strength": fa.scores.interaction_strength,
                },
                "vine_curves": vine_curves,
                "ice_sample": ice_sample,
            }
        )

    doc = {
        "schema_version": SCHEMA_VERSION,
        "dataset": {"name": ds.name, "n": ds.n, "features": features_block},
        "mean_prediction": result.mean_prediction,
        "features": analyses,
    }
    if reports:
        doc["reports"] = reports
    if run_config:
        doc["run_config"] = run_config
    return _rounded(doc)


def dumps_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def write_json(doc: dict, path: str | Path) -> None:
    Path(path).write_text(dumps_json(doc), encoding="utf-8")


def schema_path() -> Path:
    """Location of the published JSON Schema for this document version."""
    return Path(resources.files("vine").joinpath("schema/vine-1.schema.json"))
