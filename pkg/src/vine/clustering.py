"""Grouping ICE curves into candidate regional curves.

Curves are represented by their finite-difference slopes and clustered
bottom-up with Ward linkage. Clusters whose explanations nearly coincide are
merged, and clusters that are small, poorly explained, or indistinguishable
from the PDP are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import DegenerateGrid, DegenerateSplit, KTooLarge
from .explain import Predicate, fit_stump
from .interaction import dtw
from .pdcurves import CurveSet

DEFAULT_N_CLUSTERS = 5
DEFAULT_MERGE_THRESHOLD = 0.05
DEFAULT_MIN_F1 = 0.75
DEFAULT_MIN_DTW_RATIO = 0.05

UNASSIGNED = -1


@dataclass(frozen=True)
class ClusterAssignment:
    """Cluster labels over the dataset rows plus per-cluster centroid curves.

    Each centroid is the column mean of its members' ICE rows, i.e. the PDP
    of the member subset. After filtering, rows of dropped clusters carry the
    label ``UNASSIGNED`` (-1); a full partition has none.
    """

    labels: np.ndarray
    k: int
    centroids: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "labels", labels)
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if labels.min(initial=0) < UNASSIGNED or labels.max(initial=-1) >= self.k:
            raise ValueError("labels out of range")
        present = np.unique(labels[labels >= 0])
        if present.size != self.k:
            raise ValueError("every cluster id in 0..k-1 must be nonempty")
        if self.centroids.shape[0] != self.k:
            raise ValueError("need one centroid per cluster")

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.labels == c)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels[self.labels >= 0], minlength=self.k)


def slope_features(curves: CurveSet) -> np.ndarray:
    """N x (M'-1) matrix of per-interval ICE slopes.

    Differences are divided by the actual grid spacing, so non-uniform
    quantile grids do not overweight dense regions.
    """
    if curves.grid.size < 2:
        raise DegenerateGrid("need at least 2 grid values to take slopes")
    spacing = np.diff(curves.grid.values)
    return np.diff(curves.ice, axis=1) / spacing


def _ward_cost_row(centroids, sizes, i, others) -> np.ndarray:
    """Merge cost (increase in within-cluster SSE) of cluster i vs others."""
    diff = centroids[others] - centroids[i]
    sq = np.einsum("ij,ij->i", diff, diff)
    return sizes[others] * sizes[i] / (sizes[others] + sizes[i]) * sq


def ward_labels(points: np.ndarray, k: int) -> np.ndarray:
    """Bottom-up Ward clustering of row vectors into k groups.

    Greedy global merging: each step joins the pair of clusters whose merge
    least increases total within-cluster squared error. On cost ties the pair
    with the lexicographically smallest (min id, max id) merges first, where
    a merged cluster keeps the smaller id. Returns labels 0..k-1 ordered by
    each cluster's smallest row index.
    """
    pts = np.ascontiguousarray(points, dtype=float)
    n = pts.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise KTooLarge(f"k={k} exceeds the number of rows {n}")
    if k == n:
        return np.arange(n)

    active = np.ones(n, dtype=bool)
    sizes = np.ones(n)
    centroids = pts.copy()
    parent = np.arange(n)
    nn = np.full(n, -1, dtype=int)
    nn_cost = np.full(n, np.inf)

    # initial nearest neighbours: singleton merge cost is half the squared
    # Euclidean distance, computed in chunks to bound memory
    sq_norms = np.einsum("ij,ij->i", pts, pts)
    chunk = max(1, (1 << 22) // n)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        d = sq_norms[start:stop, None] + sq_norms[None, :] - 2.0 * (pts[start:stop] @ pts.T)
        np.maximum(d, 0.0, out=d)
        d *= 0.5
        d[np.arange(stop - start), np.arange(start, stop)] = np.inf
        best = np.argmin(d, axis=1)
        nn[start:stop] = best
        nn_cost[start:stop] = d[np.arange(stop - start), best]

    n_active = n
    while n_active > k:
        act = np.flatnonzero(active)
        costs = nn_cost[act]
        tied = act[costs == costs.min()]
        a, b = min((min(i, nn[i]), max(i, nn[i])) for i in tied)

        total = sizes[a] + sizes[b]
        centroids[a] = (sizes[a] * centroids[a] + sizes[b] * centroids[b]) / total
        sizes[a] = total
        active[b] = False
        parent[b] = a
        n_active -= 1
        if n_active == 1:
            break

        others = np.flatnonzero(active)
        others = others[others != a]
        row = _ward_cost_row(centroids, sizes, a, others)
        j = int(np.argmin(row))
        nn[a] = others[j]
        nn_cost[a] = row[j]

        # merging never shrinks a cluster's distance to third parties, so a
        # cached neighbour stays valid unless it was one of the merged pair
        stale = (nn[others] == a) | (nn[others] == b)
        better = ~stale & ((row < nn_cost[others]) | ((row == nn_cost[others]) & (a < nn[others])))
        nn[others[better]] = a
        nn_cost[others[better]] = row[better]
        stale_ids = others[stale]
        if stale_ids.size:
            act = np.flatnonzero(active)
            c_stale = centroids[stale_ids]
            c_act = centroids[act]
            sq = (
                np.einsum("ij,ij->i", c_stale, c_stale)[:, None]
                + np.einsum("ij,ij->i", c_act, c_act)[None, :]
                - 2.0 * (c_stale @ c_act.T)
            )
            np.maximum(sq, 0.0, out=sq)
            cost = sizes[stale_ids][:, None] * sizes[act][None, :] / (
                sizes[stale_ids][:, None] + sizes[act][None, :]
            ) * sq
            cost[np.arange(stale_ids.size), np.searchsorted(act, stale_ids)] = np.inf
            best = np.argmin(cost, axis=1)
            nn[stale_ids] = act[best]
            nn_cost[stale_ids] = cost[np.arange(stale_ids.size), best]

    roots = np.arange(n)
    while True:
        hop = parent[roots]
        if (hop == roots).all():
            break
        roots = hop
    order = {r: i for i, r in enumerate(sorted(set(roots.tolist())))}
    return np.array([order[r] for r in roots])


def agglomerative_cluster(slopes: np.ndarray, k: int, ice: np.ndarray) -> ClusterAssignment:
    """Ward-cluster slope rows into k groups; centroids come from ``ice``."""
    labels = ward_labels(slopes, k)
    centroids = np.vstack([ice[labels == c].mean(axis=0) for c in range(k)])
    return ClusterAssignment(labels, k, centroids)


def _remove_cluster(assignment: ClusterAssignment, dropped: int, merged_into: int | None) -> np.ndarray:
    """Relabel after removing one cluster id, compacting ids above it."""
    labels = assignment.labels.copy()
    if merged_into is None:
        labels[labels == dropped] = UNASSIGNED
    else:
        labels[labels == dropped] = merged_into
    shift = labels > dropped
    labels[shift] -= 1
    return labels


def merge_clusters(
    ds: Dataset,
    assignment: ClusterAssignment,
    predicates: list[Predicate],
    *,
    threshold: float = DEFAULT_MERGE_THRESHOLD,
) -> tuple[ClusterAssignment, list[Predicate]]:
    """Merge cluster pairs whose explanations nearly coincide.

    Two clusters merge when their predicates use the same feature and
    direction and the threshold gap, normalized by that feature's observed
    range, is at most ``threshold``. The merged cluster's centroid is the
    member-weighted average and its predicate is refit on the union; the scan
    restarts until no pair qualifies. A merge whose union cannot be refit
    (it would cover every row) is skipped.
    """
    if len(predicates) != assignment.k:
        raise ValueError("need exactly one predicate per cluster")
    labels = assignment.labels
    centroids = assignment.centroids.copy()
    preds = list(predicates)
    k = assignment.k

    merged = True
    while merged:
        merged = False
        for i in range(k):
            for dupe in range(i + 1, k):
                pi, pd = preds[i], preds[dupe]
                if pi.feature != pd.feature or pi.direction != pd.direction:
                    continue
                col = ds.column(pi.feature)
                span = float(col.max() - col.min())
                gap = abs(pi.value - pd.value)
                if (span > 0 and gap / span <= threshold) or (span == 0 and gap == 0):
                    union = np.flatnonzero((labels == i) | (labels == dupe))
                    if union.size >= ds.n:
                        continue
                    try:
                        refit = fit_stump(ds, union)
                    except DegenerateSplit:
                        continue
                    sizes = np.bincount(labels[labels >= 0], minlength=k)
                    w_i, w_d = sizes[i], sizes[dupe]
                    centroids[i] = (w_i * centroids[i] + w_d * centroids[dupe]) / (w_i + w_d)
                    centroids = np.delete(centroids, dupe, axis=0)
                    labels = labels.copy()
                    labels[labels == dupe] = i
                    labels[labels > dupe] -= 1
                    preds[i] = refit
                    del preds[dupe]
                    k -= 1
                    merged = True
                    break
            if merged:
                break

    return ClusterAssignment(labels, k, centroids), preds


def filter_clusters(
    assignment: ClusterAssignment,
    predicates: list[Predicate],
    pdp: np.ndarray,
    *,
    min_f1: float = DEFAULT_MIN_F1,
    min_dtw_ratio: float = DEFAULT_MIN_DTW_RATIO,
    min_size: float | None = None,
) -> tuple[ClusterAssignment, list[Predicate]]:
    """Drop clusters a reader would not benefit from seeing.

    A cluster survives only if its explanation reaches ``min_f1``, its
    centroid's warped distance from the PDP (normalized by max |pdp|) reaches
    ``min_dtw_ratio``, and it holds at least ``min_size`` members (default
    max(20, 2% of N)). Dropped rows are left unassigned; all clusters may go.
    """
    n = assignment.labels.size
    if min_size is None:
        min_size = max(20.0, 0.02 * n)
    denom = float(np.max(np.abs(pdp)))
    sizes = assignment.sizes()

    keep: list[int] = []
    for c in range(assignment.k):
        metrics = predicates[c].metrics
        if metrics is None or metrics.f1 < min_f1:
            continue
        divergence = dtw(assignment.centroids[c], pdp)
        ratio = divergence / denom if denom > 0 else divergence
        if ratio < min_dtw_ratio:
            continue
        if sizes[c] < min_size:
            continue
        keep.append(c)

    relabel = np.full(assignment.k, UNASSIGNED, dtype=int)
    for new, old in enumerate(keep):
        relabel[old] = new
    labels = np.where(assignment.labels >= 0, relabel[assignment.labels], UNASSIGNED)
    centroids = (
        assignment.centroids[keep]
        if keep
        else np.empty((0, assignment.centroids.shape[1]))
    )
    return (
        ClusterAssignment(labels, len(keep), centroids),
        [predicates[c] for c in keep],
    )
