import math

import numpy as np
import pytest

from vine.dataset import ColumnSchema, FeatureKind
from vine.errors import DegenerateSplit
from vine.explain import (
    Direction,
    Predicate,
    evaluate_predicate,
    fit_stump,
    predicate_text,
)

from conftest import make_dataset


def brute_force_best_gain(X, members):
    """Plain-loop maximum information gain over all (feature, midpoint) pairs."""
    n = X.shape[0]
    z = np.zeros(n, dtype=bool)
    z[members] = True

    def entropy(pos, total):
        if total == 0:
            return 0.0
        p = pos / total
        h = 0.0
        for q in (p, 1 - p):
            if q > 0:
                h -= q * math.log2(q)
        return h

    h_parent = entropy(int(z.sum()), n)
    best = 0.0
    for j in range(X.shape[1]):
        vals = sorted(set(X[:, j]))
        for lo, hi in zip(vals, vals[1:]):
            t = (lo + hi) / 2.0
            left = X[:, j] <= t
            n_l = int(left.sum())
            gain = (
                h_parent
                - n_l / n * entropy(int(z[left].sum()), n_l)
                - (n - n_l) / n * entropy(int(z[~left].sum()), n - n_l)
            )
            best = max(best, gain)
    return best


class TestFitStump:
    def test_recovers_separable_membership(self):
        rng = np.random.default_rng(0)
        X = rng.random((200, 3)) * 10
        ds = make_dataset(X)
        members = np.flatnonzero(X[:, 1] > 5.0)
        pred = fit_stump(ds, members)
        assert pred.feature == 1
        assert pred.direction is Direction.GT
        assert abs(pred.value - 5.0) < 0.3
        assert pred.metrics.accuracy == 1.0
        assert pred.metrics.f1 == 1.0

    def test_random_half_membership_scores_poorly(self):
        rng = np.random.default_rng(1)
        bad = 0
        for trial in range(100):
            X = rng.normal(size=(120, 4))
            ds = make_dataset(X)
            members = rng.choice(120, 60, replace=False)
            try:
                f1 = fit_stump(ds, members).metrics.f1
            except DegenerateSplit:
                f1 = 0.0
            if f1 >= 0.75:
                bad += 1
        assert bad <= 5

    def test_all_or_no_rows_rejected(self):
        ds = make_dataset(np.random.default_rng(2).random((10, 2)))
        with pytest.raises(DegenerateSplit):
            fit_stump(ds, np.arange(10))
        with pytest.raises(DegenerateSplit):
            fit_stump(ds, np.array([], dtype=int))

    def test_gain_matches_brute_force_on_random_fixtures(self):
        rng = np.random.default_rng(3)
        for trial in range(20):
            n = int(rng.integers(10, 80))
            X = np.round(rng.normal(size=(n, 3)), 1)
            ds = make_dataset(X)
            members = rng.choice(n, max(1, int(rng.integers(1, n))), replace=False)
            expected = brute_force_best_gain(X, members)
            if expected <= 0:
                with pytest.raises(DegenerateSplit):
                    fit_stump(ds, members)
                continue
            pred = fit_stump(ds, members)
            achieved = _gain_of(ds.X, members, pred)
            assert abs(achieved - expected) <= 1e-12

    def test_self_feature_explanations_are_legal(self):
        rng = np.random.default_rng(4)
        X = rng.random((100, 2))
        ds = make_dataset(X)
        members = np.flatnonzero(X[:, 0] <= 0.3)
        pred = fit_stump(ds, members)
        assert pred.feature == 0
        assert pred.direction is Direction.LE

    def test_threshold_shifts_with_the_feature(self):
        rng = np.random.default_rng(5)
        X = rng.random((80, 2))
        members = np.flatnonzero(X[:, 0] > 0.6)
        base = fit_stump(make_dataset(X), members)
        shifted_X = X.copy()
        shifted_X[:, 0] += 100.0
        shifted = fit_stump(make_dataset(shifted_X), members)
        assert shifted.feature == base.feature
        assert shifted.direction == base.direction
        assert abs(shifted.value - (base.value + 100.0)) < 1e-9
        assert shifted.metrics == base.metrics

    def test_threshold_strictly_inside_range(self):
        rng = np.random.default_rng(6)
        for trial in range(10):
            X = rng.random((40, 2))
            ds = make_dataset(X)
            members = rng.choice(40, 15, replace=False)
            try:
                pred = fit_stump(ds, members)
            except DegenerateSplit:
                continue
            col = X[:, pred.feature]
            assert col.min() < pred.value < col.max()


def _gain_of(X, members, pred):
    n = X.shape[0]
    z = np.zeros(n, dtype=bool)
    z[members] = True

    def entropy(pos, total):
        if total == 0:
            return 0.0
        p = pos / total
        return -sum(q * math.log2(q) for q in (p, 1 - p) if q > 0)

    left = X[:, pred.feature] <= pred.value
    n_l = int(left.sum())
    return (
        entropy(int(z.sum()), n)
        - n_l / n * entropy(int(z[left].sum()), n_l)
        - (n - n_l) / n * entropy(int(z[~left].sum()), n - n_l)
    )


class TestEvaluatePredicate:
    def test_perfect_match(self):
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        ds = make_dataset(X)
        pred = Predicate(0, Direction.LE, 1.5)
        metrics = evaluate_predicate(ds, pred, np.array([0, 1]))
        assert (metrics.accuracy, metrics.precision, metrics.recall, metrics.f1) == (1, 1, 1, 1)

    def test_empty_matched_set_scores_zero(self):
        X = np.array([[1.0], [2.0], [3.0]])
        ds = make_dataset(X)
        pred = Predicate(0, Direction.LE, 0.0)  # matches nothing
        metrics = evaluate_predicate(ds, pred, np.array([0]))
        assert metrics.precision == 0.0
        assert metrics.recall == 0.0
        assert metrics.f1 == 0.0
        assert metrics.matched_size == 0

    def test_hand_computed_counts(self):
        # N=10, |A|=4, |B|=5, |A and B|=4 -> precision .8, recall 1, accuracy .9
        X = np.arange(10.0).reshape(-1, 1)
        ds = make_dataset(X)
        pred = Predicate(0, Direction.LE, 4.5)  # matches rows 0..4
        metrics = evaluate_predicate(ds, pred, np.array([0, 1, 2, 3]))
        assert metrics.precision == pytest.approx(0.8)
        assert metrics.recall == pytest.approx(1.0)
        assert metrics.accuracy == pytest.approx(0.9)
        assert metrics.cluster_size == 4
        assert metrics.matched_size == 5


def test_predicate_text_uses_display_name_and_4_digits():
    schema = [ColumnSchema("hr", FeatureKind.NUMERIC, display_name="Hour of Day")]
    pred = Predicate(0, Direction.LE, 3.14159)
    assert predicate_text(pred, schema) == "Hour of Day <= 3.142"
    pred_gt = Predicate(0, Direction.GT, 12345.678)
    assert predicate_text(pred_gt, schema) == "Hour of Day > 1.235e+04"
