import json
import sys
import textwrap

import numpy as np
import pytest

from vine.dataset import synth_interaction
from vine.errors import (
    ChildExited,
    ProcessSpawnFailure,
    ProtocolViolation,
    ShapeMismatch,
    TooFewRowsWarning,
)
from vine.model import (
    ExternalOracle,
    FunctionOracle,
    GbmModel,
    predict,
    r_squared,
    train_gbm,
)

from conftest import make_dataset


def train_toy(n=400, seed=0, **params):
    rng = np.random.default_rng(seed)
    x = rng.random((n, 1))
    y = 3.0 * x[:, 0]
    ds = make_dataset(x, y)
    defaults = dict(n_trees=300, min_leaf=20, learning_rate=0.1, max_depth=3)
    defaults.update(params)
    return ds, train_gbm(ds, **defaults)


class TestTraining:
    def test_constant_target_predicts_it_exactly(self):
        ds = make_dataset(np.random.default_rng(0).random((50, 2)), np.full(50, 4.25))
        model = train_gbm(ds, n_trees=20, min_leaf=5)
        assert np.array_equal(model.predict(ds.X), np.full(50, 4.25))

    def test_linear_target_fits_tightly(self):
        rng = np.random.default_rng(1)
        x = rng.random((2000, 1))
        ds = make_dataset(x, 3.0 * x[:, 0])
        model = train_gbm(ds)  # paper-style defaults: 300 trees, min_leaf 100
        assert r_squared(ds.y, model.predict(ds.X)) >= 0.99

    def test_degenerates_to_constant_with_warning(self):
        ds = make_dataset(np.random.default_rng(2).random((30, 2)), np.arange(30.0))
        with pytest.warns(TooFewRowsWarning):
            model = train_gbm(ds, n_trees=10, min_leaf=15)
        assert model.trees == []
        assert np.allclose(model.predict(ds.X), ds.y.mean())

    def test_training_mse_non_increasing_in_trees(self):
        ds, model = train_toy(n=500, min_leaf=30)
        preds = np.full(ds.n, model.base_prediction)
        last = np.inf
        for tree in model.trees:
            preds = preds + model.learning_rate * tree.predict(ds.X)
            mse = float(((ds.y - preds) ** 2).mean())
            assert mse <= last + 1e-12
            last = mse

    def test_seed_stable_serialization(self):
        _, a = train_toy(seed=3)
        _, b = train_toy(seed=3)
        assert a.to_json() == b.to_json()

    def test_thresholds_are_midpoints_of_adjacent_values(self):
        ds = make_dataset(np.array([[0.0], [1.0], [4.0], [5.0]]), np.array([0.0, 0.0, 1.0, 1.0]))
        model = train_gbm(ds, n_trees=1, min_leaf=1, max_depth=1)
        tree = model.trees[0]
        assert tree.threshold[0] == 2.5  # midpoint of 1 and 4, the optimal gap

    def test_tie_break_prefers_lowest_feature_then_threshold(self):
        # identical columns: equal gain everywhere, so feature 0 must win
        x = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
        y = np.array([0.0, 0.0, 5.0, 5.0])
        model = train_gbm(make_dataset(x, y), n_trees=1, min_leaf=1, max_depth=1)
        assert model.trees[0].feature[0] == 0

    def test_min_leaf_respected(self):
        ds, model = train_toy(n=300, min_leaf=40)
        for tree in model.trees:
            counts = np.zeros(tree.value.size, dtype=int)
            leaf_of_row = np.array(
                [self_route(tree, row) for row in ds.X]
            )
            for leaf in leaf_of_row:
                counts[leaf] += 1
            for node in range(tree.feature.size):
                if tree.feature[node] < 0:
                    assert counts[node] >= 40


def self_route(tree, row):
    node = 0
    while tree.feature[node] >= 0:
        if row[tree.feature[node]] <= tree.threshold[node]:
            node = tree.left[node]
        else:
            node = tree.right[node]
    return node


class TestPrediction:
    def test_empty_batch(self):
        _, model = train_toy(n=100, min_leaf=10, n_trees=5)
        assert predict(model, np.empty((0, 1))).shape == (0,)

    def test_shape_mismatch(self):
        _, model = train_toy(n=100, min_leaf=10, n_trees=5)
        with pytest.raises(ShapeMismatch):
            model.predict(np.ones((3, 4)))

    def test_deterministic_on_training_rows(self):
        ds, model = train_toy(n=200, min_leaf=10, n_trees=20)
        assert np.array_equal(model.predict(ds.X), model.predict(ds.X))

    def test_packed_predict_matches_per_tree_sum(self):
        ds, model = train_toy(n=300, min_leaf=15, n_trees=40, seed=5)
        rng = np.random.default_rng(6)
        batch = rng.random((500, 1)) * 1.2 - 0.1
        manual = np.full(500, model.base_prediction)
        for tree in model.trees:
            manual += model.learning_rate * tree.predict(batch)
        assert np.allclose(model.predict(batch), manual, atol=1e-10)

    def test_sweep_equals_generic_substitution(self):
        ds = synth_interaction(300, 4)
        model = train_gbm(ds, n_trees=50, min_leaf=20)
        values = np.linspace(0, 1, 17)
        swept = model.predict_sweep(ds.X, 2, values)
        for j, v in enumerate(values):
            batch = ds.X.copy()
            batch[:, 2] = v
            assert np.allclose(swept[:, j], model.predict(batch), atol=1e-10)

    def test_serialization_round_trip(self):
        ds, model = train_toy(n=200, min_leaf=10, n_trees=15)
        clone = GbmModel.from_json(model.to_json())
        batch = np.random.default_rng(7).random((50, 1))
        assert np.array_equal(clone.predict(batch), model.predict(batch))
        assert json.loads(model.to_json())["trees"]  # documented layout is plain nodes

    def test_function_oracle_echoes(self):
        oracle = FunctionOracle(lambda X: X[:, 0], 2)
        out = predict(oracle, np.array([[5.0, 1.0], [7.0, 2.0]]))
        assert np.array_equal(out, [5.0, 7.0])


ECHO_SUM = textwrap.dedent(
    """
    import sys
    rows = []
    for line in sys.stdin:
        line = line.strip()
        if not line:
            for row in rows:
                print(sum(float(v) for v in row.split(",")))
            rows = []
            sys.stdout.flush()
        else:
            rows.append(line)
    """
)

ONE_LINE_THEN_EXIT = textwrap.dedent(
    """
    import sys
    for line in sys.stdin:
        if not line.strip():
            print(1.0)
            sys.stdout.flush()
            sys.exit(0)
    """
)

NON_NUMERIC = textwrap.dedent(
    """
    import sys
    for line in sys.stdin:
        if not line.strip():
            print("banana")
            print("banana")
            sys.stdout.flush()
    """
)


def script_oracle(tmp_path, body, feature_count=2, **kwargs):
    path = tmp_path / "child.py"
    path.write_text(body)
    return ExternalOracle(f"{sys.executable} {path}", feature_count, **kwargs)


class TestExternalOracle:
    def test_row_sums_round_trip(self, tmp_path):
        with script_oracle(tmp_path, ECHO_SUM) as oracle:
            out = oracle.predict(np.array([[1.0, 2.0], [3.0, 4.0]]))
            assert np.array_equal(out, [3.0, 7.0])
            # resident child answers repeat calls
            out2 = oracle.predict(np.array([[10.0, 0.5]]))
            assert np.array_equal(out2, [10.5])

    def test_short_response_is_protocol_violation(self, tmp_path):
        with script_oracle(tmp_path, ONE_LINE_THEN_EXIT) as oracle:
            with pytest.raises(ProtocolViolation):
                oracle.predict(np.array([[1.0, 2.0], [3.0, 4.0]]))

    def test_non_numeric_line_is_protocol_violation(self, tmp_path):
        with script_oracle(tmp_path, NON_NUMERIC) as oracle:
            with pytest.raises(ProtocolViolation):
                oracle.predict(np.array([[1.0, 2.0], [3.0, 4.0]]))

    def test_killed_child_raises_child_exited(self, tmp_path):
        with script_oracle(tmp_path, ECHO_SUM) as oracle:
            oracle.predict(np.array([[1.0, 1.0]]))
            oracle._proc.kill()
            oracle._proc.wait()
            with pytest.raises(ChildExited):
                oracle.predict(np.array([[1.0, 1.0]]))

    def test_unlaunchable_command(self):
        with pytest.raises(ProcessSpawnFailure):
            ExternalOracle("/nonexistent/binary-xyz", 2)


def test_matches_reference_library_on_diabetes(diabetes_csv):
    # same hyperparameters, independent implementation: training fit must agree
    from sklearn.ensemble import GradientBoostingRegressor

    from vine.dataset import load_csv

    ds = load_csv(diabetes_csv, "target")
    ours = train_gbm(ds, n_trees=300, min_leaf=100, learning_rate=0.1, max_depth=3)
    ours_r2 = r_squared(ds.y, ours.predict(ds.X))
    ref = GradientBoostingRegressor(
        n_estimators=300, min_samples_leaf=100, learning_rate=0.1, max_depth=3,
        random_state=0,
    ).fit(ds.X, ds.y)
    ref_r2 = ref.score(ds.X, ds.y)
    assert abs(ours_r2 - ref_r2) < 1e-3
