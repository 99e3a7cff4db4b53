import numpy as np
import pytest

from vine.dataset import FeatureGrid, quantile_grid
from vine.model import FunctionOracle
from vine.pdcurves import CurveSet, compute_ice, mean_prediction_of, pdp_of

from conftest import make_dataset


class CountingOracle:
    """FunctionOracle that counts predicted rows (no sweep fast path)."""

    def __init__(self, fn, feature_count):
        self.fn = fn
        self.feature_count = feature_count
        self.rows_predicted = 0

    def predict(self, batch):
        self.rows_predicted += batch.shape[0]
        return self.fn(batch)


def test_constant_oracle_centers_to_zero():
    ds = make_dataset(np.random.default_rng(0).random((20, 2)))
    oracle = FunctionOracle(lambda X: np.full(X.shape[0], 6.5), 2)
    grid = quantile_grid(ds, 0, 5)
    curves = compute_ice(ds, oracle, 0, grid)
    assert curves.mean_prediction == 6.5
    assert np.allclose(curves.ice, 0.0)
    assert np.allclose(curves.pdp, 0.0)


def test_single_feature_linear_oracle_matches_hand_computation():
    ds = make_dataset(np.array([[1.0], [2.0], [3.0]]))
    oracle = FunctionOracle(lambda X: 2.0 * X[:, 0], 1)
    grid = quantile_grid(ds, 0, 3)
    curves = compute_ice(ds, oracle, 0, grid)
    assert curves.mean_prediction == 4.0
    assert np.array_equal(curves.pdp, [-2.0, 0.0, 2.0])
    for row in curves.ice:
        assert np.array_equal(row, curves.pdp)


def test_interaction_oracle_splits_into_flat_and_sloped_families():
    # pred = x1 * x2 with x2 half zeros, half ones; sweep x1 over [0, 1]
    x2 = np.array([0.0, 0.0, 1.0, 1.0])
    ds = make_dataset(np.column_stack([np.full(4, 0.5), x2]))
    oracle = FunctionOracle(lambda X: X[:, 0] * X[:, 1], 2)
    grid = FeatureGrid(0, np.array([0.0, 1.0]), 0.0, 1.0)
    curves = compute_ice(ds, oracle, 0, grid)
    slopes = (curves.ice[:, 1] - curves.ice[:, 0])
    assert np.allclose(slopes[x2 == 0], 0.0)
    assert np.allclose(slopes[x2 == 1], 1.0)


def test_row_permutation_permutes_ice_rows():
    rng = np.random.default_rng(1)
    X = rng.random((15, 3))
    oracle = FunctionOracle(lambda X: X[:, 0] ** 2 + X[:, 1] * X[:, 2], 3)
    perm = rng.permutation(15)
    ds = make_dataset(X)
    ds_perm = make_dataset(X[perm])
    grid = quantile_grid(ds, 0, 6)
    a = compute_ice(ds, oracle, 0, grid)
    b = compute_ice(ds_perm, oracle, 0, FeatureGrid(0, grid.values, grid.f_min, grid.f_max))
    assert np.allclose(a.ice[perm], b.ice, atol=1e-12)
    assert np.allclose(a.pdp, b.pdp, atol=1e-12)


def test_additive_model_collapse():
    rng = np.random.default_rng(2)
    X = rng.random((30, 3))
    oracle = FunctionOracle(lambda X: 3 * X[:, 0] - 2 * X[:, 1] + 0.5 * X[:, 2] ** 2, 3)
    ds = make_dataset(X)
    for f in range(3):
        curves = compute_ice(ds, oracle, f, quantile_grid(ds, f, 8))
        # every row equals the pdp up to a per-row vertical constant
        offsets = curves.ice - curves.pdp
        assert np.allclose(offsets, offsets[:, :1], atol=1e-9)
        centered_rows = curves.ice - curves.ice.mean(axis=1, keepdims=True)
        centered_pdp = curves.pdp - curves.pdp.mean()
        assert np.allclose(centered_rows, centered_pdp, atol=1e-9)


def test_oracle_evaluation_cost_bound():
    ds = make_dataset(np.random.default_rng(3).random((25, 2)))
    oracle = CountingOracle(lambda X: X[:, 0] + X[:, 1], 2)
    m = mean_prediction_of(ds, oracle)
    assert oracle.rows_predicted == 25
    grid = quantile_grid(ds, 0, 9)
    compute_ice(ds, oracle, 0, grid, mean_prediction=m)
    assert oracle.rows_predicted == 25 + 25 * grid.size


def test_pdp_of_is_column_means():
    ds = make_dataset(np.random.default_rng(4).random((12, 2)))
    oracle = FunctionOracle(lambda X: np.sin(X[:, 0]) + X[:, 1], 2)
    curves = compute_ice(ds, oracle, 0, quantile_grid(ds, 0, 7))
    assert np.allclose(pdp_of(curves), curves.ice.mean(axis=0), rtol=1e-9)


def test_single_row_curveset_pdp_equals_its_ice_row():
    grid = FeatureGrid(0, np.array([0.0, 1.0, 2.0]), 0.0, 2.0)
    ice = np.array([[0.5, -0.25, 1.0]])
    curves = CurveSet(0, grid, ice, ice[0].copy(), mean_prediction=3.0)
    assert np.array_equal(pdp_of(curves), ice[0])


def test_as_raw_shifts_back():
    ds = make_dataset(np.array([[1.0], [2.0], [3.0]]))
    oracle = FunctionOracle(lambda X: 2.0 * X[:, 0], 1)
    curves = compute_ice(ds, oracle, 0, quantile_grid(ds, 0, 3))
    raw = curves.as_raw()
    assert raw.raw and not curves.raw
    assert np.allclose(raw.pdp, curves.pdp + 4.0)
    assert raw.as_raw() is raw


def test_pdp_invariant_validated():
    grid = FeatureGrid(0, np.array([0.0, 1.0]), 0.0, 1.0)
    with pytest.raises(ValueError):
        CurveSet(0, grid, np.zeros((3, 2)), np.array([1.0, 0.0]), mean_prediction=0.0)


def test_grid_feature_mismatch_rejected():
    ds = make_dataset(np.random.default_rng(5).random((10, 2)))
    oracle = FunctionOracle(lambda X: X[:, 0], 2)
    grid = quantile_grid(ds, 1, 5)
    with pytest.raises(ValueError):
        compute_ice(ds, oracle, 0, grid)


def test_memory_capped_fallback_matches_single_batch(monkeypatch):
    import vine.pdcurves as pdcurves

    ds = make_dataset(np.random.default_rng(6).random((30, 3)))
    oracle = FunctionOracle(lambda X: X[:, 0] * X[:, 1] + X[:, 2] ** 2, 3)
    grid = quantile_grid(ds, 1, 8)
    full = compute_ice(ds, oracle, 1, grid)
    monkeypatch.setattr(pdcurves, "MAX_BATCH_CELLS", 10)  # force per-value batches
    capped = compute_ice(ds, oracle, 1, grid)
    assert np.allclose(full.ice, capped.ice, atol=1e-12)
    assert np.allclose(full.pdp, capped.pdp, atol=1e-12)
