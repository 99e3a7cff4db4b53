"""Per-feature prediction sweeps: ICE curves and their mean, the PDP.

For feature f and grid value v, every row gets column f overwritten with v
and is re-predicted; the dataset-mean prediction is subtracted so curves read
as a change against the average prediction. The PDP is the column mean of the
ICE matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dataset import Dataset, FeatureGrid
from .model import ModelOracle, predict

# One substituted batch is sent as a single (N * M') x K matrix unless it
# would exceed this many cells; then we fall back to one batch per grid value.
MAX_BATCH_CELLS = 20_000_000


@dataclass(frozen=True)
class CurveSet:
    """Centered ICE matrix and PDP for one feature.

    ``ice[i][j]`` is the prediction for row i with the feature forced to
    ``grid.values[j]``, minus ``mean_prediction``. ``raw=True`` marks a copy
    shifted back to the prediction scale.
    """

    feature_index: int
    grid: FeatureGrid
    ice: np.ndarray
    pdp: np.ndarray
    mean_prediction: float
    raw: bool = False

    def __post_init__(self):
        if self.ice.shape[1] != self.grid.size:
            raise ValueError("ice width must match grid size")
        if self.pdp.shape != (self.grid.size,):
            raise ValueError("pdp length must match grid size")
        if not np.allclose(self.pdp, self.ice.mean(axis=0), rtol=1e-9, atol=1e-12):
            raise ValueError("pdp must be the column means of ice")

    @property
    def n(self) -> int:
        return int(self.ice.shape[0])

    def as_raw(self) -> "CurveSet":
        """Same curves on the prediction scale (mean added back)."""
        if self.raw:
            return self
        return replace(
            self,
            ice=self.ice + self.mean_prediction,
            pdp=self.pdp + self.mean_prediction,
            raw=True,
        )


def mean_prediction_of(ds: Dataset, oracle: ModelOracle) -> float:
    """Mean oracle prediction over the unmodified dataset rows."""
    return float(predict(oracle, ds.X).mean())


def compute_ice(
    ds: Dataset,
    oracle: ModelOracle,
    feature_index: int,
    grid: FeatureGrid,
    *,
    mean_prediction: float | None = None,
) -> CurveSet:
    """Centered ICE matrix for one feature over its grid.

    Costs exactly N * M' oracle evaluations (plus N when ``mean_prediction``
    is not supplied). Columns other than ``feature_index`` pass through
    untouched.
    """
    if grid.feature_index != feature_index:
        raise ValueError("grid was built for a different feature")
    if mean_prediction is None:
        mean_prediction = mean_prediction_of(ds, oracle)
    n, k = ds.X.shape
    m = grid.size
    sweep = getattr(oracle, "predict_sweep", None)
    if sweep is not None:
        ice = np.asarray(sweep(ds.X, feature_index, grid.values), dtype=float) - mean_prediction
    elif n * m * k <= MAX_BATCH_CELLS:
        batch = np.tile(ds.X, (m, 1))
        batch[:, feature_index] = np.repeat(grid.values, n)
        preds = predict(oracle, batch).reshape(m, n)
        ice = preds.T - mean_prediction
    else:
        ice = np.empty((n, m))
        batch = ds.X.copy()
        for j, v in enumerate(grid.values):
            batch[:, feature_index] = v
            ice[:, j] = predict(oracle, batch) - mean_prediction
    return CurveSet(
        feature_index=feature_index,
        grid=grid,
        ice=ice,
        pdp=ice.mean(axis=0),
        mean_prediction=mean_prediction,
    )


def pdp_of(curves: CurveSet) -> np.ndarray:
    """The feature's PDP: the column means of its ICE matrix."""
    return curves.pdp
