import numpy as np
import pytest

from vine.dataset import ColumnSchema, Dataset, FeatureKind
from vine.model import FunctionOracle


def make_dataset(X, y=None, kinds=None, name="fixture") -> Dataset:
    """Dataset from a raw matrix; kinds default to numeric."""
    X = np.asarray(X, dtype=float)
    n, k = X.shape
    if y is None:
        y = np.zeros(n)
    if kinds is None:
        kinds = [FeatureKind.NUMERIC] * k
    schema = tuple(ColumnSchema(f"f{j}", kind) for j, kind in enumerate(kinds))
    return Dataset(schema, X, np.asarray(y, dtype=float), name=name)


@pytest.fixture
def interaction_oracle():
    return FunctionOracle(lambda X: X[:, 0] + 2 * X[:, 1] + 5 * X[:, 2] * X[:, 3], 4)


@pytest.fixture(scope="session")
def synth_csv(tmp_path_factory):
    """CSV of the synthetic interaction dataset, for CLI-level tests."""
    import csv

    from vine.dataset import synth_interaction

    ds = synth_interaction(300, 5)
    path = tmp_path_factory.mktemp("data") / "synth.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([c.name for c in ds.schema] + ["y"])
        for i in range(ds.n):
            writer.writerow([repr(float(v)) for v in ds.X[i]] + [repr(float(ds.y[i]))])
    return path


@pytest.fixture(scope="session")
def diabetes_csv(tmp_path_factory):
    """The 442x10 diabetes regression table written out as a CSV."""
    import csv

    from sklearn.datasets import load_diabetes

    data = load_diabetes(scaled=False)
    path = tmp_path_factory.mktemp("data") / "diabetes.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(data.feature_names) + ["target"])
        for row, target in zip(data.data, data.target):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(target))])
    return path
