"""Prediction oracles: the batch-prediction contract, an internal gradient
boosted regression tree trainer, and a line-protocol wrapper around an
external model process.

The engine never inspects a model's internals; everything downstream talks
to a :class:`ModelOracle` only.
"""

from __future__ import annotations

import json
import select
import shlex
import subprocess
import threading
import warnings
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

from .dataset import Dataset
from .errors import (
    ChildExited,
    ProcessSpawnFailure,
    ProtocolViolation,
    ShapeMismatch,
    TooFewRowsWarning,
)

DEFAULT_N_TREES = 300
DEFAULT_MIN_LEAF = 100
DEFAULT_LEARNING_RATE = 0.1
DEFAULT_MAX_DEPTH = 3


class ModelOracle(Protocol):
    """Opaque, deterministic batch predictor."""

    feature_count: int

    def predict(self, batch: np.ndarray) -> np.ndarray: ...


def predict(oracle: ModelOracle, batch: np.ndarray) -> np.ndarray:
    """Shape-checked oracle call; returns one prediction per batch row."""
    batch = np.asarray(batch, dtype=float)
    if batch.ndim != 2 or batch.shape[1] != oracle.feature_count:
        raise ShapeMismatch(
            f"batch shape {batch.shape} incompatible with {oracle.feature_count} features"
        )
    if batch.shape[0] == 0:
        return np.empty(0)
    out = np.asarray(oracle.predict(batch), dtype=float)
    if out.shape != (batch.shape[0],):
        raise ShapeMismatch(f"oracle returned {out.shape}, expected ({batch.shape[0]},)")
    return out


@dataclass(frozen=True)
class FunctionOracle:
    """Adapter turning any vectorized function of X into an oracle."""

    fn: Callable[[np.ndarray], np.ndarray]
    feature_count: int

    def predict(self, batch: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(batch, dtype=float)), dtype=float)


# --- gradient boosted regression trees --------------------------------------


@dataclass
class RegressionTree:
    """Flat-array binary tree. ``feature[i] < 0`` marks node i as a leaf.

    Routing: go left iff x[feature] <= threshold.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self._eval(0, X)

    def _eval(self, node: int, X: np.ndarray) -> np.ndarray:
        if self.feature[node] < 0:
            return np.full(X.shape[0], self.value[node])
        go_left = X[:, self.feature[node]] <= self.threshold[node]
        return np.where(go_left, self._eval(self.left[node], X), self._eval(self.right[node], X))

    def depth(self) -> int:
        def walk(node: int) -> int:
            if self.feature[node] < 0:
                return 0
            return 1 + max(walk(self.left[node]), walk(self.right[node]))

        return walk(0)

    def to_nodes(self) -> list[dict]:
        nodes = []
        for i in range(self.feature.size):
            if self.feature[i] < 0:
                nodes.append({"value": float(self.value[i])})
            else:
                nodes.append(
                    {
                        "feature": int(self.feature[i]),
                        "threshold": float(self.threshold[i]),
                        "left": int(self.left[i]),
                        "right": int(self.right[i]),
                    }
                )
        return nodes

    @classmethod
    def from_nodes(cls, nodes: list[dict]) -> "RegressionTree":
        n = len(nodes)
        feature = np.full(n, -1, dtype=np.intp)
        threshold = np.zeros(n)
        left = np.full(n, -1, dtype=np.intp)
        right = np.full(n, -1, dtype=np.intp)
        value = np.zeros(n)
        for i, node in enumerate(nodes):
            if "value" in node:
                value[i] = node["value"]
            else:
                feature[i] = node["feature"]
                threshold[i] = node["threshold"]
                left[i] = node["left"]
                right[i] = node["right"]
        return cls(feature, threshold, left, right, value)


class _TreeBuilder:
    """Greedy variance-reduction CART on a residual vector.

    Split quality is the reduction in sum of squared errors. Ties resolve to
    the lowest feature index, then the lowest threshold; thresholds sit at
    midpoints of adjacent distinct sorted values. Both leaves must keep at
    least ``min_leaf`` rows.
    """

    def __init__(self, X: np.ndarray, min_leaf: int, max_depth: int):
        self.X = X
        self.min_leaf = min_leaf
        self.max_depth = max_depth
        self.nodes: list[tuple] = []

    def build(self, rows: np.ndarray, residual: np.ndarray) -> RegressionTree:
        self.nodes = []
        self._grow(rows, residual, depth=0)
        feature = np.array([n[0] for n in self.nodes], dtype=np.intp)
        threshold = np.array([n[1] for n in self.nodes])
        left = np.array([n[2] for n in self.nodes], dtype=np.intp)
        right = np.array([n[3] for n in self.nodes], dtype=np.intp)
        value = np.array([n[4] for n in self.nodes])
        return RegressionTree(feature, threshold, left, right, value)

    def _grow(self, rows: np.ndarray, residual: np.ndarray, depth: int) -> int:
        node_id = len(self.nodes)
        self.nodes.append(None)
        y = residual[rows]
        split = None
        if depth < self.max_depth and rows.size >= 2 * self.min_leaf:
            split = self._best_split(rows, y)
        if split is None:
            self.nodes[node_id] = (-1, 0.0, -1, -1, float(y.mean()))
            return node_id
        j, t = split
        mask = self.X[rows, j] <= t
        left_id = self._grow(rows[mask], residual, depth + 1)
        right_id = self._grow(rows[~mask], residual, depth + 1)
        self.nodes[node_id] = (j, t, left_id, right_id, 0.0)
        return node_id

    def _best_split(self, rows: np.ndarray, y: np.ndarray) -> tuple[int, float] | None:
        n = rows.size
        total = y.sum()
        parent_score = total * total / n
        best_gain = 0.0
        best = None
        for j in range(self.X.shape[1]):
            x = self.X[rows, j]
            order = np.argsort(x, kind="stable")
            xs = x[order]
            cum = np.cumsum(y[order])
            # candidate split after position p (1-based left count)
            counts = np.arange(1, n)
            valid = (xs[:-1] < xs[1:]) & (counts >= self.min_leaf) & (n - counts >= self.min_leaf)
            if not valid.any():
                continue
            left_sum = cum[:-1]
            gain = (
                left_sum**2 / counts
                + (total - left_sum) ** 2 / (n - counts)
                - parent_score
            )
            gain[~valid] = -np.inf
            p = int(np.argmax(gain))
            if gain[p] > best_gain:
                best_gain = float(gain[p])
                best = (j, float((xs[p] + xs[p + 1]) / 2.0))
        return best


@dataclass
class GbmModel:
    """Least-squares boosted trees: base prediction plus shrunken tree sums."""

    trees: list[RegressionTree]
    learning_rate: float
    base_prediction: float
    feature_count: int
    n_trees: int
    min_leaf: int
    max_depth: int

    # padded all-trees arrays, built lazily for fast batch prediction
    _packed: tuple | None = field(default=None, init=False, repr=False, compare=False)

    def _pack(self) -> tuple:
        """Pad every tree to a perfect binary tree of the ensemble depth.

        A leaf that sits above the padded depth becomes a trivial router
        (always left) whose descendants all hold its value, so a fixed number
        of routing steps evaluates every tree at once.
        """
        depth = max((t.depth() for t in self.trees), default=0)
        n_internal = (1 << depth) - 1
        n_leaves = 1 << depth
        t_count = len(self.trees)
        feat = np.zeros((t_count, max(n_internal, 1)), dtype=np.int32)
        thr = np.full((t_count, max(n_internal, 1)), np.inf)
        val = np.zeros((t_count, n_leaves))

        for ti, tree in enumerate(self.trees):
            def fill(node: int, slot: int, level: int):
                if level == depth:
                    val[ti, slot - n_internal] = tree.value[node]
                    return
                if tree.feature[node] < 0:
                    # trivial router: x[0] <= inf is always true
                    fill(node, 2 * slot + 1, level + 1)
                    fill(node, 2 * slot + 2, level + 1)
                else:
                    feat[ti, slot] = tree.feature[node]
                    thr[ti, slot] = tree.threshold[node]
                    fill(tree.left[node], 2 * slot + 1, level + 1)
                    fill(tree.right[node], 2 * slot + 2, level + 1)

            fill(0, 0, 0)
        return depth, feat, thr, val

    def predict(self, batch: np.ndarray) -> np.ndarray:
        batch = np.asarray(batch, dtype=float)
        if batch.ndim != 2 or batch.shape[1] != self.feature_count:
            raise ShapeMismatch(
                f"batch shape {batch.shape} incompatible with {self.feature_count} features"
            )
        if not self.trees:
            return np.full(batch.shape[0], self.base_prediction)
        if self._packed is None:
            self._packed = self._pack()
        depth, feat, thr, val = self._packed
        n_internal = (1 << depth) - 1
        t_count = len(self.trees)
        t_cols = np.arange(t_count)[None, :]
        out = np.empty(batch.shape[0])
        chunk = max(1, (1 << 22) // max(t_count, 1))
        for start in range(0, batch.shape[0], chunk):
            rows = batch[start : start + chunk]
            idx = np.zeros((rows.shape[0], t_count), dtype=np.int32)
            row_ids = np.arange(rows.shape[0])[:, None]
            for _ in range(depth):
                go_right = rows[row_ids, feat[t_cols, idx]] > thr[t_cols, idx]
                idx = 2 * idx + 1 + go_right
            out[start : start + chunk] = val[t_cols, idx - n_internal].sum(axis=1)
        return self.base_prediction + self.learning_rate * out

    def _leaf_paths(self, tree: RegressionTree) -> list[tuple[list[tuple[int, float, bool]], float]]:
        """Every leaf as (path conditions, value); a condition is
        (feature, threshold, goes_left)."""
        paths = []

        def walk(node: int, conds: list[tuple[int, float, bool]]):
            if tree.feature[node] < 0:
                paths.append((conds, float(tree.value[node])))
                return
            f, t = int(tree.feature[node]), float(tree.threshold[node])
            walk(tree.left[node], conds + [(f, t, True)])
            walk(tree.right[node], conds + [(f, t, False)])

        walk(0, [])
        return paths

    def predict_sweep(self, X: np.ndarray, feature_index: int, values: np.ndarray) -> np.ndarray:
        """Predictions for every row with ``feature_index`` forced to each of
        ``values``; returns an (n_rows, n_values) matrix.

        Equivalent to predicting the tiled substitution batch, but each tree
        factors into per-row and per-value leaf conditions, which is far
        cheaper for shallow trees.
        """
        X = np.asarray(X, dtype=float)
        values = np.asarray(values, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.feature_count:
            raise ShapeMismatch(
                f"batch shape {X.shape} incompatible with {self.feature_count} features"
            )
        n, m = X.shape[0], values.size
        out = np.full((n, m), self.base_prediction)
        for tree in self.trees:
            paths = self._leaf_paths(tree)
            row_masks = np.empty((n, len(paths)))
            val_masks = np.empty((len(paths), m))
            for li, (conds, leaf_value) in enumerate(paths):
                rmask = np.ones(n, dtype=bool)
                vmask = np.ones(m, dtype=bool)
                for f, t, goes_left in conds:
                    if f == feature_index:
                        side = values <= t
                        vmask &= side if goes_left else ~side
                    else:
                        side = X[:, f] <= t
                        rmask &= side if goes_left else ~side
                row_masks[:, li] = rmask
                val_masks[li] = vmask * leaf_value
            out += self.learning_rate * (row_masks @ val_masks)
        return out

    def to_json_dict(self) -> dict:
        return {
            "base": self.base_prediction,
            "learning_rate": self.learning_rate,
            "feature_count": self.feature_count,
            "n_trees": self.n_trees,
            "min_leaf": self.min_leaf,
            "max_depth": self.max_depth,
            "trees": [t.to_nodes() for t in self.trees],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, doc: dict) -> "GbmModel":
        return cls(
            trees=[RegressionTree.from_nodes(nodes) for nodes in doc["trees"]],
            learning_rate=doc["learning_rate"],
            base_prediction=doc["base"],
            feature_count=doc["feature_count"],
            n_trees=doc["n_trees"],
            min_leaf=doc["min_leaf"],
            max_depth=doc["max_depth"],
        )

    @classmethod
    def from_json(cls, text: str) -> "GbmModel":
        return cls.from_json_dict(json.loads(text))


def train_gbm(
    ds: Dataset,
    *,
    n_trees: int = DEFAULT_N_TREES,
    min_leaf: int = DEFAULT_MIN_LEAF,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    max_depth: int = DEFAULT_MAX_DEPTH,
    seed: int = 0,
) -> GbmModel:
    """Fit boosted regression trees to the full dataset.

    Each round fits a depth-bounded CART tree to the current residuals and
    adds it with shrinkage ``learning_rate``. Training is deterministic; the
    ``seed`` argument is accepted for config uniformity but greedy fitting
    uses no randomness. When N <= 2*min_leaf no split is ever legal, so the
    model degenerates to the constant base prediction with a warning.
    """
    base = float(ds.y.mean())
    model = GbmModel(
        trees=[],
        learning_rate=learning_rate,
        base_prediction=base,
        feature_count=ds.k,
        n_trees=n_trees,
        min_leaf=min_leaf,
        max_depth=max_depth,
    )
    if ds.n <= 2 * min_leaf:
        warnings.warn(
            f"N={ds.n} <= 2*min_leaf={2 * min_leaf}; returning a constant model",
            TooFewRowsWarning,
        )
        return model
    builder = _TreeBuilder(ds.X, min_leaf, max_depth)
    rows = np.arange(ds.n)
    residual = ds.y - base
    for _ in range(n_trees):
        tree = builder.build(rows, residual)
        model.trees.append(tree)
        residual -= learning_rate * tree.predict(ds.X)
    return model


def r_squared(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Coefficient of determination against the mean baseline."""
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    ss_tot = float(((y_true - y_true.mean()) ** 2).sum())
    ss_res = float(((y_true - y_pred) ** 2).sum())
    if ss_tot == 0.0:
        return 1.0
    return 1.0 - ss_res / ss_tot


# --- external process oracle -------------------------------------------------


class ExternalOracle:
    """Oracle backed by a resident child process speaking a line protocol.

    Each predict call writes the batch as header-less CSV (one row per line,
    comma-separated decimal floats) followed by one empty line, then reads
    exactly one prediction per input row, one decimal float per line. The
    child stays alive across calls; calls are serialized on an internal lock.
    The child must buffer until the empty line arrives before answering; a
    child that streams answers mid-batch can fill the pipe and deadlock.
    """

    def __init__(self, command: str, feature_count: int, *, timeout: float | None = None):
        self.command = command
        self.feature_count = feature_count
        self.timeout = timeout
        self._lock = threading.Lock()
        try:
            self._proc = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise ProcessSpawnFailure(f"could not launch {command!r}: {exc}") from exc

    def predict(self, batch: np.ndarray) -> np.ndarray:
        batch = np.asarray(batch, dtype=float)
        with self._lock:
            if self._proc.poll() is not None:
                raise ChildExited(
                    f"oracle process exited with code {self._proc.returncode}"
                )
            try:
                for row in batch:
                    self._proc.stdin.write(",".join(repr(float(v)) for v in row) + "\n")
                self._proc.stdin.write("\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise ChildExited(f"oracle process pipe closed: {exc}") from exc
            out = np.empty(batch.shape[0])
            for i in range(batch.shape[0]):
                line = self._read_line()
                if line is None:
                    if i == 0:
                        raise ChildExited("oracle process closed its output stream")
                    raise ProtocolViolation(
                        f"expected {batch.shape[0]} prediction lines, got {i}"
                    )
                try:
                    out[i] = float(line)
                except ValueError:
                    raise ProtocolViolation(f"non-numeric prediction line: {line!r}") from None
            return out

    def _read_line(self) -> str | None:
        """One response line, or None at end of stream."""
        if self.timeout is not None:
            ready, _, _ = select.select([self._proc.stdout], [], [], self.timeout)
            if not ready:
                raise ProtocolViolation(
                    f"oracle did not answer within {self.timeout} s"
                )
        raw = self._proc.stdout.readline()
        if raw == "":
            return None
        return raw.strip()

    def close(self):
        if self._proc.poll() is None:
            self._proc.terminate()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
        for stream in (self._proc.stdin, self._proc.stdout):
            if stream is not None and not stream.closed:
                stream.close()

    def __enter__(self) -> "ExternalOracle":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
