"""Random forest classifier for contact detection, built from scratch.

Reference defaults: 500 trees, Gini impurity, bootstrap resamples of the
training-set size, a random subset of features tried at every split, trees
grown to purity (or until a node cannot be split), prediction by majority
vote across trees.  Per-tree seeds derive from the master seed, so training
is bit-reproducible and predictions are invariant to tree order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .data import SampleSet

__all__ = [
    "DecisionTree",
    "ForestModel",
    "ConfusionStats",
    "DegenerateModelError",
    "train_forest",
    "tune_mtry",
    "predict",
    "oob_error",
    "evaluate",
    "save_model",
    "load_model",
]

MODEL_FORMAT = "cutsim-forest-v1"


class DegenerateModelError(ValueError):
    """Training data with a single class cannot produce a classifier."""


@dataclass
class DecisionTree:
    """Array-encoded binary tree.

    Node i splits on `feature[i]` at `threshold[i]` (go left when
    value <= threshold); leaves have feature == -1.  `counts[i]` holds the
    class counts of the training samples that reached the node.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray

    def predict_class(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int32)
        while True:
            active = np.nonzero(self.feature[node] >= 0)[0]
            if active.size == 0:
                break
            cur = node[active]
            go_left = X[active, self.feature[cur]] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
        leaf_counts = self.counts[node]
        return np.argmax(leaf_counts, axis=1).astype(np.uint8)


@dataclass
class ForestModel:
    trees: list[DecisionTree]
    n_trees: int
    mtry: int
    seed: int
    classes: tuple[int, ...] = (0, 1)
    bootstrap_indices: list[np.ndarray] | None = None  # kept for OOB, not serialized


def _grow_tree(X: np.ndarray, y: np.ndarray, mtry: int, rng, min_node: int = 1) -> DecisionTree:
    n_features = X.shape[1]
    feature, threshold, left, right, counts = [], [], [], [], []
    stack = [(np.arange(len(y)), None, None)]  # (indices, parent_node, is_left)

    def new_node(idx):
        node_id = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        c1 = int(y[idx].sum())
        counts.append((len(idx) - c1, c1))
        return node_id

    while stack:
        idx, parent, is_left = stack.pop()
        node_id = new_node(idx)
        if parent is not None:
            if is_left:
                left[parent] = node_id
            else:
                right[parent] = node_id
        n = len(idx)
        c1 = counts[node_id][1]
        if c1 == 0 or c1 == n or n <= min_node:
            continue
        yv = y[idx].astype(np.float64)
        total1 = float(c1)
        total0 = float(n - c1)
        best_gain = 0.0
        best_feat = -1
        best_thr = 0.0
        parent_impurity = n - (total0 * total0 + total1 * total1) / n
        for f in rng.choice(n_features, size=min(mtry, n_features), replace=False):
            v = X[idx, f]
            order = np.argsort(v, kind="stable")
            vs = v[order]
            valid = vs[:-1] < vs[1:]
            if not valid.any():
                continue
            ones_left = np.cumsum(yv[order])[:-1]
            n_left = np.arange(1, n, dtype=np.float64)
            n_right = n - n_left
            zeros_left = n_left - ones_left
            ones_right = total1 - ones_left
            zeros_right = total0 - zeros_left
            weighted = (
                n_left
                - (zeros_left * zeros_left + ones_left * ones_left) / n_left
                + n_right
                - (zeros_right * zeros_right + ones_right * ones_right) / n_right
            )
            weighted[~valid] = np.inf
            pos = int(np.argmin(weighted))
            gain = parent_impurity - float(weighted[pos])
            if gain > best_gain + 1e-12:
                best_gain = gain
                best_feat = int(f)
                best_thr = 0.5 * (float(vs[pos]) + float(vs[pos + 1]))
        if best_feat < 0:
            continue  # tried features all constant: impure leaf
        feature[node_id] = best_feat
        threshold[node_id] = best_thr
        go_left = X[idx, best_feat] <= best_thr
        stack.append((idx[~go_left], node_id, False))
        stack.append((idx[go_left], node_id, True))

    return DecisionTree(
        np.array(feature, np.int32),
        np.array(threshold, np.float64),
        np.array(left, np.int32),
        np.array(right, np.int32),
        np.array(counts, np.int64),
    )


def train_forest(
    train: SampleSet,
    n_trees: int = 500,
    mtry: int = 4,
    seed: int = 0,
    keep_bootstrap: bool = True,
) -> ForestModel:
    """Grow a bootstrap forest; deterministic for a fixed seed.

    Each tree sees a bootstrap resample of the training set (same size) and
    tries `mtry` random features at every split.  Raises DegenerateModelError
    when the training labels contain a single class.
    """
    X, y = np.asarray(train.X, np.float64), np.asarray(train.y, np.uint8)
    if len(np.unique(y)) < 2:
        raise DegenerateModelError("training data has a single class")
    if not 1 <= mtry <= X.shape[1]:
        raise ValueError(f"mtry must be in [1, {X.shape[1]}], got {mtry}")
    n = len(y)
    trees = []
    boots = [] if keep_bootstrap else None
    for child_seed in np.random.SeedSequence(seed).spawn(n_trees):
        rng = np.random.default_rng(child_seed)
        boot = rng.integers(0, n, size=n)
        trees.append(_grow_tree(X[boot], y[boot], mtry, rng))
        if keep_bootstrap:
            boots.append(boot)
    return ForestModel(trees, n_trees, mtry, seed, bootstrap_indices=boots)


def _vote(model: ForestModel, X: np.ndarray) -> np.ndarray:
    votes = np.zeros((len(X), len(model.classes)), np.int32)
    for tree in model.trees:
        pred = tree.predict_class(X)
        for c in range(len(model.classes)):
            votes[:, c] += pred == c
    return votes


def predict(model: ForestModel, X: np.ndarray) -> np.ndarray:
    """Majority vote across trees (ties go to the lower class label)."""
    return np.argmax(_vote(model, np.asarray(X, np.float64)), axis=1).astype(np.uint8)


def oob_error(model: ForestModel, train: SampleSet) -> float:
    """Out-of-bag error: each sample voted on only by trees that never saw it."""
    if model.bootstrap_indices is None:
        raise ValueError("model was trained without keep_bootstrap")
    X = np.asarray(train.X, np.float64)
    y = np.asarray(train.y, np.uint8)
    n = len(y)
    votes = np.zeros((n, len(model.classes)), np.int32)
    for tree, boot in zip(model.trees, model.bootstrap_indices):
        in_bag = np.zeros(n, bool)
        in_bag[boot] = True
        oob = np.nonzero(~in_bag)[0]
        if oob.size == 0:
            continue
        pred = tree.predict_class(X[oob])
        for c in range(len(model.classes)):
            votes[oob, c] += pred == c
    voted = votes.sum(axis=1) > 0
    if not voted.any():
        raise ValueError("no out-of-bag samples; too few trees")
    pred = np.argmax(votes[voted], axis=1)
    return float((pred != y[voted]).mean())


def tune_mtry(train: SampleSet, candidates=range(2, 9), seed: int = 0, probe_trees: int = 100) -> int:
    """Pick the features-per-split count minimizing OOB error of a probe forest.

    Ties resolve toward the smaller candidate.
    """
    best_mtry, best_err = None, np.inf
    for m in sorted(candidates):
        model = train_forest(train, n_trees=probe_trees, mtry=m, seed=seed)
        err = oob_error(model, train)
        if err < best_err - 1e-15:
            best_err = err
            best_mtry = m
    return best_mtry


@dataclass(frozen=True)
class ConfusionStats:
    """Confusion cells and the error rate (FP + FN) / total."""

    true_positives: int
    false_positives: int
    true_negatives: int
    false_negatives: int

    @property
    def total(self) -> int:
        return (
            self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
        )

    @property
    def error_rate(self) -> float:
        return (self.false_positives + self.false_negatives) / self.total

    def __add__(self, other: "ConfusionStats") -> "ConfusionStats":
        return ConfusionStats(
            self.true_positives + other.true_positives,
            self.false_positives + other.false_positives,
            self.true_negatives + other.true_negatives,
            self.false_negatives + other.false_negatives,
        )


def evaluate(model: ForestModel, test: SampleSet) -> ConfusionStats:
    """Majority-vote predictions on held-out data, summarized as a confusion table."""
    if len(test) == 0:
        raise ValueError("empty test set")
    pred = predict(model, test.X)
    y = np.asarray(test.y, np.uint8)
    return ConfusionStats(
        true_positives=int(((pred == 1) & (y == 1)).sum()),
        false_positives=int(((pred == 1) & (y == 0)).sum()),
        true_negatives=int(((pred == 0) & (y == 0)).sum()),
        false_negatives=int(((pred == 0) & (y == 1)).sum()),
    )


# --- serialization -----------------------------------------------------------

def save_model(model: ForestModel, path):
    doc = {
        "format": MODEL_FORMAT,
        "seed": model.seed,
        "n_trees": model.n_trees,
        "mtry": model.mtry,
        "classes": list(model.classes),
        "trees": [
            {
                "feature": t.feature.tolist(),
                "threshold": t.threshold.tolist(),
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "counts": t.counts.tolist(),
            }
            for t in model.trees
        ],
    }
    with open(path, "w") as f:
        json.dump(doc, f)


def load_model(path) -> ForestModel:
    with open(path) as f:
        doc = json.load(f)
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"unsupported model format {doc.get('format')!r}")
    trees = [
        DecisionTree(
            np.array(t["feature"], np.int32),
            np.array(t["threshold"], np.float64),
            np.array(t["left"], np.int32),
            np.array(t["right"], np.int32),
            np.array(t["counts"], np.int64),
        )
        for t in doc["trees"]
    ]
    return ForestModel(trees, doc["n_trees"], doc["mtry"], doc["seed"], tuple(doc["classes"]))
