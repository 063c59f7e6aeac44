"""A minimal random forest of CART regression trees.

Used as the flexible nuisance learner. Probability mode fits on 0/1
labels, so averaging leaf means over trees yields the class-1 fraction.

Determinism contract: the fit is a pure function of (features, targets,
params, seed) including the row order of the inputs; permuting rows
changes the bootstrap draws and therefore the fitted forest.
"""

from dataclasses import dataclass, field

import numpy as np

from satett import _accel
from satett.errors import InsufficientDataError
from satett.learners.logistic import clip_proba


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    oob: np.ndarray = field(repr=False, default=None)

    def predict(self, X):
        return _accel.tree_predict(
            self.feature, self.threshold, self.left, self.right, self.value, X
        )


@dataclass(frozen=True)
class ForestModel:
    trees: tuple
    mode: str
    n_trees: int
    max_depth: int
    min_leaf: int
    mtry: int
    seed: int

    def predict(self, features):
        X = np.atleast_2d(np.asarray(features, dtype=float))
        acc = np.zeros(X.shape[0])
        for tree in self.trees:
            acc += tree.predict(X)
        out = acc / len(self.trees)
        if self.mode == "probability":
            out = clip_proba(out)
        return out


def _build_tree(X, y, max_depth, min_leaf, mtry, rng):
    feature, threshold, left, right, value = [], [], [], [], []

    def add_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    def grow(rows, depth):
        node = add_node()
        yv = y[rows]
        value[node] = float(np.mean(yv))
        if depth >= max_depth or len(rows) < 2 * min_leaf or np.all(yv == yv[0]):
            return node
        p = X.shape[1]
        cand = rng.choice(p, size=min(mtry, p), replace=False)
        best = (np.inf, -1, -1, None)  # sse, feature, pos, order
        for f in cand:
            col = X[rows, f]
            order = np.argsort(col, kind="stable")
            pos, sse = _accel.scan_split(col[order], yv[order], min_leaf)
            if pos >= 0 and sse < best[0]:
                best = (sse, f, pos, order)
        if best[1] < 0:
            return node
        _, f, pos, order = best
        sorted_rows = rows[order]
        col_sorted = X[sorted_rows, f]
        feature[node] = int(f)
        threshold[node] = float(0.5 * (col_sorted[pos - 1] + col_sorted[pos]))
        left[node] = grow(sorted_rows[:pos], depth + 1)
        right[node] = grow(sorted_rows[pos:], depth + 1)
        return node

    grow(np.arange(X.shape[0]), 0)
    return (
        np.asarray(feature, dtype=np.int64),
        np.asarray(threshold, dtype=float),
        np.asarray(left, dtype=np.int64),
        np.asarray(right, dtype=np.int64),
        np.asarray(value, dtype=float),
    )


def fit_forest(
    features,
    targets,
    mode="regression",
    n_trees=200,
    max_depth=6,
    min_leaf=5,
    mtry=None,
    seed=0,
    bootstrap=True,
):
    """Fit a bootstrap ensemble of CART trees. Deterministic given seed.

    With bootstrap=False every tree sees the full sample (only the
    per-node feature subsampling varies across trees).
    """
    X = np.atleast_2d(np.asarray(features, dtype=float))
    y = np.asarray(targets, dtype=float)
    n, p = X.shape
    if n < 2 * min_leaf:
        raise InsufficientDataError(f"need at least {2 * min_leaf} rows, got {n}")
    if mtry is None:
        mtry = int(np.ceil(np.sqrt(p)))
    rng = np.random.Generator(np.random.Philox(key=seed))
    trees = []
    for _ in range(n_trees):
        if bootstrap:
            boot = rng.integers(0, n, size=n)
        else:
            boot = np.arange(n)
        oob = np.setdiff1d(np.arange(n), boot)
        f, t, l, r, v = _build_tree(X[boot], y[boot], max_depth, min_leaf, mtry, rng)
        trees.append(Tree(feature=f, threshold=t, left=l, right=r, value=v, oob=oob))
    return ForestModel(
        trees=tuple(trees),
        mode=mode,
        n_trees=n_trees,
        max_depth=max_depth,
        min_leaf=min_leaf,
        mtry=mtry,
        seed=seed,
    )
