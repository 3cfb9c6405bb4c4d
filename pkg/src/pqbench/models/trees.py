"""Gini CART and bootstrap random forest."""
import numpy as np

from .._rng import derive_seed
from ._grow import apply_tree, grow_classifier, presort
from .spec import resolve_max_features

_FOREST_STREAM = 0xF0_4E57


def _fit_tree(X, codes, n_classes, max_depth, min_split, max_features, seed):
    feature, threshold, left, right, counts = grow_classifier(
        X, codes, n_classes, presort(X), -1 if max_depth is None else int(max_depth),
        int(min_split), int(max_features), np.uint64(seed))
    return {"feature": feature, "threshold": threshold, "left": left, "right": right,
            "counts": counts}


def _encode(y):
    classes = np.unique(y)
    return classes, np.searchsorted(classes, y).astype(np.int64)


def train_cart(X, y, hp: dict, seed: int = 0) -> dict:
    classes, codes = _encode(y)
    tree = _fit_tree(np.ascontiguousarray(X), codes, len(classes), hp["max_depth"],
                     hp["min_samples_split"], X.shape[1], 0)
    return {"classes": classes.tolist(), "trees": [tree]}


def train_forest(X, y, hp: dict, seed: int = 0) -> dict:
    classes, codes = _encode(y)
    n, d = X.shape
    k = resolve_max_features(hp["max_features"], d)
    trees = []
    for t in range(int(hp["n_trees"])):
        tree_seed = derive_seed(_FOREST_STREAM, seed, t)
        if hp["bootstrap"]:
            rng = np.random.default_rng(tree_seed)
            rows = np.sort(rng.integers(0, n, size=n))
        else:
            rows = np.arange(n)
        trees.append(_fit_tree(np.ascontiguousarray(X[rows]), codes[rows], len(classes),
                               hp["max_depth"], hp["min_samples_split"], k, tree_seed))
    return {"classes": classes.tolist(), "trees": trees}


def tree_proba(params: dict, X) -> np.ndarray:
    """Mean leaf class distribution over the ensemble."""
    X = np.ascontiguousarray(X, dtype=float)
    total = np.zeros((X.shape[0], len(params["classes"])))
    for tree in params["trees"]:
        leaf = apply_tree(X, tree["feature"], tree["threshold"], tree["left"], tree["right"])
        counts = tree["counts"][leaf].astype(float)
        total += counts / counts.sum(axis=1, keepdims=True)
    return total / len(params["trees"])


def predict_trees(params: dict, X) -> np.ndarray:
    return np.asarray(params["classes"])[np.argmax(tree_proba(params, X), axis=1)]
