"""Multiclass second-order gradient boosting with softmax cross-entropy."""
import numpy as np

from ._grow import apply_tree, grow_regressor, presort


def softmax(scores: np.ndarray) -> np.ndarray:
    z = scores - scores.max(axis=1, keepdims=True)
    ez = np.exp(z)
    return ez / ez.sum(axis=1, keepdims=True)


def softmax_loss(scores: np.ndarray, onehot: np.ndarray) -> float:
    """Summed cross-entropy of row-wise softmax."""
    z = scores - scores.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    return float(-(onehot * logp).sum())


def grad_hess(scores: np.ndarray, onehot: np.ndarray):
    """Per-sample, per-class gradient p - y and diagonal hessian p(1 - p)."""
    p = softmax(scores)
    return p - onehot, p * (1.0 - p)


def train_gbt(X, y, hp: dict, seed: int = 0) -> dict:
    X = np.ascontiguousarray(X, dtype=float)
    classes = np.unique(y)
    K = len(classes)
    onehot = (y[:, None] == classes[None, :]).astype(float)
    order = presort(X)
    scores = np.zeros((len(y), K))
    eta = float(hp["eta"])
    rounds = []
    for _ in range(int(hp["rounds"])):
        g, h = grad_hess(scores, onehot)
        trees = []
        for k in range(K):
            feature, threshold, left, right, value = grow_regressor(
                X, np.ascontiguousarray(g[:, k]), np.ascontiguousarray(h[:, k]), order,
                int(hp["max_depth"]), float(hp["reg_lambda"]), float(hp["reg_gamma"]),
                float(hp["min_child_weight"]))
            tree = {"feature": feature, "threshold": threshold, "left": left, "right": right,
                    "value": value}
            trees.append(tree)
        for k, tree in enumerate(trees):
            leaf = apply_tree(X, tree["feature"], tree["threshold"], tree["left"], tree["right"])
            scores[:, k] += eta * tree["value"][leaf]
        rounds.append(trees)
    return {"classes": classes.tolist(), "eta": eta, "rounds": rounds}


def gbt_scores(params: dict, X) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=float)
    scores = np.zeros((X.shape[0], len(params["classes"])))
    for trees in params["rounds"]:
        for k, tree in enumerate(trees):
            leaf = apply_tree(X, tree["feature"], tree["threshold"], tree["left"], tree["right"])
            scores[:, k] += params["eta"] * tree["value"][leaf]
    return scores


def predict_gbt(params: dict, X) -> np.ndarray:
    return np.asarray(params["classes"])[np.argmax(gbt_scores(params, X), axis=1)]
