import numpy as np
from numba import njit


@njit(cache=True)
def _sq_distances(A, B):
    out = np.empty((A.shape[0], B.shape[0]))
    for i in range(A.shape[0]):
        for j in range(B.shape[0]):
            s = 0.0
            for f in range(A.shape[1]):
                t = A[i, f] - B[j, f]
                s += t * t
            out[i, j] = s
    return out


def train_knn(X, y, hp: dict, seed: int = 0) -> dict:
    return {"k": int(hp["k"]), "X": np.array(X, dtype=float), "y": np.asarray(y, dtype=np.int64),
            "classes": np.unique(y).tolist()}


def predict_knn(params: dict, X) -> np.ndarray:
    """Majority vote of the k nearest training points; distance ties go to the
    lower training index, vote ties to the lower class code."""
    Xt = np.ascontiguousarray(params["X"], dtype=float)
    yt = np.asarray(params["y"])
    classes = np.asarray(params["classes"])
    k = min(params["k"], len(yt))
    d = _sq_distances(np.ascontiguousarray(X, dtype=float), Xt)
    nearest = np.argsort(d, axis=1, kind="stable")[:, :k]
    labels = np.searchsorted(classes, yt[nearest])
    votes = np.zeros((len(X), len(classes)), dtype=np.int64)
    np.add.at(votes, (np.arange(len(X))[:, None], labels), 1)
    return classes[np.argmax(votes, axis=1)]
