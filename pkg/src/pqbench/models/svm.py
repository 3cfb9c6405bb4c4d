"""Kernel SVMs trained by SMO, combined one-vs-one."""
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .spec import ModelKind

KERNELS = ("linear", "cubic", "rbf")
KERNEL_OF = {ModelKind.LINEAR_SVM: "linear", ModelKind.CUBIC_SVM: "cubic",
             ModelKind.RBF_SVM: "rbf"}
_TAU = 1e-12


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, worst_violation: float):
        super().__init__(f"{message} (worst KKT violation {worst_violation:.3g})")
        self.worst_violation = worst_violation


def kernel(kind: str, x, z, gamma: float = None) -> float:
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if x.shape != z.shape:
        raise ValueError(f"kernel arguments differ in dimension: {x.shape} vs {z.shape}")
    if gamma is None:
        gamma = 1.0 / max(x.size, 1)
    if kind == "linear":
        return float(np.dot(x, z))
    if kind == "cubic":
        return float((gamma * np.dot(x, z) + 1.0) ** 3)
    if kind == "rbf":
        diff = x - z
        return float(np.exp(-gamma * np.dot(diff, diff)))
    raise ValueError(f"unknown kernel {kind!r}")


def kernel_matrix(kind: str, X, Z, gamma: float) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    Z = np.asarray(Z, dtype=float)
    if X.shape[1] != Z.shape[1]:
        raise ValueError(f"kernel arguments differ in dimension: {X.shape[1]} vs {Z.shape[1]}")
    dot = X @ Z.T
    if kind == "linear":
        return dot
    if kind == "cubic":
        return (gamma * dot + 1.0) ** 3
    if kind == "rbf":
        sq = (X * X).sum(1)[:, None] + (Z * Z).sum(1)[None, :] - 2.0 * dot
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise ValueError(f"unknown kernel {kind!r}")


@dataclass
class SMOResult:
    alpha: np.ndarray
    b: float
    iterations: int
    dual_history: list = field(default_factory=list)
    kkt_violation: float = 0.0


def dual_objective(K, y, alpha) -> float:
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


def kkt_violation(K, y, alpha, b: float, C: float) -> float:
    """Largest violation of the box-constrained KKT conditions in terms of y*f(x)."""
    yf = y * (K @ (alpha * y) + b)
    at_zero = alpha <= 0.0
    at_c = alpha >= C
    free = ~at_zero & ~at_c
    worst = 0.0
    if at_zero.any():
        worst = max(worst, float(np.max(1.0 - yf[at_zero])))
    if at_c.any():
        worst = max(worst, float(np.max(yf[at_c] - 1.0)))
    if free.any():
        worst = max(worst, float(np.max(np.abs(yf[free] - 1.0))))
    return worst


def _bias(y, G, alpha, C) -> float:
    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = yG[free].mean()
    else:
        at_c = alpha >= C
        upper = (at_c & (y < 0)) | (~at_c & (y > 0))
        lower = ~upper
        ub = yG[upper].min() if upper.any() else np.inf
        lb = yG[lower].max() if lower.any() else -np.inf
        if np.isfinite(ub) and np.isfinite(lb):
            rho = 0.5 * (ub + lb)
        else:
            rho = ub if np.isfinite(ub) else lb
    return float(-rho)


def smo_binary(K, y, C: float = 1.0, tol: float = 1e-3, max_sweeps: int = 10_000) -> SMOResult:
    """Solve the SVM dual by SMO with second-order working-set selection.

    Iterates until every training point satisfies its KKT condition within
    ``tol`` (y*f >= 1-tol at alpha=0, |y*f - 1| <= tol when free,
    y*f <= 1+tol at alpha=C). ``dual_history`` holds the dual objective after
    each sweep of n pair updates.
    """
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if K.shape != (n, n):
        raise ValueError(f"kernel matrix shape {K.shape} does not match {n} labels")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if not C > 0 or not tol > 0:
        raise ValueError("C and tol must be positive")
    Q = (y[:, None] * y[None, :]) * K
    diag = np.diag(K).copy()
    alpha = np.zeros(n)
    G = -np.ones(n)
    eps = tol
    max_iter = max_sweeps * max(n, 1)
    history = [0.0]
    pos = y > 0
    neg = ~pos
    it = 0
    while True:
        if it >= max_iter:
            b = _bias(y, G, alpha, C)
            raise ConvergenceError(f"SMO did not converge in {max_sweeps} sweeps",
                                   kkt_violation(K, y, alpha, b, C))
        yG = -y * G
        below_c = alpha < C
        above_0 = alpha > 0
        up = (pos & below_c) | (neg & above_0)
        low = (pos & above_0) | (neg & below_c)
        if up.any() and low.any():
            up_vals = np.where(up, yG, -np.inf)
            i = int(np.argmax(up_vals))
            m = up_vals[i]
            low_vals = np.where(low, yG, np.inf)
            gap = m - low_vals.min()
        else:
            gap = 0.0
        if gap < eps:
            b = _bias(y, G, alpha, C)
            viol = kkt_violation(K, y, alpha, b, C)
            if viol <= tol:
                history.append(float(alpha.sum() - 0.5 * alpha @ (G + 1.0)))
                return SMOResult(alpha, b, it, history, viol)
            eps *= 0.5
            if eps < 1e-15:
                raise ConvergenceError("SMO stalled below working precision", viol)
            continue
        cand = low & (yG < m)
        bgap = m - yG
        a = diag[i] + diag - 2.0 * K[i]
        a = np.where(a > 0, a, _TAU)
        score = np.where(cand, -(bgap * bgap) / a, np.inf)
        j = int(np.argmin(score))

        ai, aj = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = diag[i] + diag[j] - 2.0 * K[i, j]
            quad = quad if quad > 0 else _TAU
            delta = (-G[i] - G[j]) / quad
            diff = ai - aj
            ni, nj = ai + delta, aj + delta
            if diff > 0:
                if nj < 0:
                    nj, ni = 0.0, diff
            elif ni < 0:
                ni, nj = 0.0, -diff
            if diff > 0:
                if ni > C:
                    ni, nj = C, C - diff
            elif nj > C:
                nj, ni = C, C + diff
        else:
            quad = diag[i] + diag[j] - 2.0 * K[i, j]
            quad = quad if quad > 0 else _TAU
            delta = (G[i] - G[j]) / quad
            total = ai + aj
            ni, nj = ai - delta, aj + delta
            if total > C:
                if ni > C:
                    ni, nj = C, total - C
            elif nj < 0:
                nj, ni = 0.0, total
            if total > C:
                if nj > C:
                    nj, ni = C, total - C
            elif ni < 0:
                ni, nj = 0.0, total
        alpha[i], alpha[j] = ni, nj
        G += Q[:, i] * (ni - ai) + Q[:, j] * (nj - aj)
        it += 1
        if it % max(n, 1) == 0:
            history.append(float(alpha.sum() - 0.5 * alpha @ (G + 1.0)))


def ovo_aggregate(decisions, classes=None) -> int:
    """Winner of one-vs-one voting.

    ``decisions`` maps class pairs ``(a, b)`` with ``a < b`` to the decision
    value of the machine trained with ``a`` as +1. Non-negative values vote for
    ``a``. Ties on votes go to the larger summed winning magnitude, then to the
    lower class code.
    """
    if classes is None:
        classes = sorted({c for pair in decisions for c in pair})
    votes = {c: 0 for c in classes}
    mags = {c: 0.0 for c in classes}
    for (a, b), value in decisions.items():
        winner = a if value >= 0 else b
        votes[winner] += 1
        mags[winner] += abs(value)
    return min(classes, key=lambda c: (-votes[c], -mags[c], c))


def _ovo_batch(dec: np.ndarray, pairs, classes) -> np.ndarray:
    # dec: (n_samples, n_pairs)
    n = dec.shape[0]
    k = len(classes)
    votes = np.zeros((n, k))
    mags = np.zeros((n, k))
    rows = np.arange(n)
    for col, (a, b) in enumerate(pairs):
        v = dec[:, col]
        win = np.where(v >= 0, a, b)
        np.add.at(votes, (rows, win), 1.0)
        np.add.at(mags, (rows, win), np.abs(v))
    # lexicographic: votes desc, magnitude desc, code asc (argmax returns first)
    best = np.empty(n, dtype=np.int64)
    for r in range(n):
        top = np.flatnonzero(votes[r] == votes[r].max())
        top = top[mags[r, top] == mags[r, top].max()]
        best[r] = top[0]
    return np.asarray(classes)[best]


def train_svm(kind: ModelKind, X: np.ndarray, y: np.ndarray, hp: dict) -> dict:
    kname = KERNEL_OF[kind]
    d = X.shape[1]
    gamma = hp.get("gamma")
    gamma = 1.0 / d if gamma is None else float(gamma)
    classes = np.unique(y)
    K = kernel_matrix(kname, X, X, gamma)
    machines = []
    used = np.zeros(len(y), dtype=bool)
    for a, b in combinations(range(len(classes)), 2):
        idx = np.flatnonzero((y == classes[a]) | (y == classes[b]))
        yy = np.where(y[idx] == classes[a], 1.0, -1.0)
        res = smo_binary(K[np.ix_(idx, idx)], yy, hp["C"], hp["tol"], hp["max_sweeps"])
        sv = res.alpha > 0
        machines.append((a, b, idx[sv], res.alpha[sv] * yy[sv], res.b))
        used[idx[sv]] = True
    support = np.flatnonzero(used)
    remap = np.full(len(y), -1)
    remap[support] = np.arange(len(support))
    return {
        "kernel": kname,
        "gamma": gamma,
        "classes": classes.tolist(),
        "support_vectors": X[support],
        "machines": [{"pair": [int(a), int(b)], "sv": remap[sv].tolist(), "coef": coef,
                      "bias": float(bias)} for a, b, sv, coef, bias in machines],
    }


def decision_values(params: dict, X: np.ndarray) -> np.ndarray:
    Ks = kernel_matrix(params["kernel"], X, params["support_vectors"], params["gamma"])
    out = np.empty((X.shape[0], len(params["machines"])))
    for col, m in enumerate(params["machines"]):
        sv = np.asarray(m["sv"], dtype=np.int64)
        out[:, col] = Ks[:, sv] @ np.asarray(m["coef"], dtype=float) + m["bias"]
    return out


def predict_svm(params: dict, X: np.ndarray) -> np.ndarray:
    dec = decision_values(params, X)
    pairs = [tuple(m["pair"]) for m in params["machines"]]
    return _ovo_batch(dec, pairs, params["classes"])
