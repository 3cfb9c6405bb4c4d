"""Exact greedy tree growing over presorted feature columns (numba kernels).

Each node owns the same contiguous segment in every row of ``order`` (one
row per feature, samples sorted by that feature). Splitting a node stably
partitions its segment in every row, so children stay sorted without
re-sorting. Split ties resolve to the lowest feature index, then the lowest
threshold. Samples go left when ``x < threshold``.
"""
import numpy as np
from numba import njit

MASK = np.uint64(0xFFFFFFFFFFFFFFFF)


@njit(cache=True)
def _splitmix_next(state):
    state = state + np.uint64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return state, z ^ (z >> np.uint64(31))


@njit(cache=True)
def _sample_features(d, k, state, scratch):
    # partial Fisher-Yates; returns the first k entries sorted ascending
    for f in range(d):
        scratch[f] = f
    for t in range(k):
        state, r = _splitmix_next(state)
        pick = t + np.int64(r % np.uint64(d - t))
        tmp = scratch[t]
        scratch[t] = scratch[pick]
        scratch[pick] = tmp
    out = np.sort(scratch[:k].copy())
    return state, out


@njit(cache=True)
def _threshold(xa, xb):
    thr = 0.5 * (xa + xb)
    if not (xa < thr):
        thr = xb
    return thr


@njit(cache=True)
def _partition(order, X, f, thr, s, e, buf):
    d = order.shape[0]
    nl = 0
    for ff in range(d):
        row = order[ff]
        li = s
        ri = 0
        for p in range(s, e):
            smp = row[p]
            if X[smp, f] < thr:
                row[li] = smp
                li += 1
            else:
                buf[ri] = smp
                ri += 1
        for q in range(ri):
            row[li + q] = buf[q]
        nl = li - s
    return nl


@njit(cache=True)
def grow_classifier(X, y, n_classes, order, max_depth, min_split, max_features, seed):
    """Gini CART. ``max_depth < 0`` means unlimited. Returns node arrays."""
    n, d = X.shape
    order = order.copy()
    cap = 2 * n + 1
    feature = np.full(cap, -1, np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    counts = np.zeros((cap, n_classes), np.int64)
    start = np.zeros(cap, np.int64)
    end = np.zeros(cap, np.int64)
    depth = np.zeros(cap, np.int64)
    buf = np.empty(n, np.int64)
    scratch = np.empty(d, np.int64)
    cl = np.zeros(n_classes, np.int64)
    cr = np.zeros(n_classes, np.int64)
    state = np.uint64(seed)
    end[0] = n
    for i in range(n):
        counts[0, y[i]] += 1
    n_nodes = 1
    node = 0
    while node < n_nodes:
        s = start[node]
        e = end[node]
        m = e - s
        nonzero = 0
        for c in range(n_classes):
            if counts[node, c] > 0:
                nonzero += 1
        if m < min_split or nonzero <= 1 or (max_depth >= 0 and depth[node] >= max_depth):
            node += 1
            continue
        if max_features < d:
            state, feats = _sample_features(d, max_features, state, scratch)
        else:
            feats = np.arange(d)
        best_score = -1.0
        best_f = -1
        best_thr = 0.0
        for f in feats:
            row = order[f]
            sql = 0.0
            sqr = 0.0
            for c in range(n_classes):
                cl[c] = 0
                cr[c] = counts[node, c]
                sqr += cr[c] * cr[c]
            for p in range(s, e - 1):
                smp = row[p]
                c = y[smp]
                sql += 2 * cl[c] + 1
                cl[c] += 1
                sqr -= 2 * cr[c] - 1
                cr[c] -= 1
                xa = X[smp, f]
                xb = X[row[p + 1], f]
                if xa < xb:
                    nl = p - s + 1
                    score = sql / nl + sqr / (m - nl)
                    if score > best_score:
                        best_score = score
                        best_f = f
                        best_thr = _threshold(xa, xb)
        if best_f < 0:
            node += 1
            continue
        nl = _partition(order, X, best_f, best_thr, s, e, buf)
        feature[node] = best_f
        threshold[node] = best_thr
        for child, cs, ce in ((n_nodes, s, s + nl), (n_nodes + 1, s + nl, e)):
            start[child] = cs
            end[child] = ce
            depth[child] = depth[node] + 1
            row = order[0]
            for p in range(cs, ce):
                counts[child, y[row[p]]] += 1
        left[node] = n_nodes
        right[node] = n_nodes + 1
        n_nodes += 2
        node += 1
    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), counts[:n_nodes].copy())


@njit(cache=True)
def grow_regressor(X, g, h, order, max_depth, reg_lambda, reg_gamma, min_child_weight):
    """Second-order boosting tree; leaf weight -G/(H+lambda)."""
    n, d = X.shape
    order = order.copy()
    cap = 2 ** (max_depth + 1)
    feature = np.full(cap, -1, np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    value = np.zeros(cap)
    gsum = np.zeros(cap)
    hsum = np.zeros(cap)
    start = np.zeros(cap, np.int64)
    end = np.zeros(cap, np.int64)
    depth = np.zeros(cap, np.int64)
    buf = np.empty(n, np.int64)
    end[0] = n
    for i in range(n):
        gsum[0] += g[i]
        hsum[0] += h[i]
    n_nodes = 1
    node = 0
    while node < n_nodes:
        s = start[node]
        e = end[node]
        G = gsum[node]
        H = hsum[node]
        value[node] = -G / (H + reg_lambda)
        if e - s < 2 or depth[node] >= max_depth:
            node += 1
            continue
        parent = G * G / (H + reg_lambda)
        best_gain = 0.0
        best_f = -1
        best_thr = 0.0
        for f in range(d):
            row = order[f]
            gl = 0.0
            hl = 0.0
            for p in range(s, e - 1):
                smp = row[p]
                gl += g[smp]
                hl += h[smp]
                xa = X[smp, f]
                xb = X[row[p + 1], f]
                if xa < xb:
                    hr = H - hl
                    if hl < min_child_weight or hr < min_child_weight:
                        continue
                    gr = G - gl
                    gain = 0.5 * (gl * gl / (hl + reg_lambda) + gr * gr / (hr + reg_lambda)
                                  - parent) - reg_gamma
                    if gain > best_gain:
                        best_gain = gain
                        best_f = f
                        best_thr = _threshold(xa, xb)
        if best_f < 0:
            node += 1
            continue
        nl = _partition(order, X, best_f, best_thr, s, e, buf)
        feature[node] = best_f
        threshold[node] = best_thr
        for child, cs, ce in ((n_nodes, s, s + nl), (n_nodes + 1, s + nl, e)):
            start[child] = cs
            end[child] = ce
            depth[child] = depth[node] + 1
            row = order[0]
            for p in range(cs, ce):
                gsum[child] += g[row[p]]
                hsum[child] += h[row[p]]
        left[node] = n_nodes
        right[node] = n_nodes + 1
        n_nodes += 2
        node += 1
    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), value[:n_nodes].copy())


@njit(cache=True)
def apply_tree(X, feature, threshold, left, right):
    """Leaf index reached by every row of X."""
    n = X.shape[0]
    out = np.empty(n, np.int64)
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] < threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out


def presort(X: np.ndarray) -> np.ndarray:
    """Row f holds sample indices sorted by feature f (stable)."""
    return np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T).astype(np.int64)
