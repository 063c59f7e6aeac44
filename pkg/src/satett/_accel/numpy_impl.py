"""Pure-numpy implementations of the hot numeric kernels.

These are the reference implementations. `satett._accel` re-exports either
these or their numba-compiled twins from `numba_impl`, selected once at
import time via the SATETT_NO_NUMBA environment variable.
"""

import numpy as np


def apg_qp(Q, c, x0, step, tol, max_iter):
    """Accelerated projected gradient for min_{x>=0} x'Qx - 2c'x.

    Runs at most `max_iter` iterations starting from `x0` with fixed step
    size `step`, restarting momentum whenever the objective increases.

    Returns (x, objective, kkt_residual, iterations).
    """
    x = x0.copy()
    y = x0.copy()
    t = 1.0
    f_prev = float(x @ (Q @ x) - 2.0 * (c @ x))
    kkt = np.inf
    it = 0
    while it < max_iter:
        it += 1
        grad_y = 2.0 * (Q @ y - c)
        x_new = np.maximum(y - step * grad_y, 0.0)
        f_new = float(x_new @ (Q @ x_new) - 2.0 * (c @ x_new))
        if f_new > f_prev:
            # momentum restart from the last accepted iterate
            y = x.copy()
            t = 1.0
            grad_y = 2.0 * (Q @ y - c)
            x_new = np.maximum(y - step * grad_y, 0.0)
            f_new = float(x_new @ (Q @ x_new) - 2.0 * (c @ x_new))
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x = x_new
        t = t_new
        f_prev = f_new
        grad_x = 2.0 * (Q @ x - c)
        kkt = qp_kkt_residual(x, grad_x)
        if kkt <= tol:
            break
    return x, f_prev, kkt, it


def qp_kkt_residual(x, grad):
    """Max KKT violation for min f(x) s.t. x >= 0 given grad = f'(x)."""
    active = x > 0.0
    res = 0.0
    if np.any(active):
        res = float(np.max(np.abs(grad[active])))
    if np.any(~active):
        res = max(res, float(np.max(-np.minimum(grad[~active], 0.0))))
    return res


def pav(values, weights):
    """Weighted pool-adjacent-violators. `values` ordered by predictor.

    Returns the nondecreasing fitted levels minimizing the weighted
    squared error.
    """
    n = len(values)
    levels = np.empty(n)
    wsum = np.empty(n)
    start = np.empty(n, dtype=np.int64)
    k = -1
    for i in range(n):
        k += 1
        levels[k] = values[i]
        wsum[k] = weights[i]
        start[k] = i
        while k > 0 and levels[k - 1] >= levels[k]:
            merged = levels[k - 1] * wsum[k - 1] + levels[k] * wsum[k]
            wsum[k - 1] += wsum[k]
            levels[k - 1] = merged / wsum[k - 1]
            k -= 1
    out = np.empty(n)
    for b in range(k + 1):
        end = start[b + 1] if b < k else n
        out[start[b]:end] = levels[b]
    return out


def scan_split(x_sorted, y_sorted, min_leaf):
    """Best SSE split of y along a sorted feature column.

    Returns (best_pos, best_sse) where best_pos is the number of rows in
    the left child, or -1 when no split satisfies min_leaf / distinctness.
    """
    n = len(y_sorted)
    if n < 2 * min_leaf:
        return -1, np.inf
    csum = np.cumsum(y_sorted)
    csq = np.cumsum(y_sorted * y_sorted)
    total, total_sq = csum[-1], csq[-1]
    best_pos, best_sse = -1, np.inf
    for pos in range(min_leaf, n - min_leaf + 1):
        if x_sorted[pos - 1] == x_sorted[pos]:
            continue
        ls, lq = csum[pos - 1], csq[pos - 1]
        rs, rq = total - ls, total_sq - lq
        sse = (lq - ls * ls / pos) + (rq - rs * rs / (n - pos))
        if sse < best_sse:
            best_sse = sse
            best_pos = pos
    return best_pos, best_sse


def tree_predict(feature, threshold, left, right, value, X):
    """Evaluate a flattened binary tree on rows of X."""
    n = X.shape[0]
    out = np.empty(n)
    for i in range(n):
        node = 0
        while left[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
    return out
