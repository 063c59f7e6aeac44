"""Numba-compiled twins of the kernels in `numpy_impl`.

Kept in loop form so numba generates tight machine code; semantics match
the numpy implementations (results may differ in the last ulps because
summation order differs).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def qp_kkt_residual(x, grad):
    res = 0.0
    for i in range(x.shape[0]):
        if x[i] > 0.0:
            v = abs(grad[i])
        else:
            v = -grad[i] if grad[i] < 0.0 else 0.0
        if v > res:
            res = v
    return res


@njit(cache=True)
def apg_qp(Q, c, x0, step, tol, max_iter):
    n = x0.shape[0]
    x = x0.copy()
    y = x0.copy()
    t = 1.0
    f_prev = x @ (Q @ x) - 2.0 * (c @ x)
    kkt = np.inf
    it = 0
    while it < max_iter:
        it += 1
        grad_y = 2.0 * (Q @ y - c)
        x_new = np.empty(n)
        for i in range(n):
            v = y[i] - step * grad_y[i]
            x_new[i] = v if v > 0.0 else 0.0
        f_new = x_new @ (Q @ x_new) - 2.0 * (c @ x_new)
        if f_new > f_prev:
            y = x.copy()
            t = 1.0
            grad_y = 2.0 * (Q @ y - c)
            for i in range(n):
                v = y[i] - step * grad_y[i]
                x_new[i] = v if v > 0.0 else 0.0
            f_new = x_new @ (Q @ x_new) - 2.0 * (c @ x_new)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        coef = (t - 1.0) / t_new
        y = x_new + coef * (x_new - x)
        x = x_new
        t = t_new
        f_prev = f_new
        grad_x = 2.0 * (Q @ x - c)
        kkt = qp_kkt_residual(x, grad_x)
        if kkt <= tol:
            break
    return x, f_prev, kkt, it


@njit(cache=True)
def pav(values, weights):
    n = values.shape[0]
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
        for j in range(start[b], end):
            out[j] = levels[b]
    return out


@njit(cache=True)
def scan_split(x_sorted, y_sorted, min_leaf):
    n = y_sorted.shape[0]
    if n < 2 * min_leaf:
        return -1, np.inf
    total = 0.0
    total_sq = 0.0
    for i in range(n):
        total += y_sorted[i]
        total_sq += y_sorted[i] * y_sorted[i]
    ls = 0.0
    lq = 0.0
    for i in range(min_leaf - 1):
        ls += y_sorted[i]
        lq += y_sorted[i] * y_sorted[i]
    best_pos = -1
    best_sse = np.inf
    for pos in range(min_leaf, n - min_leaf + 1):
        ls += y_sorted[pos - 1]
        lq += y_sorted[pos - 1] * y_sorted[pos - 1]
        if x_sorted[pos - 1] == x_sorted[pos]:
            continue
        rs = total - ls
        rq = total_sq - lq
        sse = (lq - ls * ls / pos) + (rq - rs * rs / (n - pos))
        if sse < best_sse:
            best_sse = sse
            best_pos = pos
    return best_pos, best_sse


@njit(cache=True)
def tree_predict(feature, threshold, left, right, value, X):
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
