"""Covariate-balancing weights via a nonnegativity-constrained QP.

The weights minimize the worst-case RKHS imbalance between the trial
subgroup and each treatment arm plus a variance penalty; the QP is
solved by accelerated projected gradient with periodic active-set
polishing (an exact solve on the currently positive coordinates, kept
only when it satisfies the KKT conditions).
"""

from dataclasses import dataclass

import numpy as np

from satett import _accel
from satett.errors import ConditioningError
from satett.estimators.core import NuisanceFits, weighted_eif_estimate
from satett.learners.gp import KernelConfig, gp_poly_fit

DEFAULT_LAMBDA = 0.01  # simulated configuration; 0.001 also reasonable


@dataclass(frozen=True)
class BalanceProblem:
    Q: np.ndarray
    c: np.ndarray
    e_vs: np.ndarray
    i1v: np.ndarray
    i0v: np.ndarray
    active: np.ndarray
    lam: float
    penalty_diag: np.ndarray
    imbalance_const: float  # e'K1 e + e'K0 e, the gamma-free imbalance part


@dataclass(frozen=True)
class BalanceWeights:
    gamma: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    imbalance: float
    converged: bool


def kernel_features(data, covariates=None):
    """Standardized covariates, the subgroup code, and an intercept feature.

    The intercept lets the degree-1 polynomial kernel span affine
    functions of the covariates. `covariates` overrides data.xtilde
    (misspecified feature views).
    """
    xt = data.xtilde if covariates is None else np.atleast_2d(np.asarray(covariates, dtype=float))
    if xt.ndim == 1:
        xt = xt.reshape(-1, 1)
    mean = xt.mean(axis=0)
    scale = xt.std(axis=0)
    scale[scale == 0.0] = 1.0
    zs = (xt - mean) / scale
    n = data.n
    return np.hstack([zs, data.v.reshape(-1, 1).astype(float), np.ones((n, 1))])


def _poly_kernel_matrix(Z, cfg):
    n = Z.shape[0]
    K = cfg.C * (Z @ Z.T) ** cfg.d1 + cfg.sigma2 * np.eye(n)
    return K


def fit_balance_nuisances(data, init=None, covariates=None):
    """Per-arm GP outcome fits on the pooled data.

    Returns (NuisanceFits with GP posterior means, kcfg1, kcfg0).
    """
    Z = kernel_features(data, covariates)
    preds = {}
    cfgs = {}
    for arm in (0, 1):
        rows = np.where(data.a == arm)[0]
        pred, cfg = gp_poly_fit(Z[rows], data.y[rows], init=init)
        preds[arm] = pred.predict(Z)
        cfgs[arm] = cfg
    fits = NuisanceFits(
        m1=preds[1], m0=preds[0],
        pi=np.full(data.n, 0.5), eta=np.full(data.n, 1.0),
        learner_id="gp-poly", pooled=True,
    )
    return fits, cfgs[1], cfgs[0]


def build_balance_problem(data, target, kcfg1, kcfg0, lam=DEFAULT_LAMBDA,
                          jitter=1e-8, covariates=None):
    """Assemble Q and the linear term for the balancing QP."""
    Z = kernel_features(data, covariates)
    in_v = data.v == target.v
    e_vs = (in_v & (data.s == 1)).astype(float)
    i1v = in_v & (data.a == 1)
    i0v = in_v & (data.a == 0)
    K1 = _poly_kernel_matrix(Z, kcfg1)
    K0 = _poly_kernel_matrix(Z, kcfg0)
    jit = jitter
    while True:
        try:
            np.linalg.cholesky(K1 + jit * np.eye(data.n))
            np.linalg.cholesky(K0 + jit * np.eye(data.n))
            break
        except np.linalg.LinAlgError:
            jit *= 10.0
            if jit > 1e-4:
                raise ConditioningError("balance kernel not PSD after jitter escalation")
    K1 = K1 + jit * np.eye(data.n)
    K0 = K0 + jit * np.eye(data.n)
    d1 = i1v.astype(float)
    d0 = i0v.astype(float)
    Q = (d1[:, None] * K1 * d1[None, :]) + (d0[:, None] * K0 * d0[None, :])
    sigma_diag = np.where(data.a == 1, kcfg1.sigma2, kcfg0.sigma2)
    penalty_diag = lam * sigma_diag
    Q[np.diag_indices_from(Q)] += penalty_diag
    c = d1 * (K1 @ e_vs) + d0 * (K0 @ e_vs)
    active = i1v | i0v
    const = float(e_vs @ (K1 @ e_vs) + e_vs @ (K0 @ e_vs))
    return BalanceProblem(
        Q=Q, c=c, e_vs=e_vs, i1v=i1v, i0v=i0v, active=active, lam=lam,
        penalty_diag=penalty_diag, imbalance_const=const,
    )


def _polish(Qa, ca, x):
    """Exact solve on the positive coordinates of x; None if infeasible."""
    pos = x > 0
    if not np.any(pos):
        return None
    try:
        sol = np.linalg.solve(Qa[np.ix_(pos, pos)], ca[pos])
    except np.linalg.LinAlgError:
        return None
    if np.any(sol < 0):
        return None
    cand = np.zeros_like(x)
    cand[pos] = sol
    grad = 2.0 * (Qa @ cand - ca)
    return cand, _accel.qp_kkt_residual(cand, grad)


def solve_balance_weights(problem, tol=1e-8, max_iter=50000):
    """Solve min_{gamma>=0} gamma'Q gamma - 2c'gamma on the active subvector."""
    n = len(problem.c)
    act = np.where(problem.active)[0]
    gamma = np.zeros(n)
    if act.size == 0 or not np.any(problem.c[act] > 0):
        # penalty-only or zero linear term: the minimizer is gamma = 0
        grad = -2.0 * problem.c
        kkt = _accel.qp_kkt_residual(gamma, grad)
        return BalanceWeights(
            gamma=gamma, objective=0.0, kkt_residual=float(kkt),
            iterations=0, imbalance=_imbalance_at(problem, gamma), converged=kkt <= tol,
        )
    Qa = np.ascontiguousarray(problem.Q[np.ix_(act, act)])
    ca = np.ascontiguousarray(problem.c[act])
    # Lipschitz constant of the gradient via 30 power-iteration steps
    v = np.ones(act.size) / np.sqrt(act.size)
    lmax = 1.0
    for _ in range(30):
        w = Qa @ v
        lmax = float(np.linalg.norm(w))
        if lmax == 0.0:
            break
        v = w / lmax
    step = 1.0 / (2.0 * 1.02 * max(lmax, 1e-300))
    x = np.zeros(act.size)
    total_iters = 0
    kkt = np.inf
    fval = 0.0
    converged = False
    chunk = 500
    while total_iters < max_iter:
        budget = min(chunk, max_iter - total_iters)
        x, fval, kkt, used = _accel.apg_qp(Qa, ca, x, step, tol, budget)
        total_iters += used
        if kkt <= tol:
            converged = True
            break
        polished = _polish(Qa, ca, x)
        if polished is not None:
            cand, cand_kkt = polished
            if cand_kkt < kkt:
                x, kkt = cand, cand_kkt
                fval = float(cand @ (Qa @ cand) - 2.0 * (ca @ cand))
            if kkt <= tol:
                converged = True
                break
    gamma[act] = x
    return BalanceWeights(
        gamma=gamma, objective=float(fval), kkt_residual=float(kkt),
        iterations=total_iters, imbalance=_imbalance_at(problem, gamma),
        converged=converged,
    )


def _imbalance_at(problem, gamma):
    """sum_a (I_a gamma - e_vs)' K_a (I_a gamma - e_vs) at this gamma."""
    quad = float(gamma @ (problem.Q @ gamma) - 2.0 * (problem.c @ gamma))
    penalty = float(np.sum(problem.penalty_diag * gamma * gamma))
    return quad - penalty + problem.imbalance_const


def estimate_covbal(data, target, weights, fits):
    """Plug the balancing weights into the weighted-residual estimator."""
    report, _ = weighted_eif_estimate(
        data, target, weights.gamma, weights.gamma, fits.m1, fits.m0,
        "covbal", converged=weights.converged,
    )
    return report
