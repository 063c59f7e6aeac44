"""Gaussian-process regression with a polynomial kernel.

Kernel: K(z, z') = C * (z^T z')^{d1} + sigma2 * delta(z, z'), fitted by
maximizing the log marginal likelihood over a log-spaced (C, sigma2)
grid with one local refinement pass. Features are standardized
internally and an intercept feature is appended so the degree-1 kernel
spans affine functions.

Because the gram matrix B = (Z Z^T)^{d1} is fixed across hyperparameter
candidates, one eigendecomposition makes every grid evaluation O(n).
"""

from dataclasses import dataclass

import numpy as np

from satett.errors import ConditioningError

GRID_C = np.logspace(-2.0, 2.0, 9)
GRID_SIGMA2 = np.logspace(-3.0, 1.0, 9)
JITTER_MAX = 1e-4


@dataclass(frozen=True)
class KernelConfig:
    C: float
    sigma2: float
    d1: int = 1
    jitter: float = 1e-8


@dataclass(frozen=True)
class GPPredictor:
    alpha: np.ndarray
    train_z: np.ndarray
    mean: np.ndarray
    scale: np.ndarray
    config: KernelConfig
    log_marginal_likelihood: float

    def _featurize(self, features):
        X = np.atleast_2d(np.asarray(features, dtype=float))
        Z = (X - self.mean) / self.scale
        return np.hstack([Z, np.ones((Z.shape[0], 1))])

    def predict(self, features):
        Zn = self._featurize(features)
        k = self.config.C * (Zn @ self.train_z.T) ** self.config.d1
        return k @ self.alpha


def _standardize(X):
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0.0] = 1.0
    return (X - mean) / scale, mean, scale


def _grid_nll_factory(B, y, jitter):
    lam, U = np.linalg.eigh(B)
    lam = np.clip(lam, 0.0, None)
    yt = U.T @ y
    n = len(y)

    def loglik(C, sigma2):
        d = C * lam + sigma2 + jitter
        if np.min(d) <= 0.0:
            return -np.inf
        return -0.5 * (np.sum(yt * yt / d) + np.sum(np.log(d)) + n * np.log(2.0 * np.pi))

    return loglik, lam, U, yt


def gp_poly_fit(features, targets, init=None):
    """Fit the GP, returning (posterior-mean predictor, fitted KernelConfig)."""
    X = np.atleast_2d(np.asarray(features, dtype=float))
    y = np.asarray(targets, dtype=float)
    if X.shape[0] < 2:
        raise ValueError("need at least 2 rows to fit a GP")
    d1 = init.d1 if init is not None else 1
    jitter = init.jitter if init is not None else 1e-8
    Zs, mean, scale = _standardize(X)
    Z = np.hstack([Zs, np.ones((Zs.shape[0], 1))])
    B = (Z @ Z.T) ** d1

    while True:
        loglik, lam, U, yt = _grid_nll_factory(B, y, jitter)
        best = (-np.inf, None, None)
        for C in GRID_C:
            for s2 in GRID_SIGMA2:
                ll = loglik(C, s2)
                if ll > best[0]:
                    best = (ll, C, s2)
        if np.isfinite(best[0]):
            break
        jitter *= 10.0
        if jitter > JITTER_MAX:
            raise ConditioningError("kernel matrix not positive definite at any grid point")

    # one refinement pass: half the original log-spacing around the best cell
    _, C0, s20 = best
    for C in C0 * 10.0 ** np.linspace(-0.5, 0.5, 5):
        for s2 in s20 * 10.0 ** np.linspace(-0.5, 0.5, 5):
            ll = loglik(C, s2)
            if ll > best[0]:
                best = (ll, C, s2)

    ll_best, C_hat, s2_hat = best
    d = C_hat * lam + s2_hat + jitter
    alpha = U @ (yt / d)
    cfg = KernelConfig(C=float(C_hat), sigma2=float(s2_hat), d1=d1, jitter=jitter)
    pred = GPPredictor(
        alpha=alpha,
        train_z=Z,
        mean=mean,
        scale=scale,
        config=cfg,
        log_marginal_likelihood=float(ll_best),
    )
    return pred, cfg


def poly_log_marginal_likelihood(features, targets, C, sigma2, d1=1, jitter=1e-8):
    """Direct (Cholesky-based) log marginal likelihood, used as a cross-check
    of the eigenvalue shortcut inside gp_poly_fit."""
    X = np.atleast_2d(np.asarray(features, dtype=float))
    y = np.asarray(targets, dtype=float)
    Zs, _, _ = _standardize(X)
    Z = np.hstack([Zs, np.ones((Zs.shape[0], 1))])
    n = len(y)
    K = C * (Z @ Z.T) ** d1 + (sigma2 + jitter) * np.eye(n)
    L = np.linalg.cholesky(K)
    w = np.linalg.solve_triangular if hasattr(np.linalg, "solve_triangular") else None
    if w is not None:
        u = w(L, y, lower=True)
    else:
        u = np.linalg.solve(L, y)
    logdet = 2.0 * np.sum(np.log(np.diag(L)))
    return float(-0.5 * (u @ u + logdet + n * np.log(2.0 * np.pi)))
