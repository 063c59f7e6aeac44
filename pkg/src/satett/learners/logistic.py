"""Logistic regression fit by iteratively reweighted least squares."""

from dataclasses import dataclass

import numpy as np

PROB_EPS = 1e-6


@dataclass(frozen=True)
class LogisticModel:
    coefficients: np.ndarray  # intercept first
    ridge: float
    converged: bool
    iterations: int

    def predict_proba(self, features):
        features = np.atleast_2d(np.asarray(features, dtype=float))
        eta = self.coefficients[0] + features @ self.coefficients[1:]
        return clip_proba(expit(eta))


def expit(x):
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def clip_proba(p):
    return np.clip(p, PROB_EPS, 1.0 - PROB_EPS)


def _penalized_loglik(beta, Xd, y, ridge):
    eta = Xd @ beta
    # log(1 + exp(eta)) computed stably
    ll = y @ eta - np.sum(np.logaddexp(0.0, eta))
    return ll - 0.5 * ridge * np.sum(beta[1:] ** 2)


def fit_logistic_irls(features, labels, ridge=0.0, max_iter=100, tol=1e-10):
    """IRLS with step halving; the intercept is not penalized.

    Under complete separation with ridge = 0 the likelihood has no
    maximizer; the loop then stops at max_iter with converged = False
    rather than raising.
    """
    X = np.atleast_2d(np.asarray(features, dtype=float))
    y = np.asarray(labels, dtype=float)
    n, p = X.shape
    Xd = np.hstack([np.ones((n, 1)), X])
    beta = np.zeros(p + 1)
    pen = np.eye(p + 1) * ridge
    pen[0, 0] = 0.0
    ll = _penalized_loglik(beta, Xd, y, ridge)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        mu = expit(Xd @ beta)
        grad = Xd.T @ (y - mu) - pen @ beta
        if np.max(np.abs(grad)) <= tol:
            converged = True
            break
        w = np.maximum(mu * (1.0 - mu), 1e-12)
        hess = (Xd * w[:, None]).T @ Xd + pen
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            break
        # halve the step until the penalized log-likelihood improves
        scale = 1.0
        for _ in range(10):
            cand = beta + scale * step
            ll_new = _penalized_loglik(cand, Xd, y, ridge)
            if ll_new >= ll:
                break
            scale *= 0.5
        beta = beta + scale * step
        ll = _penalized_loglik(beta, Xd, y, ridge)
    else:
        it = max_iter
    return LogisticModel(
        coefficients=beta, ridge=float(ridge), converged=converged, iterations=it
    )
