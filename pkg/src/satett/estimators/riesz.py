"""Direct weight learning via the Riesz-representer loss on a linear sieve.

The target functional is the subgroup contrast q(Z; g) =
1(S=1, V=v) * [g(1, X, V) - g(0, X, V)]; its representer equals the
inverse-probability ratio weights, so minimizing the empirical loss
mean[g(Z)^2 - 2 q(Z; g)] over a linear sieve learns those weights
without inverting any estimated probability.

The fitted function is signed (negative on the control arm, mirroring
the minus sign the estimator applies to control residuals); gamma_star
stores the nonnegative applied weights |g|.
"""

from dataclasses import dataclass

import numpy as np

from satett.errors import RankDeficiencyError
from satett.estimators.core import weighted_eif_estimate

DEFAULT_RIDGE = 1e-4


@dataclass(frozen=True)
class RieszFit:
    basis_id: str
    beta: np.ndarray
    ridge: float
    gamma_star: np.ndarray  # nonnegative applied weights per unit
    gamma_signed: np.ndarray
    loss: float


def default_basis(a, xtilde, v):
    """phi = (1, x, v, a, a*x, a*v): main effects plus arm interactions."""
    a = np.asarray(a, dtype=float).reshape(-1, 1)
    xt = np.atleast_2d(np.asarray(xtilde, dtype=float))
    if xt.ndim == 1:
        xt = xt.reshape(-1, 1)
    v = np.asarray(v, dtype=float).reshape(-1, 1)
    ones = np.ones_like(a)
    return np.hstack([ones, xt, v, a, a * xt, a * v])


def fit_riesz(data, target, basis=None, ridge=DEFAULT_RIDGE, basis_id=None,
              covariates=None):
    """Closed-form sieve solve: beta = (G + ridge I)^-1 h."""
    if basis is None:
        basis = default_basis
        basis_id = basis_id or "affine+arm-interactions"
    basis_id = basis_id or "custom"
    n = data.n
    xt = data.xtilde if covariates is None else covariates
    phi_obs = basis(data.a, xt, data.v)
    phi1 = basis(np.ones(n), xt, data.v)
    phi0 = basis(np.zeros(n), xt, data.v)
    ind = ((data.s == 1) & (data.v == target.v)).astype(float)
    G = phi_obs.T @ phi_obs / n
    h = (ind[:, None] * (phi1 - phi0)).sum(axis=0) / n
    A = G + ridge * np.eye(G.shape[0])
    if ridge == 0.0 and np.linalg.matrix_rank(G) < G.shape[0]:
        raise RankDeficiencyError("singular sieve gram matrix; pass ridge > 0")
    try:
        beta = np.linalg.solve(A, h)
    except np.linalg.LinAlgError:
        raise RankDeficiencyError("singular sieve gram matrix; pass ridge > 0")
    gamma_signed = phi_obs @ beta
    q_at_beta = ind * ((phi1 - phi0) @ beta)
    loss = float(np.mean(gamma_signed**2 - 2.0 * q_at_beta))
    gamma_star = np.where(data.a == 1, gamma_signed, -gamma_signed)
    return RieszFit(
        basis_id=basis_id, beta=beta, ridge=float(ridge),
        gamma_star=gamma_star, gamma_signed=gamma_signed, loss=loss,
    )


def estimate_autodml(data, target, riesz, fits):
    """Weighted-residual estimator with the learned representer weights."""
    report, _ = weighted_eif_estimate(
        data, target, riesz.gamma_star, riesz.gamma_star,
        fits.m1, fits.m0, "riesz",
    )
    return report
