"""Ridge-penalized least squares for the per-arm outcome regressions."""

from dataclasses import dataclass

import numpy as np

from satett.errors import RankDeficiencyError


@dataclass(frozen=True)
class LinearModel:
    coefficients: np.ndarray  # intercept first
    ridge: float

    def predict(self, features):
        features = np.atleast_2d(np.asarray(features, dtype=float))
        return self.coefficients[0] + features @ self.coefficients[1:]


def fit_ols(features, targets, ridge=0.0):
    """Least squares with an optional ridge penalty on the slopes.

    The intercept is never penalized, so the fit is shift-equivariant in
    the targets.
    """
    X = np.atleast_2d(np.asarray(features, dtype=float))
    y = np.asarray(targets, dtype=float)
    n, p = X.shape
    Xd = np.hstack([np.ones((n, 1)), X])
    gram = Xd.T @ Xd
    pen = np.eye(p + 1) * ridge
    pen[0, 0] = 0.0
    rhs = Xd.T @ y
    try:
        if ridge == 0.0:
            # detect rank deficiency before solving
            if np.linalg.matrix_rank(gram) < p + 1:
                raise np.linalg.LinAlgError
        beta = np.linalg.solve(gram + pen, rhs)
    except np.linalg.LinAlgError:
        raise RankDeficiencyError(
            "singular normal equations; pass ridge > 0 to regularize"
        )
    return LinearModel(coefficients=beta, ridge=float(ridge))
