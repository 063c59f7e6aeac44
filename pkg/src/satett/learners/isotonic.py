"""Isotonic regression via pool-adjacent-violators, plus calibration maps.

PAV is the exact minimizer of the weighted squared error subject to a
nondecreasing fit, and is deterministic, which is why it backs the
calibration steps of the calibrated estimator.
"""

from dataclasses import dataclass

import numpy as np

from satett import _accel
from satett.learners.logistic import clip_proba


@dataclass(frozen=True)
class IsotonicFit:
    breakpoints: np.ndarray  # sorted distinct predictor values
    levels: np.ndarray  # nondecreasing fitted values, one per breakpoint

    def predict(self, x):
        """Step-function interpolation: value of the nearest breakpoint
        at or below x (first level below the smallest breakpoint)."""
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        idx = np.clip(idx, 0, len(self.levels) - 1)
        return self.levels[idx]


def fit_isotonic(predictor, labels, weights=None):
    """Weighted isotonic regression of labels on predictor.

    Ties in the predictor are pooled (weighted mean) before PAV runs.
    """
    x = np.asarray(predictor, dtype=float)
    y = np.asarray(labels, dtype=float)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    if len(x) != len(y) or len(w) != len(y):
        raise ValueError("predictor, labels, and weights must have equal length")
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    order = np.argsort(x, kind="stable")
    xs, ys, ws = x[order], y[order], w[order]
    # pool predictor ties
    uniq, first = np.unique(xs, return_index=True)
    wsum = np.add.reduceat(ws, first)
    ymean = np.add.reduceat(ys * ws, first) / wsum
    levels = _accel.pav(ymean, wsum)
    return IsotonicFit(breakpoints=uniq, levels=levels)


def calibrate_predictions(raw, labels, probability=False, weights=None):
    """Map raw predictions through an isotonic fit of labels on raw.

    Returns the calibrated value for every element of `raw`. With
    probability=True the output is clipped into [1e-6, 1 - 1e-6].
    """
    fit = fit_isotonic(raw, labels, weights)
    out = fit.predict(raw)
    if probability:
        out = clip_proba(out)
    return out
