from satett.learners.forest import ForestModel, fit_forest
from satett.learners.gp import GPPredictor, KernelConfig, gp_poly_fit
from satett.learners.isotonic import IsotonicFit, calibrate_predictions, fit_isotonic
from satett.learners.linear import LinearModel, fit_ols
from satett.learners.logistic import (
    LogisticModel,
    clip_proba,
    expit,
    fit_logistic_irls,
)

__all__ = [
    "ForestModel",
    "fit_forest",
    "GPPredictor",
    "KernelConfig",
    "gp_poly_fit",
    "IsotonicFit",
    "calibrate_predictions",
    "fit_isotonic",
    "LinearModel",
    "fit_ols",
    "LogisticModel",
    "clip_proba",
    "expit",
    "fit_logistic_irls",
]
