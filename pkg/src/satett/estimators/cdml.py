"""Calibrated debiased estimator.

Pipeline: random-forest outcome models and logistic treatment/selection
models are fit once on the full data; their predictions are then passed
through isotonic-regression calibration (probabilities against the
observed indicators, outcome predictions against observed outcomes per
arm) before entering the weighted-residual estimator. The standard
error comes from a bootstrap that freezes the raw model predictions and
reruns only calibration + estimation per replicate.
"""

import numpy as np

from satett.errors import InsufficientDataError
from satett.estimators.core import EstimateReport, NuisanceFits
from satett.inference import BootstrapConfig, bootstrap_cdml_se, wald_summary
from satett.learners import fit_forest, fit_isotonic, fit_logistic_irls
from satett.learners.logistic import clip_proba


def fit_cdml_raw(data, seed=0, forest_params=None, prop_ridge=0.0,
                 outcome_features=None, prop_features=None):
    """Step 1-3: raw (uncalibrated) nuisance predictions for every unit."""
    from satett.estimators.core import design_matrix

    Xm = design_matrix(data, outcome_features)
    Xp = design_matrix(data, prop_features)
    fp = forest_params or {}
    preds = {}
    for arm in (0, 1):
        rows = np.where(data.a == arm)[0]
        if rows.size == 0:
            raise InsufficientDataError(f"no units in arm a={arm}")
        model = fit_forest(Xm[rows], data.y[rows], mode="regression", seed=seed + arm, **fp)
        preds[arm] = model.predict(Xm)
    pi = fit_logistic_irls(Xp, data.a, ridge=prop_ridge).predict_proba(Xp)
    eta = fit_logistic_irls(Xp, data.s, ridge=prop_ridge).predict_proba(Xp)
    return NuisanceFits(
        m1=preds[1], m0=preds[0], pi=pi, eta=eta,
        learner_id="forest/logistic/logistic", pooled=True,
    )


def _calibrate_outcome(raw, y, arm_mask):
    """Isotonic fit of observed outcomes on raw predictions within one arm,
    then map every unit's raw prediction through the fit."""
    fit = fit_isotonic(raw[arm_mask], y[arm_mask])
    return fit.predict(raw)


def _calibrate_probability(raw, labels):
    fit = fit_isotonic(raw, labels.astype(float))
    return clip_proba(fit.predict(raw))


def estimate_from_raw(y, a, s, v, target_v, m1, m0, pi, eta):
    """Steps 4-7: calibrate the frozen raw predictions and evaluate the sum.

    Returns (estimate, alpha_hat, max_weight).
    """
    treated = a == 1
    control = ~treated
    pi_star = _calibrate_probability(pi, a)
    one_minus_pi_star = _calibrate_probability(1.0 - pi, 1 - a)
    eta_star = _calibrate_probability(eta, s)
    m1_star = _calibrate_outcome(m1, y, treated)
    m0_star = _calibrate_outcome(m0, y, control)

    in_v = v == target_v
    ind_vs = in_v & (s == 1)
    alpha_hat = float(np.mean(ind_vs))
    if alpha_hat == 0.0:
        raise InsufficientDataError(f"no trial units in subgroup v={target_v}")
    w1 = eta_star / pi_star
    w0 = eta_star / one_minus_pi_star
    ind1 = in_v & treated
    ind0 = in_v & control
    core = (
        np.where(ind1, w1 * (y - m1_star), 0.0)
        - np.where(ind0, w0 * (y - m0_star), 0.0)
        + np.where(ind_vs, m1_star - m0_star, 0.0)
    )
    estimate = float(np.mean(core) / alpha_hat)
    applied = np.concatenate([w1[ind1], w0[ind0]])
    max_weight = float(np.max(applied)) if applied.size else 0.0
    return estimate, alpha_hat, max_weight


def estimate_cdml(data, target, seed=0, forest_params=None, prop_ridge=0.0,
                  bootstrap=None, raw_fits=None,
                  outcome_features=None, prop_features=None):
    """Full calibrated pipeline with bootstrap-based Wald inference."""
    if raw_fits is None:
        raw_fits = fit_cdml_raw(data, seed=seed, forest_params=forest_params,
                                prop_ridge=prop_ridge,
                                outcome_features=outcome_features,
                                prop_features=prop_features)
    estimate, alpha_hat, max_weight = estimate_from_raw(
        y=data.y, a=data.a, s=data.s, v=data.v, target_v=target.v,
        m1=raw_fits.m1, m0=raw_fits.m0, pi=raw_fits.pi, eta=raw_fits.eta,
    )
    cfg = bootstrap or BootstrapConfig(B=500, seed=seed + 1)
    se = bootstrap_cdml_se(data, target, raw_fits, cfg)
    ci_low, ci_high, p = wald_summary(estimate, se)
    return EstimateReport(
        estimate=estimate, se=se, ci_low=ci_low, ci_high=ci_high, p_value=p,
        alpha_hat=alpha_hat, max_weight=max_weight, method_id="cdml",
    )
