"""Shared estimator machinery: nuisance fits, the weighted EIF-style sum,
and the naive / covariate-adjustment / external-data estimators."""

from dataclasses import dataclass

import numpy as np

from satett.data import subgroup_masks
from satett.errors import InsufficientDataError
from satett.inference import se_from_eif, wald_summary
from satett.learners import clip_proba, fit_forest, fit_logistic_irls, fit_ols


@dataclass(frozen=True)
class NuisanceFits:
    """Per-unit nuisance predictions over the full dataset.

    m1/m0 are outcome predictions under each arm, pi is the fitted
    treatment probability, eta the fitted trial-membership probability.
    """

    m1: np.ndarray
    m0: np.ndarray
    pi: np.ndarray
    eta: np.ndarray
    learner_id: str
    pooled: bool


@dataclass(frozen=True)
class EstimateReport:
    estimate: float
    se: float
    ci_low: float
    ci_high: float
    p_value: float
    alpha_hat: float
    max_weight: float
    method_id: str
    converged: bool = True


def design_matrix(data, features=None):
    """Learner design: covariates (or an override view) plus the subgroup code."""
    xt = data.xtilde if features is None else np.atleast_2d(np.asarray(features, dtype=float))
    if xt.ndim == 1:
        xt = xt.reshape(-1, 1)
    return np.hstack([xt, data.v.reshape(-1, 1).astype(float)])


def fit_nuisances(
    data,
    outcome="ols",
    propensity="logistic",
    selection="logistic",
    pooled=True,
    ridge=0.0,
    prop_ridge=0.0,
    seed=0,
    outcome_features=None,
    prop_features=None,
    forest_params=None,
):
    """Fit m(a,.), pi, and eta, returning predictions for every unit.

    With pooled=False the fits use trial rows (S=1) only and eta is
    identically 1, which is the covariate-adjustment configuration.
    Separate feature views for the outcome and treatment/selection models
    support the misspecification experiments.
    """
    Xm = design_matrix(data, outcome_features)
    Xp = design_matrix(data, prop_features)
    fit_rows = np.arange(data.n) if pooled else np.where(data.s == 1)[0]
    fp = forest_params or {}

    def outcome_model(arm):
        rows = fit_rows[data.a[fit_rows] == arm]
        if rows.size == 0:
            raise InsufficientDataError(f"no units with a={arm} to fit the outcome model")
        if outcome == "ols":
            return fit_ols(Xm[rows], data.y[rows], ridge=ridge).predict(Xm)
        if outcome == "forest":
            model = fit_forest(Xm[rows], data.y[rows], mode="regression",
                               seed=seed + arm, **fp)
            return model.predict(Xm)
        if outcome == "mean":
            return np.full(data.n, float(np.mean(data.y[rows])))
        raise ValueError(f"unknown outcome learner '{outcome}'")

    def prob_model(labels, kind, tag):
        if kind == "logistic":
            return fit_logistic_irls(Xp[fit_rows], labels[fit_rows],
                                     ridge=prop_ridge).predict_proba(Xp)
        if kind == "forest":
            model = fit_forest(Xp[fit_rows], labels[fit_rows].astype(float),
                               mode="probability", seed=seed + tag, **fp)
            return model.predict(Xp)
        if kind == "empirical":
            return clip_proba(np.full(data.n, float(np.mean(labels[fit_rows]))))
        if kind == "one":
            return np.full(data.n, 1.0)
        raise ValueError(f"unknown probability learner '{kind}'")

    m1 = outcome_model(1)
    m0 = outcome_model(0)
    pi = prob_model(data.a, propensity, 10)
    eta = np.full(data.n, 1.0) if not pooled else prob_model(data.s, selection, 20)
    return NuisanceFits(
        m1=m1, m0=m0, pi=pi, eta=eta,
        learner_id=f"{outcome}/{propensity}/{selection}",
        pooled=pooled,
    )


def weighted_eif_estimate(data, target, w1, w0, m1, m0, method_id,
                          trial_only=False, converged=True, se_override=None):
    """Evaluate the weighted-residual-plus-plugin sum and its EIF-based SE.

    w1/w0 are the per-unit weights applied to treated/control residuals;
    the treated/control indicators also require S=1 when trial_only.
    """
    in_v = data.v == target.v
    ind_vs = in_v & (data.s == 1)
    ind1 = in_v & (data.a == 1)
    ind0 = in_v & (data.a == 0)
    if trial_only:
        ind1 &= data.s == 1
        ind0 &= data.s == 1
    alpha_hat = float(np.mean(ind_vs))
    if alpha_hat == 0.0:
        raise InsufficientDataError(f"no trial units in subgroup v={target.v}")
    r1 = data.y - m1
    r0 = data.y - m0
    plug = np.where(ind_vs, m1 - m0, 0.0)
    core = np.where(ind1, w1 * r1, 0.0) - np.where(ind0, w0 * r0, 0.0) + plug
    estimate = float(np.mean(core) / alpha_hat)
    eif = (core - np.where(ind_vs, estimate, 0.0)) / alpha_hat
    se = se_from_eif(eif) if se_override is None else se_override
    ci_low, ci_high, p = wald_summary(estimate, se)
    applied = np.concatenate([np.abs(w1[ind1]), np.abs(w0[ind0])])
    max_weight = float(np.max(applied)) if applied.size else 0.0
    return EstimateReport(
        estimate=estimate, se=se, ci_low=ci_low, ci_high=ci_high, p_value=p,
        alpha_hat=alpha_hat, max_weight=max_weight, method_id=method_id,
        converged=converged,
    ), eif


def estimate_naive(data, target):
    """Difference in sample means within the trial subgroup."""
    trial_v, _, _ = subgroup_masks(data, target)
    a = data.a[trial_v]
    y = data.y[trial_v]
    y1, y0 = y[a == 1], y[a == 0]
    if len(y1) == 0 or len(y0) == 0:
        raise InsufficientDataError(f"empty arm in trial subgroup v={target.v}")
    estimate = float(np.mean(y1) - np.mean(y0))
    if len(y1) < 2 or len(y0) < 2:
        raise InsufficientDataError("need at least 2 units per arm for the naive SE")
    se = float(np.sqrt(np.var(y1, ddof=1) / len(y1) + np.var(y0, ddof=1) / len(y0)))
    ci_low, ci_high, p = wald_summary(estimate, se)
    alpha_hat = float(len(trial_v)) / data.n
    return EstimateReport(
        estimate=estimate, se=se, ci_low=ci_low, ci_high=ci_high, p_value=p,
        alpha_hat=alpha_hat, max_weight=1.0, method_id="naive",
    )


def estimate_cov_adj(data, target, fits=None, **learner_kwargs):
    """Trial-only doubly robust covariate-adjustment estimator."""
    if fits is None:
        fits = fit_nuisances(data, pooled=False, **learner_kwargs)
    w1 = 1.0 / fits.pi
    w0 = 1.0 / (1.0 - fits.pi)
    report, _ = weighted_eif_estimate(
        data, target, w1, w0, fits.m1, fits.m0, "cov-adj", trial_only=True
    )
    return report


def estimate_dr(data, target, fits, method_id="dr-glm"):
    """External-data doubly robust estimator with inverse-probability ratios."""
    if not fits.pooled:
        raise ValueError("estimate_dr requires pooled nuisance fits")
    w1 = fits.eta / fits.pi
    w0 = fits.eta / (1.0 - fits.pi)
    report, _ = weighted_eif_estimate(
        data, target, w1, w0, fits.m1, fits.m0, method_id
    )
    return report
