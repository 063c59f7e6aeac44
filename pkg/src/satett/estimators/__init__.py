"""Estimator registry and dispatch.

`run_method` is the single entry point used by the simulation harness
and the CLI: it maps a method id to its estimator pipeline with the
documented default learner configuration.
"""

from satett.errors import ConfigError, OutOfScopeError
from satett.estimators.cdml import estimate_cdml, estimate_from_raw, fit_cdml_raw
from satett.estimators.core import (
    EstimateReport,
    NuisanceFits,
    estimate_cov_adj,
    estimate_dr,
    estimate_naive,
    fit_nuisances,
)
from satett.estimators.covbal import (
    BalanceProblem,
    BalanceWeights,
    build_balance_problem,
    estimate_covbal,
    fit_balance_nuisances,
    solve_balance_weights,
)
from satett.estimators.riesz import RieszFit, estimate_autodml, fit_riesz

METHOD_IDS = ("naive", "cov-adj", "dr-glm", "dr-ranger", "covbal", "riesz", "cdml")
OUT_OF_SCOPE_IDS = ("dr-bart", "dr-bayglm")


def run_method(method, data, target, seed=0, options=None):
    """Run one estimator; returns an EstimateReport.

    `options` may carry `lambda`, `ridge`, `bootstrap_b`, `forest`, and
    the misspecification views `outcome_features` / `prop_features`
    (arrays substituted for the covariates in the outcome model and in
    the treatment/selection models respectively).
    """
    opts = options or {}
    out_feat = opts.get("outcome_features")
    prop_feat = opts.get("prop_features")
    if method == "naive":
        return estimate_naive(data, target)
    if method == "cov-adj":
        return estimate_cov_adj(
            data, target,
            outcome_features=out_feat, prop_features=prop_feat,
            ridge=opts.get("ridge", 0.0),
        )
    if method in ("dr-glm", "dr-ranger"):
        learner = "ols" if method == "dr-glm" else "forest"
        prop = "logistic" if method == "dr-glm" else "forest"
        # with no external rows the selection model is degenerate; fall
        # back to eta = 1, which reduces this estimator to cov-adj
        selection = prop if (data.s == 0).any() else "one"
        fits = fit_nuisances(
            data, outcome=learner, propensity=prop, selection=selection,
            pooled=True, seed=seed,
            ridge=opts.get("ridge", 0.0),
            outcome_features=out_feat, prop_features=prop_feat,
            forest_params=opts.get("forest"),
        )
        return estimate_dr(data, target, fits, method_id=method)
    if method == "covbal":
        fits, kcfg1, kcfg0 = fit_balance_nuisances(data, covariates=out_feat)
        problem = build_balance_problem(
            data, target, kcfg1, kcfg0,
            lam=opts.get("lambda", 0.01), covariates=prop_feat,
        )
        weights = solve_balance_weights(problem)
        return estimate_covbal(data, target, weights, fits)
    if method == "riesz":
        fits = fit_nuisances(
            data, outcome="ols", pooled=True, seed=seed,
            outcome_features=out_feat,
        )
        rfit = fit_riesz(data, target, ridge=opts.get("ridge", 1e-4),
                         covariates=prop_feat)
        return estimate_autodml(data, target, rfit, fits)
    if method == "cdml":
        from satett.inference import BootstrapConfig

        boot = BootstrapConfig(B=opts.get("bootstrap_b", 500), seed=seed + 1)
        return estimate_cdml(
            data, target, seed=seed, forest_params=opts.get("forest"),
            bootstrap=boot,
            outcome_features=out_feat, prop_features=prop_feat,
        )
    if method in OUT_OF_SCOPE_IDS:
        raise OutOfScopeError(
            f"method '{method}' (Bayesian nuisance learners) is out of scope"
        )
    raise ConfigError(f"unknown method '{method}'; valid ids: {', '.join(METHOD_IDS)}")


__all__ = [
    "METHOD_IDS",
    "OUT_OF_SCOPE_IDS",
    "run_method",
    "EstimateReport",
    "NuisanceFits",
    "estimate_naive",
    "estimate_cov_adj",
    "estimate_dr",
    "fit_nuisances",
    "BalanceProblem",
    "BalanceWeights",
    "build_balance_problem",
    "solve_balance_weights",
    "estimate_covbal",
    "fit_balance_nuisances",
    "RieszFit",
    "fit_riesz",
    "estimate_autodml",
    "estimate_cdml",
    "estimate_from_raw",
    "fit_cdml_raw",
]
