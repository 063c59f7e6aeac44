"""Subgroup treatment effect estimation in a target trial.

Estimates the subgroup-specific average treatment effect among trial
participants, optionally borrowing external data, with a family of
estimators: a naive difference in means, doubly robust covariate
adjustment, an external-data doubly robust estimator, kernel covariate
balancing weights, an automatically learned Riesz representer, and a
calibrated debiased estimator with a bootstrap standard error.
"""

from satett._accel import USING_NUMBA
from satett.data import (
    PositivityDiagnostics,
    SubgroupTarget,
    TrialDataset,
    load_csv,
    make_dataset,
    validate,
    write_csv,
)
from satett.estimators import (
    METHOD_IDS,
    EstimateReport,
    NuisanceFits,
    estimate_autodml,
    estimate_cdml,
    estimate_cov_adj,
    estimate_covbal,
    estimate_dr,
    estimate_naive,
    fit_nuisances,
    fit_riesz,
    run_method,
)
from satett.inference import BootstrapConfig, se_from_eif, wald_summary
from satett.metrics import MetricsTable, aggregate_metrics
from satett.simulation import (
    DiscreteDGP,
    GeneratedData,
    ScenarioConfig,
    ScenarioResult,
    discrete_identification_oracle,
    gen_scenario1,
    gen_scenario2_ppv,
    gen_scenario3_misspec,
    run_replications,
    solve_intercept_C,
)

__version__ = "0.1.0"

__all__ = [
    "USING_NUMBA",
    "__version__",
    "TrialDataset",
    "SubgroupTarget",
    "PositivityDiagnostics",
    "make_dataset",
    "load_csv",
    "write_csv",
    "validate",
    "METHOD_IDS",
    "EstimateReport",
    "NuisanceFits",
    "run_method",
    "fit_nuisances",
    "fit_riesz",
    "estimate_naive",
    "estimate_cov_adj",
    "estimate_dr",
    "estimate_covbal",
    "estimate_autodml",
    "estimate_cdml",
    "BootstrapConfig",
    "se_from_eif",
    "wald_summary",
    "MetricsTable",
    "aggregate_metrics",
    "ScenarioConfig",
    "ScenarioResult",
    "GeneratedData",
    "DiscreteDGP",
    "discrete_identification_oracle",
    "gen_scenario1",
    "gen_scenario2_ppv",
    "gen_scenario3_misspec",
    "run_replications",
    "solve_intercept_C",
]
