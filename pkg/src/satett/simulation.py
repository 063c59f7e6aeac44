"""Simulation scenarios, the discrete identification oracle, and the
replication harness.

Three data-generating processes are provided:

1. a fixed-size trial (100 units) with a growing external source, where
   the enrollment intercept is solved so the expected trial size stays
   at 100;
2. a small trial (expected 50 of 550 units) whose external source has
   practical positivity violations, kept only when the fitted weight
   ratio exceeds a threshold;
3. a moderate two-source setting where a sine transform of the
   covariate can be substituted into selected nuisance models to study
   misspecification.

All randomness flows through counter-based Philox generators so every
dataset is reproducible from (seed) alone. Replication r of a study
uses the derived key f(base, r) = (base << 32) + r, documented here so
results replicate across runs of this implementation.
"""

import concurrent.futures
import os
from dataclasses import dataclass, field

import numpy as np

from satett.data import PositivityDiagnostics, SubgroupTarget, make_dataset
from satett.errors import ConfigError, DomainError, GenerationError
from satett.estimators import run_method
from satett.learners.logistic import clip_proba, expit, fit_logistic_irls

PPV_THRESHOLD = 50.0
PPV_MAX_ATTEMPTS = 10000
MISSPEC_FLAGS = ("data_treatment", "outcome")

RESULT_COLUMNS = (
    "scenario", "method", "subgroup", "replication", "estimate", "se",
    "ci_low", "ci_high", "p_value", "covered", "truth", "max_weight",
    "n_trial", "n_ext", "seed",
)


def derived_seed(base_seed, r):
    """Splittable seed for replication r: (base << 32) + r.

    Philox accepts keys wider than 64 bits, so distinct (base, r) pairs
    map to distinct streams without collision.
    """
    return (int(base_seed) << 32) + int(r)


def _rng(seed):
    return np.random.Generator(np.random.Philox(key=seed))


@dataclass(frozen=True)
class ScenarioConfig:
    """Settings for one simulation study cell."""

    scenario: int
    n_trial: int = 100
    n_ext: int = 100
    reps: int = 100
    seed: int = 0
    misspec: tuple = ()
    ppv_threshold: float = PPV_THRESHOLD

    def __post_init__(self):
        if self.scenario not in (1, 2, 3):
            raise ConfigError(f"scenario must be 1, 2 or 3, got {self.scenario}")
        if self.reps < 1:
            raise ConfigError("reps must be >= 1")
        if self.n_trial < 1 or self.n_ext < 1:
            raise ConfigError("sample sizes must be >= 1")
        bad = [f for f in self.misspec if f not in MISSPEC_FLAGS]
        if bad:
            raise ConfigError(f"unknown misspecification flags: {bad}")
        if self.misspec and self.scenario != 3:
            raise ConfigError("misspecification flags apply to scenario 3 only")


@dataclass(frozen=True)
class GeneratedData:
    """One simulated dataset with its counterfactuals and truth map."""

    dataset: object
    y0: np.ndarray
    y1: np.ndarray
    truth: dict
    diagnostics: PositivityDiagnostics = None
    feature_views: dict = None


def solve_intercept_C(xtilde, v, target_prop, tol=1e-10):
    """Bisection for the enrollment intercept.

    Finds C in [-50, 50] so that the mean of
    (1 + exp(-C + 0.5 x + 1.2 v))^-1 equals target_prop. The mean is
    strictly increasing in C, so the bracket is valid for any target
    in (0, 1).
    """
    if not 0.0 < target_prop < 1.0:
        raise DomainError(f"target proportion must be in (0,1), got {target_prop}")
    x = np.asarray(xtilde, dtype=float).ravel()
    vv = np.asarray(v, dtype=float).ravel()
    shift = 0.5 * x + 1.2 * vv

    def mean_eta(c):
        return float(np.mean(expit(c - shift)))

    lo, hi = -50.0, 50.0
    f_lo = mean_eta(lo) - target_prop
    f_hi = mean_eta(hi) - target_prop
    if f_lo > 0.0 or f_hi < 0.0:
        raise DomainError("target proportion is not bracketed by C in [-50, 50]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = mean_eta(mid) - target_prop
        if abs(f_mid) <= tol:
            return mid
        if f_mid < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _assemble(rng, x, v, eta, pi_ext):
    """Common steps 3-8: draw S, A, noise, and build counterfactuals."""
    n = x.shape[0]
    s = (rng.random(n) < eta).astype(np.int64)
    a = np.zeros(n, dtype=np.int64)
    trial = s == 1
    a[trial] = (rng.random(int(trial.sum())) < 0.5).astype(np.int64)
    ext = ~trial
    a[ext] = (rng.random(int(ext.sum())) < pi_ext[ext]).astype(np.int64)
    eps = rng.standard_normal(n)
    y0 = 1.5 * x + 0.5 * v + eps
    y1 = y0 + v - 0.5
    y = np.where(a == 1, y1, y0)
    return s, a, y0, y1, y


TRUTH = {1: 0.5, 0: -0.5}


def gen_scenario1(n_ext, seed):
    """Fixed trial of expected size 100 plus an external source of n_ext."""
    rng = _rng(seed)
    n = 100 + int(n_ext)
    x = rng.standard_normal(n)
    v = (rng.random(n) < 0.5).astype(np.int64)
    c = solve_intercept_C(x, v, 100.0 / n)
    eta = expit(c - 0.5 * x - 1.2 * v)
    pi_ext = expit(0.045 - 0.09 * x - 0.09 * v)
    s, a, y0, y1, y = _assemble(rng, x, v, eta, pi_ext)
    data = make_dataset(y, a, s, v, x.reshape(-1, 1), covariate_names=("xtilde",))
    return GeneratedData(data, y0, y1, dict(TRUTH))


def gen_scenario2_ppv(seed, threshold=PPV_THRESHOLD, max_attempts=PPV_MAX_ATTEMPTS):
    """Small trial with positivity violations in the external source.

    Datasets are regenerated from one continuous random stream until a
    draw passes the acceptance check: logistic models for enrollment
    and treatment are fit on the candidate data and the dataset is kept
    only when the largest fitted ratio eta_hat / pi_hat exceeds the
    threshold.
    """
    rng = _rng(seed)
    n = 550
    for _ in range(max_attempts):
        w = rng.standard_normal(n)
        v = (rng.random(n) < 0.5).astype(np.int64)
        eta = np.full(n, 0.0909)
        pi_ext = expit(0.045 - 9.0 * w - 9.0 * v)
        s, a, y0, y1, y = _assemble(rng, w, v, eta, pi_ext)
        design = np.column_stack([w, v.astype(float)])
        eta_fit = fit_logistic_irls(design, s.astype(float))
        pi_fit = fit_logistic_irls(design, a.astype(float))
        eta_hat = eta_fit.predict_proba(design)
        pi_hat = pi_fit.predict_proba(design)
        ratio = eta_hat / pi_hat
        m_star = float(np.max(ratio))
        if m_star > threshold:
            diag = PositivityDiagnostics(
                min_pi=float(np.min(pi_hat)), max_ratio=m_star, pi=pi_hat
            )
            data = make_dataset(
                y, a, s, v, w.reshape(-1, 1), covariate_names=("w",)
            )
            return GeneratedData(data, y0, y1, dict(TRUTH), diagnostics=diag)
    raise GenerationError(
        f"no dataset with max weight ratio > {threshold} in {max_attempts} attempts"
    )


def sine_transform(w):
    """The misspecification transform z = sin(w / (w + 1) + 2)."""
    w = np.asarray(w, dtype=float)
    return np.sin(w / (w + 1.0) + 2.0)


def gen_scenario3_misspec(seed, misspec=()):
    """Two equal sources with optional nuisance-model misspecification.

    The data are always generated from the raw covariate W. The flags
    select which nuisance models are fit on the transformed covariate
    Z = sin(W/(W+1) + 2) instead: "outcome" misspecifies the outcome
    model, "data_treatment" misspecifies the enrollment and treatment
    models. The chosen views are returned in feature_views.
    """
    bad = [f for f in misspec if f not in MISSPEC_FLAGS]
    if bad:
        raise ConfigError(f"unknown misspecification flags: {bad}")
    rng = _rng(seed)
    n = 500
    w = rng.standard_normal(n)
    # w = -1 makes the transform singular; probability zero, redraw if hit
    while np.any(w == -1.0):
        hit = w == -1.0
        w[hit] = rng.standard_normal(int(hit.sum()))
    v = (rng.random(n) < 0.5).astype(np.int64)
    z = sine_transform(w)
    eta = expit(1.0 - 0.5 * w - 1.2 * v)
    pi_ext = expit(0.045 - 0.09 * w - 0.09 * v)
    s, a, y0, y1, y = _assemble(rng, w, v, eta, pi_ext)
    data = make_dataset(y, a, s, v, w.reshape(-1, 1), covariate_names=("w",))
    views = {
        "outcome": z.reshape(-1, 1) if "outcome" in misspec else w.reshape(-1, 1),
        "prop": z.reshape(-1, 1) if "data_treatment" in misspec else w.reshape(-1, 1),
    }
    return GeneratedData(data, y0, y1, dict(TRUTH), feature_views=views)


@dataclass(frozen=True)
class DiscreteDGP:
    """A fully discrete data-generating process on finite supports.

    joint[i, v] is P(X=x_i, V=v); eta[i, v] is P(S=1 | x_i, v);
    pi[i, v, s] is P(A=1 | x_i, v, S=s); mu[a, i, v, s] is
    E[Y(a) | x_i, v, S=s]. Letting mu depend on s deliberately breaks
    the source-exchangeability assumption, which the oracle exposes as
    a gap between the identification formula and the truth.
    """

    x_support: np.ndarray
    joint: np.ndarray
    eta: np.ndarray
    pi: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        joint = np.asarray(self.joint, dtype=float)
        if abs(joint.sum() - 1.0) > 1e-12:
            raise DomainError("joint cell probabilities must sum to 1")


def discrete_identification_oracle(dgp, v):
    """Brute-force check of the identification formula on a finite DGP.

    Returns (truth, formula) where truth is the counterfactual contrast
    E[Y(1) - Y(0) | V=v, S=1] computed directly from the potential
    outcome means, and formula is the observed-data expression
    E_{x | v, S=1}[ E[Y | A=1, x, v] - E[Y | A=0, x, v] ] where the
    inner expectations pool both sources. The two agree whenever the
    exchangeability and positivity assumptions hold by construction.
    """
    joint = np.asarray(dgp.joint, dtype=float)
    eta = np.asarray(dgp.eta, dtype=float)
    pi = np.asarray(dgp.pi, dtype=float)
    mu = np.asarray(dgp.mu, dtype=float)
    nx = joint.shape[0]

    # P(x, v, S=1) over x for this v
    p_x_s1 = joint[:, v] * eta[:, v]
    denom = p_x_s1.sum()
    if denom <= 0.0:
        raise DomainError(f"subgroup cell (V={v}, S=1) has probability zero")
    w_x = p_x_s1 / denom

    truth = float(np.sum(w_x * (mu[1, :, v, 1] - mu[0, :, v, 1])))

    formula = 0.0
    for i in range(nx):
        if w_x[i] == 0.0:
            continue
        contrast = 0.0
        for arm in (1, 0):
            # P(A=arm, S=s | x, v) for s in {0, 1}
            p_arm_s1 = eta[i, v] * (pi[i, v, 1] if arm == 1 else 1.0 - pi[i, v, 1])
            p_arm_s0 = (1.0 - eta[i, v]) * (
                pi[i, v, 0] if arm == 1 else 1.0 - pi[i, v, 0]
            )
            p_arm = p_arm_s1 + p_arm_s0
            if p_arm <= 0.0:
                raise DomainError(
                    f"positivity violation: P(A={arm} | x={dgp.x_support[i]}, "
                    f"V={v}) = 0"
                )
            mean_y = (
                p_arm_s1 * mu[arm, i, v, 1] + p_arm_s0 * mu[arm, i, v, 0]
            ) / p_arm
            contrast += mean_y if arm == 1 else -mean_y
        formula += w_x[i] * contrast
    return truth, float(formula)


def sample_discrete(dgp, n, seed):
    """Draw n units from a DiscreteDGP; outcomes equal their cell means."""
    rng = _rng(seed)
    joint = np.asarray(dgp.joint, dtype=float)
    nx, nv = joint.shape
    flat = joint.ravel()
    cells = rng.choice(nx * nv, size=n, p=flat / flat.sum())
    xi, v = np.divmod(cells, nv)
    s = (rng.random(n) < dgp.eta[xi, v]).astype(np.int64)
    a = (rng.random(n) < dgp.pi[xi, v, s]).astype(np.int64)
    y = dgp.mu[a, xi, v, s]
    x = np.asarray(dgp.x_support, dtype=float)[xi]
    return make_dataset(y, a, s, v, x.reshape(-1, 1), covariate_names=("x",))


def _generate(cfg, seed):
    if cfg.scenario == 1:
        return gen_scenario1(cfg.n_ext, seed)
    if cfg.scenario == 2:
        return gen_scenario2_ppv(seed, threshold=cfg.ppv_threshold)
    return gen_scenario3_misspec(seed, misspec=cfg.misspec)


def _worker_count():
    raw = os.environ.get("SATETT_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def _replication_rows(cfg, methods, r, options=None):
    seed = derived_seed(cfg.seed, r)
    gen = _generate(cfg, seed)
    rows = []
    opts = dict(options or {})
    if gen.feature_views is not None:
        opts.setdefault("outcome_features", gen.feature_views["outcome"])
        opts.setdefault("prop_features", gen.feature_views["prop"])
    n_trial = int(np.sum(gen.dataset.s == 1))
    n_ext = int(np.sum(gen.dataset.s == 0))
    for method in methods:
        for v in (0, 1):
            truth = gen.truth[v]
            row = {
                "scenario": cfg.scenario,
                "method": method,
                "subgroup": v,
                "replication": r,
                "truth": truth,
                "n_trial": n_trial,
                "n_ext": n_ext,
                "seed": seed,
            }
            try:
                rep = run_method(
                    method, gen.dataset, SubgroupTarget(v=v), seed=seed,
                    options=opts,
                )
                row.update(
                    estimate=rep.estimate, se=rep.se, ci_low=rep.ci_low,
                    ci_high=rep.ci_high, p_value=rep.p_value,
                    covered=int(rep.ci_low <= truth <= rep.ci_high),
                    max_weight=rep.max_weight,
                )
            except Exception as exc:  # failed cell, run continues
                row.update(
                    estimate=None, se=None, ci_low=None, ci_high=None,
                    p_value=None, covered=None, max_weight=None,
                    error=f"{type(exc).__name__}: {exc}",
                )
            rows.append(row)
    return rows


@dataclass
class ScenarioResult:
    """Per-replication rows for one study cell."""

    config: ScenarioConfig
    methods: tuple
    rows: list = field(default_factory=list)


def run_replications(cfg, methods, options=None):
    """Run every method on every replication of a scenario.

    Replications are independent; when SATETT_THREADS is set above 1
    they are fanned out to a thread pool and reassembled in replication
    order, so output is deterministic either way. A method failure on
    one replication is recorded as a failed cell, never a run abort.
    """
    methods = tuple(methods)
    workers = _worker_count()
    result = ScenarioResult(config=cfg, methods=methods)
    if workers == 1:
        for r in range(cfg.reps):
            result.rows.extend(_replication_rows(cfg, methods, r, options))
        return result
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_replication_rows, cfg, methods, r, options)
            for r in range(cfg.reps)
        ]
        for fut in futures:
            result.rows.extend(fut.result())
    return result
