"""Standard errors, Wald intervals/tests, and the calibrated-estimator bootstrap."""

import math
from dataclasses import dataclass

import numpy as np

from satett.errors import GenerationError, InsufficientDataError

# z quantile at 0.975, hard-coded so the contract has no library dependency
Z_975 = 1.959963984540054


@dataclass(frozen=True)
class EifContributions:
    """Per-unit estimated influence-function evaluations at the point estimate."""

    values: np.ndarray

    @property
    def n(self):
        return len(self.values)


@dataclass(frozen=True)
class BootstrapConfig:
    B: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.B < 2:
            raise ValueError("bootstrap needs B >= 2")


def se_from_eif(contrib):
    """sqrt(sample variance of the contributions / n)."""
    values = contrib.values if isinstance(contrib, EifContributions) else np.asarray(contrib)
    n = len(values)
    if n < 2:
        raise InsufficientDataError("need at least 2 influence contributions")
    return float(np.sqrt(np.var(values, ddof=1) / n))


def _norm_cdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def wald_summary(estimate, se, level=0.95):
    """(ci_low, ci_high, p_value) for H0: parameter = 0."""
    if se < 0:
        raise ValueError("se must be nonnegative")
    if level != 0.95:
        raise NotImplementedError("only the 95% level is supported")
    ci_low = estimate - Z_975 * se
    ci_high = estimate + Z_975 * se
    if se == 0.0:
        p = 1.0 if estimate == 0.0 else 0.0
    else:
        p = 2.0 * (1.0 - _norm_cdf(abs(estimate) / se))
    return ci_low, ci_high, p


def bootstrap_cdml_se(data, target, raw_fits, cfg):
    """Bootstrap SE for the calibrated estimator.

    The raw (uncalibrated) model predictions in `raw_fits` are frozen:
    each replicate resamples rows with replacement and reruns only the
    calibration and estimation steps. Replicates with an empty trial
    subgroup arm are redrawn, up to 10*B total draws.
    """
    from satett.estimators.cdml import estimate_from_raw  # local import, avoids cycle

    rng = np.random.Generator(np.random.Philox(key=cfg.seed))
    n = data.n
    trial_v = (data.s == 1) & (data.v == target.v)
    estimates = np.empty(cfg.B)
    draws = 0
    got = 0
    max_draws = 10 * cfg.B
    while got < cfg.B:
        if draws >= max_draws:
            raise GenerationError(
                f"exceeded {max_draws} bootstrap draws without {cfg.B} valid replicates"
            )
        idx = rng.integers(0, n, size=n)
        draws += 1
        tv = trial_v[idx]
        if not (np.any(tv & (data.a[idx] == 1)) and np.any(tv & (data.a[idx] == 0))):
            continue
        estimates[got] = estimate_from_raw(
            y=data.y[idx],
            a=data.a[idx],
            s=data.s[idx],
            v=data.v[idx],
            target_v=target.v,
            m1=raw_fits.m1[idx],
            m0=raw_fits.m0[idx],
            pi=raw_fits.pi[idx],
            eta=raw_fits.eta[idx],
        )[0]
        got += 1
    return float(np.std(estimates, ddof=1))
