"""Aggregation of per-replication results into a metrics table.

Metrics per (scenario, method, subgroup) cell: power (fraction of
replications rejecting the zero-effect null at p < 0.05), mean absolute
bias, sample variance of the estimates, mse = variance + squared mean
bias, coverage of the 95% interval, mean standard error, the number of
replications used and the number that failed. Failed replications are
excluded from the moments but counted, so blow-ups stay auditable.
"""

from dataclasses import dataclass, field

import numpy as np

from satett.errors import EmptyInputError

METRIC_FIELDS = (
    "power", "mean_abs_bias", "variance", "mse", "coverage", "mean_se",
    "reps_used", "failures",
)


@dataclass
class MetricsTable:
    """Aggregated metrics keyed by (scenario, method, subgroup, cell)."""

    rows: list = field(default_factory=list)

    def row_for(self, method, subgroup, cell=None):
        for row in self.rows:
            if row["method"] == method and row["subgroup"] == subgroup:
                if cell is None or row.get("cell") == cell:
                    return row
        return None


def _is_failed(row):
    est = row.get("estimate")
    return est is None or not np.isfinite(est)


def _cell_key(row):
    # a cell is a grid point within a scenario: external size for the
    # power study, the misspecification setting otherwise (carried as
    # an optional "cell" entry on the row)
    return row.get("cell", row.get("n_ext"))


def aggregate_metrics(rows, truth=None):
    """Collapse per-replication rows into one metrics row per cell.

    `truth` optionally overrides the per-row truth values; by default
    the truth recorded on each row is used. A cell where every
    replication failed is emitted with reps_used = 0 and null metrics.
    """
    rows = list(rows)
    if not rows:
        raise EmptyInputError("no replication rows to aggregate")
    keys = []
    groups = {}
    for row in rows:
        key = (row["scenario"], row["method"], row["subgroup"], _cell_key(row))
        if key not in groups:
            groups[key] = []
            keys.append(key)
        groups[key].append(row)

    table = MetricsTable()
    for key in keys:
        scenario, method, subgroup, cell = key
        group = groups[key]
        ok = [r for r in group if not _is_failed(r)]
        failures = len(group) - len(ok)
        out = {
            "scenario": scenario,
            "method": method,
            "subgroup": subgroup,
            "cell": cell,
            "reps_used": len(ok),
            "failures": failures,
        }
        if not ok:
            out.update({f: None for f in METRIC_FIELDS if f not in out})
            table.rows.append(out)
            continue
        est = np.array([r["estimate"] for r in ok], dtype=float)
        se = np.array([r["se"] for r in ok], dtype=float)
        pval = np.array([r["p_value"] for r in ok], dtype=float)
        cov = np.array([r["covered"] for r in ok], dtype=float)
        if truth is not None:
            t = float(truth[subgroup]) if isinstance(truth, dict) else float(truth)
            tvec = np.full(est.shape, t)
        else:
            tvec = np.array([r["truth"] for r in ok], dtype=float)
        bias = est - tvec
        variance = float(np.var(est, ddof=1)) if est.size > 1 else 0.0
        out.update(
            power=float(np.mean(pval < 0.05)),
            mean_abs_bias=float(np.mean(np.abs(bias))),
            variance=variance,
            mse=variance + float(np.mean(bias)) ** 2,
            coverage=float(np.mean(cov)),
            mean_se=float(np.mean(se)),
        )
        table.rows.append(out)
    return table
