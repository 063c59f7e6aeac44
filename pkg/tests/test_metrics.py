import numpy as np
import pytest

from satett.errors import EmptyInputError
from satett.metrics import aggregate_metrics


def rng(seed):
    return np.random.Generator(np.random.Philox(key=seed))


def _row(estimate, se, truth, p_value, covered, method="m", subgroup=1,
         scenario=1, replication=0):
    return {
        "scenario": scenario, "method": method, "subgroup": subgroup,
        "replication": replication, "estimate": estimate, "se": se,
        "p_value": p_value, "covered": covered, "truth": truth,
        "n_ext": 100,
    }


def test_all_estimates_equal_truth():
    rows = [_row(0.5, 0.1, 0.5, 0.01, 1, replication=r) for r in range(10)]
    table = aggregate_metrics(rows)
    row = table.rows[0]
    assert row["mean_abs_bias"] == 0.0
    assert row["variance"] == 0.0
    assert row["coverage"] == 1.0
    assert row["power"] == 1.0
    assert row["mse"] == 0.0


def test_hand_arithmetic_two_estimates():
    rows = [
        _row(0.0, 1.0, 0.5, 0.5, 1, replication=0),
        _row(1.0, 1.0, 0.5, 0.5, 1, replication=1),
    ]
    row = aggregate_metrics(rows).rows[0]
    assert row["variance"] == pytest.approx(0.5)
    assert row["mean_abs_bias"] == pytest.approx(0.5)
    assert row["coverage"] == 1.0
    assert row["mse"] == pytest.approx(0.5)  # mean bias is zero
    assert row["power"] == 0.0


def test_failures_counted_and_excluded():
    rows = [
        _row(0.4, 0.1, 0.5, 0.01, 1, replication=0),
        _row(None, None, 0.5, None, None, replication=1),
        _row(0.6, 0.1, 0.5, 0.01, 1, replication=2),
    ]
    row = aggregate_metrics(rows).rows[0]
    assert row["reps_used"] == 2
    assert row["failures"] == 1
    assert row["mean_abs_bias"] == pytest.approx(0.1)


def test_all_failed_cell_has_null_metrics():
    rows = [_row(None, None, 0.5, None, None, replication=r) for r in range(3)]
    row = aggregate_metrics(rows).rows[0]
    assert row["reps_used"] == 0
    assert row["failures"] == 3
    assert row["power"] is None
    assert row["mse"] is None


def test_empty_input_raises():
    with pytest.raises(EmptyInputError):
        aggregate_metrics([])


def test_against_streaming_oracle():
    g = rng(8)
    truth = 0.5
    rows = []
    # streaming accumulators
    n = 0
    mean = 0.0
    m2 = 0.0
    abs_sum = 0.0
    cov_sum = 0
    pow_sum = 0
    se_sum = 0.0
    for r in range(1000):
        est = float(g.standard_normal() + truth)
        se = float(g.uniform(0.1, 1.0))
        p = float(g.random())
        covered = int(abs(est - truth) < 1.96 * se)
        rows.append(_row(est, se, truth, p, covered, replication=r))
        n += 1
        delta = est - mean
        mean += delta / n
        m2 += delta * (est - mean)
        abs_sum += abs(est - truth)
        cov_sum += covered
        pow_sum += p < 0.05
        se_sum += se
    row = aggregate_metrics(rows).rows[0]
    var = m2 / (n - 1)
    assert abs(row["variance"] - var) <= 1e-12
    assert abs(row["mean_abs_bias"] - abs_sum / n) <= 1e-12
    assert abs(row["mse"] - (var + (mean - truth) ** 2)) <= 1e-12
    assert abs(row["coverage"] - cov_sum / n) <= 1e-12
    assert abs(row["power"] - pow_sum / n) <= 1e-12
    assert abs(row["mean_se"] - se_sum / n) <= 1e-12


def test_mse_identity_holds_per_cell():
    g = rng(9)
    rows = []
    for method in ("a", "b"):
        for r in range(50):
            est = float(g.standard_normal())
            rows.append(_row(est, 1.0, 0.3, 0.5, 1, method=method,
                             replication=r))
    for row in aggregate_metrics(rows).rows:
        est = [r["estimate"] for r in rows if r["method"] == row["method"]]
        bias = np.mean(est) - 0.3
        assert abs(row["mse"] - (row["variance"] + bias ** 2)) <= 1e-12
