import os
import subprocess
import sys

import numpy as np
import pytest

from satett._accel import numpy_impl

numba_impl = pytest.importorskip("satett._accel.numba_impl")


def rng(seed):
    return np.random.Generator(np.random.Philox(key=seed))


def test_apg_qp_paths_agree():
    g = rng(70)
    A = g.standard_normal((30, 30))
    Q = A @ A.T / 30 + 0.1 * np.eye(30)
    c = g.standard_normal(30)
    L = float(np.linalg.eigvalsh(Q)[-1])
    step = 1.0 / (2.0 * 1.02 * L)
    x_np, f_np, k_np, _ = numpy_impl.apg_qp(Q, c, np.zeros(30), step, 1e-10, 50000)
    x_nb, f_nb, k_nb, _ = numba_impl.apg_qp(Q, c, np.zeros(30), step, 1e-10, 50000)
    np.testing.assert_allclose(x_np, x_nb, atol=1e-8)
    assert k_np <= 1e-10 and k_nb <= 1e-10


def test_pav_paths_agree():
    g = rng(71)
    values = g.standard_normal(500)
    weights = g.uniform(0.5, 2.0, size=500)
    np.testing.assert_allclose(
        numpy_impl.pav(values, weights), numba_impl.pav(values, weights),
        atol=1e-12,
    )


def test_scan_split_paths_agree():
    g = rng(72)
    x = np.sort(g.standard_normal(300))
    y = g.standard_normal(300)
    pos_np, sse_np = numpy_impl.scan_split(x, y, 5)
    pos_nb, sse_nb = numba_impl.scan_split(x, y, 5)
    assert pos_np == pos_nb
    assert abs(sse_np - sse_nb) <= 1e-8


def test_env_flag_selects_numpy_path():
    env = dict(os.environ, SATETT_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "import satett._accel as a; print(a.USING_NUMBA)"],
        capture_output=True, text=True, env=env,
    )
    assert out.stdout.strip() == "False"
