"""Kernel dispatch: numba-compiled hot loops with a pure-numpy fallback.

Set SATETT_NO_NUMBA=1 before import to force the numpy path (useful for
debugging, profiling comparisons, or platforms where numba is absent).
`benchmarks/bench_accel.py` times both paths side by side.
"""

import os

USING_NUMBA = False

if os.environ.get("SATETT_NO_NUMBA", "") not in ("1", "true", "yes"):
    try:
        from satett._accel.numba_impl import (  # noqa: F401
            apg_qp,
            pav,
            qp_kkt_residual,
            scan_split,
            tree_predict,
        )

        USING_NUMBA = True
    except ImportError:
        pass

if not USING_NUMBA:
    from satett._accel.numpy_impl import (  # noqa: F401
        apg_qp,
        pav,
        qp_kkt_residual,
        scan_split,
        tree_predict,
    )
