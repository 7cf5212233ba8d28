"""Selects the compiled kernel extension when available.

Set ``NOISEREG_PURE_PYTHON=1`` to force the numpy fallback (used by the
benchmark and by tests that compare the two implementations).
"""

import os

if os.environ.get("NOISEREG_PURE_PYTHON"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels_cy as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

BACKEND = kernels.BACKEND_NAME

simplex_solve = kernels.simplex_solve
cd_lasso = kernels.cd_lasso

# the stagewise loop is dominated by a dense correlation recompute per step,
# where the BLAS-backed numpy implementation beats the scalar compiled loop
# at every measured size (see benchmarks/bench_kernels.py), so it always
# dispatches to the fallback
from . import _kernels_py as _py  # noqa: E402

fs_loop = _py.fs_loop

OPTIMAL = kernels.OPTIMAL
INFEASIBLE = kernels.INFEASIBLE
UNBOUNDED = kernels.UNBOUNDED
MAXITER = kernels.MAXITER
