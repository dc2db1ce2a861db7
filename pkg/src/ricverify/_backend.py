"""Pick the compiled kernels when available.

Set ``RICVERIFY_PURE_PYTHON=1`` to force the numpy fallback (used by the
benchmark and by the backend-equivalence tests).
"""
import os

from . import _kernels_py

python_kernels = _kernels_py

try:
    from . import _kernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

if compiled_kernels is not None and os.environ.get("RICVERIFY_PURE_PYTHON", "") != "1":
    kernels = compiled_kernels
else:
    kernels = _kernels_py

BACKEND = kernels.BACKEND

directional_batch = kernels.directional_batch
min_subset_sum = kernels.min_subset_sum
lhs_grid = kernels.lhs_grid
