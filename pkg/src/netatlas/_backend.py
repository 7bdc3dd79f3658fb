"""Kernel backend selection.

Imports the compiled extension when it was built, otherwise the numpy/scipy
fallback.  NETATLAS_PURE_PYTHON=1 forces the fallback (used by the backend
equivalence tests and the benchmark).
"""

import os

from . import _kernels_py

if os.environ.get("NETATLAS_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "compiled" if _impl.COMPILED else "python"
diffusion_round = _impl.diffusion_round
shortest_path_lengths = _impl.shortest_path_lengths
