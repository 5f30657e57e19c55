"""Backend selection for the state-vector kernels.

The compiled module is used when it was built; otherwise the numpy fallback
is loaded. Set ``EPRQSS_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("EPRQSS_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

apply_1q = _impl.apply_1q
apply_2q = _impl.apply_2q
qubit_probs = _impl.qubit_probs
project_qubit = _impl.project_qubit
pair_probs = _impl.pair_probs
project_pair = _impl.project_pair
