"""Backend selection for the hot witness kernel.

The compiled Cython kernel is preferred when its extension module built;
otherwise the pure-Python twin takes over with identical semantics.
Setting QRACSIM_PURE_PYTHON=1 forces the fallback (useful for
benchmarking and debugging).
"""

import os

from . import _witness_py

if os.environ.get("QRACSIM_PURE_PYTHON"):
    _impl = _witness_py
else:
    try:
        from . import _witness_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _witness_py

witness_batch = _impl.witness_batch
evaluate_one = _impl.evaluate_one
BACKEND_NAME: str = _impl.BACKEND_NAME
ACCEPTANCE_FLOOR: float = _impl.ACCEPTANCE_FLOOR


def kernel_backend() -> str:
    """Name of the active witness-kernel backend: 'cython' or 'python'."""
    return BACKEND_NAME
