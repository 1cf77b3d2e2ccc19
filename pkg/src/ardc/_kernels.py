"""Kernel backend selection.

The compiled extension :mod:`ardc._core` is used when it was built and
``ARDC_PURE_PYTHON`` is unset (or ``0``); otherwise the numpy fallback in
:mod:`ardc._kernels_py` is used.
"""

import os

from . import _kernels_py

CONVERGED = _kernels_py.CONVERGED
STALLED = _kernels_py.STALLED
ITER_CAP = _kernels_py.ITER_CAP
DEGENERATE = _kernels_py.DEGENERATE


def _load():
    if os.environ.get("ARDC_PURE_PYTHON", "0") not in ("", "0"):
        return _kernels_py, "python"
    try:
        from . import _core
    except ImportError:
        return _kernels_py, "python"
    return _core, "compiled"


_impl, BACKEND = _load()

defect_loop = _impl.defect_loop
barycentric = _impl.barycentric


def backends():
    """Return ``{name: module}`` for every importable backend."""
    found = {"python": _kernels_py}
    try:
        from . import _core
    except ImportError:
        pass
    else:
        found["compiled"] = _core
    return found
