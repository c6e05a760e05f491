"""Spectrum-kernel selection: compiled extension when available, NumPy
fallback otherwise.

Set ``SQUEEZECOOL_PURE_PYTHON=1`` before import to force the fallback (the
benchmark and the kernel equivalence tests use this to compare backends).
"""

import os

from . import _kernels_py

_impl = None
if os.environ.get("SQUEEZECOOL_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = None
if _impl is None:
    _impl = _kernels_py

spectrum_batch = _impl.spectrum_batch


def backend() -> str:
    """Name of the active kernel backend: "cython" or "numpy"."""
    return "numpy" if _impl is _kernels_py else "cython"
