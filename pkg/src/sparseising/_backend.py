"""Kernel selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``SPARSEISING_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("SPARSEISING_PURE_PYTHON", "") not in ("", "0"):
    _fast = None
else:
    try:
        from . import _kernels_fast as _fast
    except ImportError:  # extension not built
        _fast = None

kernels = _fast if _fast is not None else _kernels_py
BACKEND = "cython" if _fast is not None else "python"


def get_kernels(name=None):
    """Return a kernel module by name (``"cython"``, ``"python"`` or the default)."""
    if name is None:
        return kernels
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _fast is None:
            raise ImportError("compiled kernels are not available")
        return _fast
    raise ValueError(f"unknown backend {name!r}")
