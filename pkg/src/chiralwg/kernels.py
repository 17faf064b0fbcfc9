"""Pick the Lindblad kernel backend at import time.

The compiled extension is used when it was built; setting
``CHIRALWG_PURE_PYTHON=1`` forces the NumPy fallback.
"""
import os

from . import _core_py

try:
    from . import _core as _compiled
except ImportError:  # extension not built
    _compiled = None


def available_backends():
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "compiled")
    return names


def get_backend(name=None):
    """Return the kernel module for `name` ('compiled' or 'python')."""
    if name is None:
        return active
    if name == "python":
        return _core_py
    if name == "compiled":
        if _compiled is None:
            raise ImportError("the compiled kernel is not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


if os.environ.get("CHIRALWG_PURE_PYTHON") or _compiled is None:
    active = _core_py
else:
    active = _compiled

BACKEND = active.BACKEND
