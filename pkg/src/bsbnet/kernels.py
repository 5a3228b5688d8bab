"""Backend selection for the hot loops.

The numba backend is used when numba imports and ``BSBNET_DISABLE_NUMBA``
is unset (or set to ``0``/``false``). Both backends expose the same
functions with the same signatures; :func:`get_backend` returns either one
explicitly for tests and benchmarks.
"""
import os

from . import _kernels_numpy

_FALSEY = {"", "0", "false", "no", "off"}


def numba_disabled():
    return os.environ.get("BSBNET_DISABLE_NUMBA", "").strip().lower() not in _FALSEY


def get_backend(name):
    """Return the kernel module for ``"numba"`` or ``"numpy"``."""
    if name == "numpy":
        return _kernels_numpy
    if name == "numba":
        from . import _kernels_numba

        return _kernels_numba
    raise ValueError(f"unknown backend {name!r}")


def _select():
    if numba_disabled():
        return "numpy", _kernels_numpy
    try:
        return "numba", get_backend("numba")
    except ImportError:
        return "numpy", _kernels_numpy


BACKEND, impl = _select()

CONVERGED = impl.CONVERGED
MAX_ITERS = impl.MAX_ITERS
DIVERGED = impl.DIVERGED
UNCONVERGED_CODE = impl.UNCONVERGED_CODE
NONSATURATED_CODE = impl.NONSATURATED_CODE
DIVERGED_CODE = impl.DIVERGED_CODE
