"""Kernel backend selection.

The environment variable ``MTLIMITS_BACKEND`` picks the implementation:

* ``numba`` - compiled per-trial kernels (default when numba imports),
* ``numpy`` - pure-numpy vectorized fallback,
* ``auto``  - numba if available, else numpy.

Both backends produce bit-identical outputs; the benchmark script under
``benchmarks/`` compares their speed.
"""

from __future__ import annotations

import os
import warnings

from ..errors import DomainError

ENV_VAR = "MTLIMITS_BACKEND"

_numba_error = None
try:
    from . import kernels_numba as _numba_kernels
except ImportError as exc:  # pragma: no cover - exercised only without numba
    _numba_kernels = None
    _numba_error = exc

from . import kernels_numpy as _numpy_kernels


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if _numba_kernels is not None else ("numpy",)


def get_backend(name: str | None = None):
    """Resolve a kernel module from an explicit name or the environment."""
    name = (name or os.environ.get(ENV_VAR, "auto")).lower()
    if name == "auto":
        return _numba_kernels if _numba_kernels is not None else _numpy_kernels
    if name == "numpy":
        return _numpy_kernels
    if name == "numba":
        if _numba_kernels is None:
            warnings.warn(
                f"numba backend requested but unavailable ({_numba_error}); using numpy",
                RuntimeWarning, stacklevel=2)
            return _numpy_kernels
        return _numba_kernels
    raise DomainError(f"unknown backend {name!r}; choose numba, numpy or auto")
