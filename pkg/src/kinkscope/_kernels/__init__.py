"""Kink-counting kernels: compiled backend when available, numpy fallback.

Both backends are bit-for-bit interchangeable.  Set ``KINKSCOPE_PURE=1`` to
force the numpy fallback (used by the kernel benchmark and for debugging).
"""

import os

from . import _reference

if os.environ.get("KINKSCOPE_PURE", "0") not in ("", "0"):
    _impl = _reference
    BACKEND = "python"
else:
    try:
        from . import _fast as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _reference
        BACKEND = "python"

count_kinks_batch = _impl.count_kinks_batch
collect_kinks_batch = _impl.collect_kinks_batch


def backend() -> str:
    """Name of the active kernel backend: ``"cython"`` or ``"python"``."""
    return BACKEND
