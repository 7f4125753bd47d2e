"""Kernel selection.

The compiled extension is used when it imports cleanly; otherwise, or when
``TLBT_PURE_PYTHON=1`` is set, the numpy fallback is used.  ``BACKEND``
names the active choice.
"""
import os

from . import _fallback

if os.environ.get("TLBT_PURE_PYTHON") == "1":
    _impl = _fallback
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _fallback

BACKEND = "cython" if _impl is not _fallback else "python"

lyap_quasitri = _impl.lyap_quasitri
recurrence = _impl.recurrence
