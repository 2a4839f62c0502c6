"""Kernel backend selection.

The hot numeric loops live in two interchangeable modules:
``_kernels_numba`` (jit-compiled) and ``_kernels_numpy`` (pure numpy).  The
environment variable ``QDCTL_NUMBA`` picks one at first use:

``auto`` (default)
    Use numba when it imports cleanly, otherwise fall back to numpy.
``0`` / ``off`` / ``false`` / ``no`` / ``numpy``
    Force the pure-numpy kernels.
``1`` / ``on`` / ``true`` / ``yes`` / ``require`` / ``numba``
    Require numba; raise if it cannot be imported.

Any other value raises ``ValueError`` so a typo cannot silently select the
wrong backend.
"""
from __future__ import annotations

import os

_kernels = None


_NUMPY_FLAGS = ("0", "off", "false", "no", "numpy")
_NUMBA_FLAGS = ("1", "on", "true", "yes", "require", "numba")


def _load():
    flag = os.environ.get("QDCTL_NUMBA", "auto").strip().lower()
    if flag not in ("auto", "", *_NUMPY_FLAGS, *_NUMBA_FLAGS):
        raise ValueError(
            f"unrecognized QDCTL_NUMBA value {flag!r}: use 'auto', "
            f"one of {'/'.join(_NUMPY_FLAGS)} for numpy, "
            f"or one of {'/'.join(_NUMBA_FLAGS)} for numba"
        )
    if flag in _NUMPY_FLAGS:
        from . import _kernels_numpy

        return _kernels_numpy
    try:
        from . import _kernels_numba

        return _kernels_numba
    except ImportError:
        if flag in _NUMBA_FLAGS:
            raise
        from . import _kernels_numpy

        return _kernels_numpy


def kernels():
    """The active kernel module (resolved once per process)."""
    global _kernels
    if _kernels is None:
        _kernels = _load()
    return _kernels


def backend_name() -> str:
    """Name of the active backend: "numba" or "numpy"."""
    return kernels().BACKEND_NAME
