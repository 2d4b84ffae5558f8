"""Kernel selection: the compiled extension when built, else pure Python.

Set ``MUFORGE_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("MUFORGE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

ODD = _pykernels.ODD
maxcomb = _impl.maxcomb
identity = _impl.identity
compose = _impl.compose
union = _impl.union
step = _impl.step
has_mu_trace = _impl.has_mu_trace
