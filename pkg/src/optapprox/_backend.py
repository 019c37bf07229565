"""Kernel backend selection.

``OPTAPPROX_BACKEND`` may be ``auto`` (default: compiled if importable),
``cython`` (compiled or fail) or ``python`` (always the fallback).
"""

import os

from . import _pykernels

_choice = os.environ.get("OPTAPPROX_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "cython", "python"):
    raise ImportError(f"OPTAPPROX_BACKEND must be auto, cython or python, not {_choice!r}")

if _choice == "python":
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as kernels
        BACKEND = "cython"
    except ImportError:
        if _choice == "cython":
            raise
        kernels = _pykernels
        BACKEND = "python"
