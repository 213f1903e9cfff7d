"""Kernel selection: the compiled extension when importable, else the
pure-Python twin.  Set ``CRSF_BACKEND=python`` to force the fallback."""

import os

from . import _fallback

kernels = _fallback
if os.environ.get("CRSF_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as kernels  # noqa: F811
    except ImportError:  # extension not built
        kernels = _fallback

BACKEND = kernels.BACKEND
