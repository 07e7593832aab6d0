"""Backend selection for the monodromy kernel.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
numpy fallback in ``_kernels_py`` is imported.  Setting the environment variable
``TRIGBETHE_PURE_PYTHON=1`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
apply_entry = _kernels_py.apply_entry

if os.environ.get("TRIGBETHE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        apply_entry = _ckernels.apply_entry
        BACKEND = "cython"

__all__ = ["apply_entry", "BACKEND"]
