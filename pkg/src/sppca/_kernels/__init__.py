"""Hot kernels, compiled when available.

The Cython extension ``_ckernels`` is used if it imports; otherwise the
numpy fallback in ``_pykernels`` is selected.  Set ``SPPCA_PURE_PYTHON=1``
to force the fallback.
"""

import os

from . import _pykernels as python_backend

try:
    if os.environ.get("SPPCA_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python backend forced")
    from . import _ckernels as compiled_backend
except ImportError:
    compiled_backend = None

backend = compiled_backend if compiled_backend is not None else python_backend
BACKEND_NAME = "cython" if compiled_backend is not None else "python"

__all__ = ["backend", "BACKEND_NAME", "compiled_backend", "python_backend"]
