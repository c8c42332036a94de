"""Selects the evaluation kernel at import time.

The compiled ``_kernel_c`` extension is preferred; ``POLEGAMMA_PURE_PYTHON=1``
forces the pure-Python kernel. Every kernel that imports is listed in
``available`` regardless of the selection.
"""

import os

from . import _kernel_py

available = {"python": _kernel_py}
try:
    from . import _kernel_c
except ImportError:
    pass
else:
    available["cython"] = _kernel_c

name = "python" if os.environ.get("POLEGAMMA_PURE_PYTHON") or "cython" not in available else "cython"
kernel = available[name]
