"""Pick the elimination kernel at import time.

The compiled GMP kernel is used when the extension was built; otherwise the
pure-Python kernel. Setting ``INVOLUTE_PURE_PYTHON=1`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _elim_py

echelon_py = _elim_py.echelon

try:
    if os.environ.get("INVOLUTE_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python kernel requested")
    from ._elim_ext import echelon as echelon_ext
except ImportError:
    echelon_ext = None

echelon = echelon_ext if echelon_ext is not None else echelon_py
NAME = "gmp-extension" if echelon_ext is not None else "pure-python"
