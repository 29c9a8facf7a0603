"""Backend selection for the hot loops.

Set ``PILOTSCATTER_NO_NUMBA=1`` to force the pure-numpy paths even when numba
is importable. The choice is made once, at import time.
"""

import os
from typing import Any, Callable

_DISABLED = os.environ.get("PILOTSCATTER_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError("numba disabled by PILOTSCATTER_NO_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args: Any, **_: Any) -> Callable:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


BACKEND = "numba" if HAS_NUMBA else "numpy"
