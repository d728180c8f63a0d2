"""Select the inference kernel backend at import time.

The compiled Cython kernels are used when available; otherwise the NumPy
fallback takes over. `COUNTERMACHINE_BACKEND=python|cython` forces a choice
(forcing `cython` raises if the extension is missing). Both backends are
deterministic in isolation; across backends results agree to floating-point
round-off, not bit-exactly.
"""

import os

_requested = os.environ.get("COUNTERMACHINE_BACKEND", "").strip().lower()

if _requested not in ("", "cython", "python"):
    raise ImportError(
        f"COUNTERMACHINE_BACKEND must be 'cython' or 'python', got {_requested!r}"
    )

if _requested == "python":
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        from . import _kernels_py as kernels  # type: ignore[no-redef]

        BACKEND = "python"


def backend_name() -> str:
    """Name of the active kernel backend: 'cython' or 'python'."""
    return BACKEND
