"""Selects the feasibility kernel implementation at import time.

The compiled extension is preferred when it imported cleanly; the pure
Python kernel is always available as a fallback.  Set HORNSAFE_KERNEL
to "pure" or "compiled" to force a backend (forcing "compiled" raises
if the extension is not built).
"""

from __future__ import annotations

import os

from hornsafe.lra._simplex_py import REL_EQ, REL_LE, REL_LT

_choice = os.environ.get("HORNSAFE_KERNEL", "").strip().lower()

if _choice in ("pure", "py", "python"):
    from hornsafe.lra import _simplex_py as _impl
elif _choice in ("compiled", "cy", "cython", "c"):
    from hornsafe.lra import _simplex_cy as _impl  # type: ignore[no-redef]
elif _choice:
    raise ValueError(f"HORNSAFE_KERNEL must be 'pure' or 'compiled', not {_choice!r}")
else:
    try:
        from hornsafe.lra import _simplex_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        from hornsafe.lra import _simplex_py as _impl

simplex_feasible = _impl.simplex_feasible


def backend_name() -> str:
    """Which kernel is active: 'compiled' or 'pure'."""
    return "compiled" if _impl.__name__.endswith("_simplex_cy") else "pure"


__all__ = ["simplex_feasible", "backend_name", "REL_LE", "REL_LT", "REL_EQ"]
