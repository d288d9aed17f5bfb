"""Kernel backend selection.

The hot kernels (word-tree folds, branch-and-bound norm search, the chaos
game) exist twice: a Cython extension (``_core``) and a pure-Python twin
(``pure``) with bit-identical arithmetic.  The compiled core is preferred
when importable; set FDL_BACKEND=pure or FDL_BACKEND=compiled to force the
choice (the latter raises if the extension is missing).
"""

from __future__ import annotations

import os

from . import pure

_FORCED = os.environ.get("FDL_BACKEND", "").strip().lower()

if _FORCED == "pure":
    active = pure
elif _FORCED in {"compiled", "core", "cython"}:
    from . import _core as active  # noqa: F401  (ImportError is the signal)
else:
    try:
        from . import _core as active
    except ImportError:
        active = pure


def backend_name() -> str:
    return active.NAME


def have_compiled() -> bool:
    try:
        from . import _core  # noqa: F401
        return True
    except ImportError:
        return False


def get_backend(name: str | None = None):
    """Return a kernel module by name ('pure' or 'compiled'); default active."""
    if name is None:
        return active
    if name == "pure":
        return pure
    if name in {"compiled", "core", "cython"}:
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")
