"""Selects the compiled trajectory core or the pure-NumPy fallback.

The compiled module is preferred when the build produced it; set
QJUMPS_BACKEND=python or QJUMPS_BACKEND=cython to force a choice.
Both expose the same functions and consume RNG streams identically,
so results agree to floating-point roundoff.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _kernels_ext
except ImportError:
    _kernels_ext = None


def available_backends() -> tuple[str, ...]:
    return ("cython", "python") if _kernels_ext is not None else ("python",)


def get_backend(name: str | None = None):
    """Return the kernel module for `name` (or the environment/default pick)."""
    if name is None:
        name = os.environ.get("QJUMPS_BACKEND")
    if name is None:
        name = "cython" if _kernels_ext is not None else "python"
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _kernels_ext is None:
            raise RuntimeError(
                "compiled backend requested but qjumps._kernels is not built"
            )
        return _kernels_ext
    raise ValueError(f"unknown backend {name!r}; choose from {available_backends()}")
