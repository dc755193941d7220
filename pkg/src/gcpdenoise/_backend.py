"""Kernel backend selection.

The hot kernels exist twice: numba-compiled (_kernels_numba) and pure numpy
(_kernels). The env flag GCPDENOISE_NUMBA picks one:

    auto (default)  use numba when importable, else fall back to numpy
    1 / on / numba  require numba, raise if unavailable
    0 / off / numpy force the pure numpy path

set_backend() switches at runtime (used by tests and the benchmark).
"""

from __future__ import annotations

import os

ENV_VAR = "GCPDENOISE_NUMBA"

_active: str | None = None
_module = None


def _resolve(choice: str):
    if choice in ("0", "off", "false", "no", "numpy"):
        from . import _kernels

        return "numpy", _kernels
    if choice in ("1", "on", "true", "yes", "numba"):
        from . import _kernels_numba

        return "numba", _kernels_numba
    if choice == "auto":
        try:
            from . import _kernels_numba

            return "numba", _kernels_numba
        except ImportError:
            from . import _kernels

            return "numpy", _kernels
    raise ValueError(
        f"unrecognized {ENV_VAR} value {choice!r} (expected auto, 0/numpy or 1/numba)"
    )


def set_backend(choice: str | None) -> None:
    """Select the kernel backend: 'auto', 'numpy'/'0' or 'numba'/'1'.

    Passing None clears any previous selection so the next kernels() call
    re-reads the GCPDENOISE_NUMBA environment flag.
    """
    global _active, _module
    if choice is None:
        _active, _module = None, None
        return
    _active, _module = _resolve(str(choice).strip().lower())


def kernels():
    """The active kernel module (resolving the env flag on first use)."""
    if _module is None:
        set_backend(os.environ.get(ENV_VAR, "auto"))
    return _module


def active_backend() -> str:
    """Name of the backend in use: 'numba' or 'numpy'."""
    kernels()
    assert _active is not None
    return _active
