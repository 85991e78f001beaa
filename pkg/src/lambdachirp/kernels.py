"""Backend selection for the hot loops.

The compiled Cython module is used when it was built; otherwise the
pure-Python module with the identical interface is used. Callers go
through :func:`get` so a backend can be forced for testing and benchmarks.
"""

from __future__ import annotations

import logging
from types import ModuleType

from lambdachirp import _pykernels

log = logging.getLogger(__name__)

try:
    from lambdachirp import _ckernels
except ImportError:  # extension not built
    _ckernels = None
    log.debug("compiled kernels unavailable; using pure-Python fallback")

_BACKENDS: dict[str, ModuleType | None] = {
    "compiled": _ckernels,
    "python": _pykernels,
}
_active: ModuleType = _ckernels if _ckernels is not None else _pykernels


def available() -> list[str]:
    return [name for name, mod in _BACKENDS.items() if mod is not None]


def backend_name() -> str:
    return "compiled" if _active is _ckernels and _ckernels is not None else "python"


def set_backend(name: str) -> None:
    """Force ``"compiled"`` or ``"python"`` for subsequent calls."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; choose from {sorted(_BACKENDS)}")
    mod = _BACKENDS[name]
    if mod is None:
        raise RuntimeError("compiled kernels were not built; reinstall with Cython available")
    _active = mod


def get() -> ModuleType:
    return _active
