"""Backend dispatch for the hot loops.

The compiled ``_native`` extension is used when it imports; otherwise the
numpy implementations in ``_pure`` are used. :func:`use_backend` switches
explicitly, mainly for tests and benchmarks.
"""

from __future__ import annotations

import contextlib
from types import ModuleType

from . import _pure

try:
    from . import _native
except ImportError:  # extension not compiled
    _native = None

_BACKENDS: dict[str, ModuleType | None] = {"native": _native, "pure": _pure}
_active: ModuleType = _native if _native is not None else _pure


def available_backends() -> list[str]:
    return [name for name, mod in _BACKENDS.items() if mod is not None]


def backend_name() -> str:
    return "native" if _active is _native and _native is not None else "pure"


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose from {sorted(_BACKENDS)}")
    mod = _BACKENDS[name]
    if mod is None:
        raise ImportError(f"backend {name!r} is not available (extension not built)")
    _active = mod


@contextlib.contextmanager
def use_backend(name: str):
    previous = backend_name()
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def box_mean(plane, radius):
    return _active.box_mean(plane, radius)


def correlate_last(arr, kernel, replicate):
    return _active.correlate_last(arr, kernel, replicate)


def grid_splat(coords, values, gshape):
    return _active.grid_splat(coords, values, tuple(gshape))


def grid_slice(grid, coords, gshape):
    return _active.grid_slice(grid, coords, tuple(gshape))


def clahe_interpolate(plane, luts, identity, centers_y, centers_x):
    return _active.clahe_interpolate(plane, luts, identity, centers_y, centers_x)
