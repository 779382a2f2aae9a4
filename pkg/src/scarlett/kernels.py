"""Backend selection for the hot loops.

The compiled Cython module is used when it imports; otherwise, or when
``SCARLETT_PURE_PYTHON=1`` is set, the numpy implementations are used.
``BACKEND`` names the active one.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _fallback


def _load() -> tuple[ModuleType, str]:
    if os.environ.get("SCARLETT_PURE_PYTHON", "") not in ("", "0"):
        return _fallback, "python"
    try:
        from . import _core
    except ImportError:
        return _fallback, "python"
    return _core, "cython"


_impl, BACKEND = _load()

_threads = 1


def set_threads(n: int) -> None:
    """Thread count for the parallel kernels (SpMV)."""
    global _threads
    if n < 1:
        raise ValueError("thread count must be positive")
    _threads = int(n)


def get_threads() -> int:
    return _threads


def backend_module(name: str | None = None) -> ModuleType:
    """Kernel module by name (``"cython"``/``"python"``), default the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _fallback
    if name == "cython":
        from . import _core

        return _core
    raise ValueError(f"unknown backend {name!r}")


def enumerate_compositions(L, Np, D):
    return _impl.enumerate_compositions(L, Np, D)


def rank_states(states, table, Np):
    return _impl.rank_states(states, table, Np)


def hop_ranks(states, model, periodic, table, Np):
    return _impl.hop_ranks(states, model, periodic, table, Np)


def orbit_data(states, table, Np):
    return _impl.orbit_data(states, table, Np)


def colors(states, Np, periodic):
    return _impl.colors(states, Np, periodic)


def census(L, Np, D):
    return _impl.census(L, Np, D)


def csr_matvec(indptr, indices, data, x, out):
    return _impl.csr_matvec(indptr, indices, data, x, out, _threads)
