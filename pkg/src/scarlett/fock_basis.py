"""Bosonic Fock bases at fixed particle number with unbounded site occupancy.

States are rows of a ``uint8`` array; the canonical order is lexicographic
descending on the occupation vector, so ``(Np, 0, ..., 0)`` has rank 0. The
rank of a state is computed from a table of composition counts, which makes
lookup O(L) with no hashing.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

from . import kernels
from .errors import CapacityError, ConfigError, StateNotFoundError

MATERIALIZED_LIMIT = 50_000_000
STREAMING_LIMIT = 500_000_000


def set_capacity(materialized: int | None = None, streaming: int | None = None) -> None:
    global MATERIALIZED_LIMIT, STREAMING_LIMIT
    if materialized is not None:
        MATERIALIZED_LIMIT = int(materialized)
    if streaming is not None:
        STREAMING_LIMIT = int(streaming)


def count_states(L: int, Np: int) -> int:
    """Number of ways to put ``Np`` bosons on ``L`` sites, C(L+Np-1, Np)."""
    if L == 0:
        return 1 if Np == 0 else 0
    return comb(L + Np - 1, Np)


@lru_cache(maxsize=64)
def rank_table(L: int, Np: int) -> np.ndarray:
    """``T[j, R, n]``: states sharing a prefix that put more than ``n`` of the
    remaining ``R`` particles on site ``j``."""
    T = np.zeros((L, Np + 1, Np + 1), dtype=np.int64)
    for j in range(L):
        rest = L - j - 1
        for R in range(Np + 1):
            acc = 0
            for n in range(R, -1, -1):
                T[j, R, n] = acc
                acc += count_states(rest, R - n)
    T.setflags(write=False)
    return T


def _as_states(states, L: int | None = None) -> np.ndarray:
    arr = np.asarray(states)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.size and (arr.min() < 0 or arr.max() > 255):
        raise ValueError("occupations must lie in [0, 255]")
    arr = np.ascontiguousarray(arr, dtype=np.uint8)
    if L is not None and arr.shape[1] != L:
        raise ValueError(f"expected {L} sites, got {arr.shape[1]}")
    return arr


def rank_states(states, L: int, Np: int) -> np.ndarray:
    """Canonical ranks of states (rows) of ``L`` sites holding ``Np`` particles."""
    arr = _as_states(states, L)
    sums = arr.sum(axis=1, dtype=np.int64)
    if np.any(sums != Np):
        raise StateNotFoundError(f"state(s) do not hold {Np} particles")
    return kernels.rank_states(arr, rank_table(L, Np), Np)


def unrank_state(index: int, L: int, Np: int) -> np.ndarray:
    total = count_states(L, Np)
    if not 0 <= index < total:
        raise StateNotFoundError(f"rank {index} outside [0, {total})")
    out = np.zeros(L, dtype=np.uint8)
    R = Np
    for j in range(L - 1):
        for v in range(R, -1, -1):
            c = count_states(L - j - 1, R - v)
            if index < c:
                out[j] = v
                R -= v
                break
            index -= c
    out[L - 1] = R
    return out


@dataclass(frozen=True, eq=False)
class BasisTable:
    """The complete basis for ``Np`` bosons on ``L`` sites, in canonical order.

    Since the basis is complete, a state's index equals its rank.
    """

    L: int
    Np: int
    states: np.ndarray = field(repr=False)
    periodic: bool = True

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    @property
    def ranks(self) -> np.ndarray:
        return np.arange(self.dim, dtype=np.int64)

    def lookup(self, ranks: np.ndarray) -> np.ndarray:
        return np.asarray(ranks, dtype=np.int64)

    def index_of(self, states) -> np.ndarray:
        return rank_states(states, self.L, self.Np)

    def __len__(self) -> int:
        return self.dim


@dataclass(frozen=True, eq=False)
class StateSubset:
    """An arbitrary set of states, kept sorted by canonical rank.

    Used for clusters, connected components, and open-chain reduced bases.
    ``lookup`` returns -1 for ranks outside the subset.
    """

    L: int
    Np: int
    states: np.ndarray = field(repr=False)
    ranks: np.ndarray = field(repr=False)
    periodic: bool = True
    label: str = ""

    @classmethod
    def from_states(cls, states, L: int, Np: int, periodic: bool = True, label: str = "") -> "StateSubset":
        arr = _as_states(states, L)
        rk = rank_states(arr, L, Np)
        order = np.argsort(rk, kind="stable")
        rk = rk[order]
        if rk.size > 1 and np.any(rk[1:] == rk[:-1]):
            keep = np.concatenate([[True], rk[1:] != rk[:-1]])
            order, rk = order[keep], rk[keep]
        return cls(L, Np, np.ascontiguousarray(arr[order]), rk, periodic, label)

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    def lookup(self, ranks: np.ndarray) -> np.ndarray:
        ranks = np.asarray(ranks, dtype=np.int64)
        if self.dim == 0:
            return np.full(ranks.shape, -1, dtype=np.int64)
        pos = np.searchsorted(self.ranks, ranks)
        pos = np.minimum(pos, self.dim - 1)
        return np.where(self.ranks[pos] == ranks, pos, -1).astype(np.int64)

    def index_of(self, states) -> np.ndarray:
        return self.lookup(rank_states(states, self.L, self.Np))

    def __len__(self) -> int:
        return self.dim


def enumerate_basis(L: int, Np: int, capacity: int | None = None, periodic: bool = True) -> BasisTable:
    """All Fock states of ``Np`` bosons on ``L`` sites in canonical order."""
    if L < 1 or Np < 0:
        raise ConfigError(f"need L >= 1 and Np >= 0, got L={L}, Np={Np}")
    if Np > 255:
        raise ConfigError("occupations are stored as uint8; Np must be <= 255")
    D = count_states(L, Np)
    limit = MATERIALIZED_LIMIT if capacity is None else capacity
    if D > limit:
        raise CapacityError(f"basis L={L}, Np={Np} has {D} states, above the limit {limit}")
    states = kernels.enumerate_compositions(L, Np, D)
    states.setflags(write=False)
    return BasisTable(L, Np, states, periodic)


def rank(state: Sequence[int], basis: BasisTable | StateSubset) -> int:
    """Index of ``state`` in ``basis``; raises if it does not belong."""
    arr = _as_states(state)
    if arr.shape[1] != basis.L or int(arr.sum()) != basis.Np:
        raise StateNotFoundError(f"{tuple(arr[0])} is not a state of L={basis.L}, Np={basis.Np}")
    idx = int(basis.index_of(arr)[0])
    if idx < 0:
        raise StateNotFoundError(f"{tuple(arr[0])} is not in this subset")
    return idx


def unrank(index: int, basis: BasisTable | StateSubset) -> np.ndarray:
    if not 0 <= index < basis.dim:
        raise StateNotFoundError(f"index {index} outside [0, {basis.dim})")
    return basis.states[index].copy()


def translate(state, shift: int) -> np.ndarray:
    """Cyclic shift: site ``j`` moves to ``j + shift``, e.g. 210 -> 021 for shift 1."""
    return np.roll(np.asarray(state), shift, axis=-1)


def invert(state) -> np.ndarray:
    """Reflection ``j -> L + 1 - j`` (reverse the occupation vector)."""
    return np.asarray(state)[..., ::-1].copy()


_PATTERN = re.compile(r"^([0-9]+)(?:x([0-9]+))?$")


def parse_pattern(text: str) -> np.ndarray:
    """``"210x4"`` -> occupations of |210210210210>; ``"2020"`` -> |2020>.

    Every digit is one site, so occupations above 9 cannot be written this way.
    """
    parts = [p for p in text.replace(" ", "").split("+")]
    sites: list[int] = []
    for part in parts:
        m = _PATTERN.match(part)
        if not m:
            raise ConfigError(f"bad state pattern {text!r}; expected digits with optional xN repeat")
        cell = [int(c) for c in m.group(1)]
        reps = int(m.group(2)) if m.group(2) else 1
        if reps < 1:
            raise ConfigError(f"repeat count must be positive in {text!r}")
        sites.extend(cell * reps)
    return np.array(sites, dtype=np.uint8)


def format_state(state) -> str:
    return "".join(str(int(v)) if v < 10 else f"({int(v)})" for v in np.asarray(state))
