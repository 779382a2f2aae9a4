"""Hamiltonians as graphs: coloring, distances, components, green/red census.

Basis states are vertices and nonzero off-diagonal elements are edges. H1 is
bipartite on open chains, on even periodic rings, and on odd rings at unit
filling. On odd rings the sitewise imbalance ``Delta_a`` is not translation
invariant, so the color there is taken from the net particle current needed to
reach the state from ``|11...1>``; it equals the parity of the graph distance.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _cc

from . import fock_basis as fb
from . import kernels
from ._fallback import _hop_factor
from .errors import CapacityError, ConfigError
from .fock_basis import BasisTable, StateSubset, _as_states, count_states, rank_states, rank_table
from .hamiltonian import SparseOperator, as_model, build_operator
from .symmetry import build_momentum_sector

UNREACHABLE = -1


@dataclass(frozen=True)
class ParityLabel:
    delta_a: int
    d_a: int | None
    color: str  # "green" or "red"


def delta_a(state) -> int:
    """``|n_even - n_odd + C| / 2`` with sites numbered from 1 and ``C = Np mod 2``.

    At unit filling ``C`` equals ``L mod 2``.
    """
    s = np.asarray(state, dtype=np.int64).ravel()
    n_even = int(s[1::2].sum())
    n_odd = int(s[0::2].sum())
    C = int(s.sum()) & 1
    return abs(n_even - n_odd + C) // 2


def colors(states, periodic: bool = True) -> np.ndarray:
    """0 (green) or 1 (red) per state row."""
    arr = _as_states(states)
    Np = int(arr[0].sum()) if arr.shape[0] else 0
    return kernels.colors(arr, Np, periodic)


def color(state, periodic: bool = True) -> str:
    return "red" if colors(state, periodic)[0] else "green"


def parity_label(state, d_a: int | None = None, periodic: bool = True) -> ParityLabel:
    return ParityLabel(delta_a(state), d_a, color(state, periodic))


def bfs_distance(op: SparseOperator | sp.spmatrix, source: int) -> np.ndarray:
    """Graph distance from ``source`` along nonzero elements; ``-1`` if unreachable."""
    A = op.matrix if isinstance(op, SparseOperator) else sp.csr_matrix(op)
    A = A.tocsr()
    dist = np.full(A.shape[0], UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    front = np.array([source])
    level = 0
    while front.size:
        level += 1
        nbrs = np.unique(A[front].indices)
        nbrs = nbrs[dist[nbrs] == UNREACHABLE]
        dist[nbrs] = level
        front = nbrs
    return dist


def distance_from_uniform(L: int, periodic: bool = True, model="H1") -> tuple[BasisTable, np.ndarray]:
    """``d_a``: distance of every unit-filling state from ``|11...1>``."""
    basis = fb.enumerate_basis(L, L, periodic=periodic)
    op = build_operator(model, basis)
    src = int(basis.index_of(np.ones(L, dtype=np.uint8))[0])
    return basis, bfs_distance(op, src)


@dataclass(frozen=True)
class Census:
    L: int
    Np: int
    sector: str
    g: int
    r: int

    @property
    def diff(self) -> int:
        return self.g - self.r

    def as_dict(self) -> dict:
        return {"L": self.L, "Np": self.Np, "g": self.g, "r": self.r, "diff": self.diff, "sector": self.sector}


def green_red_census(L: int, Np: int | None = None, sector: str = "all") -> Census:
    """Count green and red states (``sector="all"``) or k=0 orbits (``"k0"``).

    Streams over the basis without storing it. Every translation orbit carries
    exactly one k=0 state, colored like any of its members.
    """
    Np = L if Np is None else Np
    if sector not in ("all", "k0"):
        raise ConfigError(f"sector must be 'all' or 'k0', got {sector!r}")
    D = count_states(L, Np)
    if D > fb.STREAMING_LIMIT:
        raise CapacityError(f"census over {D} states exceeds the streaming limit {fb.STREAMING_LIMIT}")
    g, r, g0, r0 = kernels.census(L, Np, D)
    if sector == "all":
        return Census(L, Np, sector, g, r)
    return Census(L, Np, sector, g0, r0)


def sector_census(L: int, Np: int | None = None) -> list[Census]:
    """Colored orbit counts for every momentum sector, from a materialized basis."""
    Np = L if Np is None else Np
    basis = fb.enumerate_basis(L, Np)
    c = kernels.colors(basis.states, Np, True)
    out = []
    for k in range(L):
        sec = build_momentum_sector(basis, k)
        red = int(c[sec.rep_index].sum())
        out.append(Census(L, Np, f"k={k}", sec.dim - red, red))
    return out


@dataclass(frozen=True, eq=False)
class ComponentCensus:
    labels: np.ndarray = field(repr=False)  # component id per basis state
    sizes: np.ndarray = field(repr=False)  # size per component id
    seeds: np.ndarray = field(repr=False)  # lowest basis index in each component

    @property
    def count(self) -> int:
        return int(self.sizes.size)

    @property
    def frozen(self) -> int:
        return int((self.sizes == 1).sum())

    def largest(self) -> int:
        return int(np.argmax(self.sizes))

    def members(self, cid: int) -> np.ndarray:
        return np.nonzero(self.labels == cid)[0]


def connected_components(op: SparseOperator) -> ComponentCensus:
    n, labels = _cc(op.matrix, directed=False)
    sizes = np.bincount(labels, minlength=n)
    seeds = np.full(n, -1, dtype=np.int64)
    # first occurrence of each label
    order = np.arange(labels.size)[::-1]
    seeds[labels[order]] = order
    return ComponentCensus(labels, sizes, seeds)


def _neighbors(front: np.ndarray, model, periodic: bool) -> np.ndarray:
    """All states one nonzero hop away from the rows of ``front``."""
    L = front.shape[1]
    out = []
    for s in range(L):
        for side, d in ((True, s - 1), (False, s + 1)):
            if not 0 <= d < L:
                if not periodic:
                    continue
                d %= L
            if d == s:
                continue
            occ = front[:, s] > 0
            rows = np.nonzero(occ)[0]
            f = _hop_factor(model.code, side, front[rows, s], front[rows, d])
            rows = rows[f != 0.0]
            moved = front[rows].copy()
            moved[:, s] -= 1
            moved[:, d] += 1
            out.append(moved)
    if not out:
        return np.zeros((0, L), dtype=np.uint8)
    return np.vstack(out)


def component_of(model, seed, periodic: bool = True, limit: int | None = None) -> StateSubset:
    """Component containing ``seed``, grown by breadth-first search.

    Never enumerates the full basis.
    """
    model = as_model(model)
    seed = _as_states(seed)
    L, Np = seed.shape[1], int(seed.sum())
    limit = fb.MATERIALIZED_LIMIT if limit is None else limit
    table = rank_table(L, Np)
    seen = rank_states(seed, L, Np)
    front = seed
    chunks = [seed]
    while front.shape[0]:
        nb = _neighbors(front, model, periodic)
        rk = kernels.rank_states(np.ascontiguousarray(nb), table, Np)
        rk, first = np.unique(rk, return_index=True)
        fresh = ~np.isin(rk, seen, assume_unique=True)
        front = np.ascontiguousarray(nb[first[fresh]])
        seen = np.union1d(seen, rk[fresh])
        if seen.size > limit:
            raise CapacityError(f"component exceeds {limit} states")
        chunks.append(front)
    return StateSubset.from_states(np.vstack(chunks), L, Np, periodic, label=f"component:{model.tag}")


def h3_reduced_chain(L: int) -> StateSubset:
    """Largest H3 component at unit filling on an even ring, in reduced form.

    The component is ``L/2`` contiguous occupied sites next to ``L/2`` empty
    ones; empty sites never change under H3, so it is equivalent to an open
    chain of ``L/2`` sites holding ``L`` bosons with at least one per site.
    """
    if L < 2 or L % 2:
        raise ConfigError(f"the reduced representation needs even L, got {L}")
    M = L // 2
    D = count_states(M, L - M)
    if D > fb.MATERIALIZED_LIMIT:
        raise CapacityError(f"reduced component has {D} states")
    extra = kernels.enumerate_compositions(M, L - M, D)
    states = extra + np.uint8(1)
    return StateSubset(M, L, np.ascontiguousarray(states), rank_states(states, M, L), False, "h3-reduced")


def largest_component(L: int, method: str = "reduced") -> StateSubset:
    """Largest H3 component at ``L = Np``; ``method`` is "reduced" or "bfs".

    The BFS route seeds ``|2..2 0..0>`` on the full ring.
    """
    if method == "reduced":
        return h3_reduced_chain(L)
    if method == "bfs":
        if L % 2:
            raise ConfigError("the largest component is built for even L")
        seed = np.array([2] * (L // 2) + [0] * (L // 2), dtype=np.uint8)
        return component_of("H3", seed, periodic=True)
    raise ConfigError(f"unknown method {method!r}")


def odd_cycle(op: SparseOperator) -> list[int] | None:
    """An odd cycle (list of basis indices) if the graph is not bipartite, else None."""
    A = op.matrix.tocsr()
    n = A.shape[0]
    side = np.full(n, -1, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    depth = np.zeros(n, dtype=np.int64)
    for root in range(n):
        if side[root] >= 0:
            continue
        side[root] = 0
        queue = [root]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for v in A.indices[A.indptr[u]:A.indptr[u + 1]]:
                if v == u:
                    continue
                if side[v] < 0:
                    side[v] = 1 - side[u]
                    parent[v] = u
                    depth[v] = depth[u] + 1
                    queue.append(int(v))
                elif side[v] == side[u]:
                    return _close_cycle(int(u), int(v), parent, depth)
    return None


def _close_cycle(u, v, parent, depth):
    left, right = [u], [v]
    while depth[left[-1]] > depth[right[-1]]:
        left.append(int(parent[left[-1]]))
    while depth[right[-1]] > depth[left[-1]]:
        right.append(int(parent[right[-1]]))
    while left[-1] != right[-1]:
        left.append(int(parent[left[-1]]))
        right.append(int(parent[right[-1]]))
    return left + right[-2::-1]


def is_bipartite(op: SparseOperator) -> bool:
    return odd_cycle(op) is None


def coloring_defect(op: SparseOperator, labels: np.ndarray) -> int:
    """Number of stored edges joining two states of the same color."""
    coo = op.matrix.tocoo()
    off = coo.row != coo.col
    return int((labels[coo.row[off]] == labels[coo.col[off]]).sum())


def to_dot(op: SparseOperator, max_dim: int = 1000) -> str:
    """Weighted adjacency in DOT format; vertices labeled by occupations."""
    if op.dim > max_dim:
        raise CapacityError(f"DOT export is meant for small graphs (dim {op.dim} > {max_dim})")
    states = op.basis.states
    lab = [fb.format_state(s) for s in states]
    coo = sp.triu(op.matrix, k=1).tocoo()
    lines = [f'graph "{op.model.tag}" {{']
    c = kernels.colors(states, op.basis.Np, op.basis.periodic)
    for i, name in enumerate(lab):
        fill = "red" if c[i] else "green"
        lines.append(f'  "{name}" [color={fill}];')
    for i, j, w in zip(coo.row, coo.col, coo.data):
        lines.append(f'  "{lab[i]}" -- "{lab[j]}" [weight={abs(w):.12g}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
