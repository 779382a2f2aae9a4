"""Cluster subspaces built from unit-cell patterns, and their closed-form fidelities.

A cluster is every tensor product of ``n`` cell patterns. Projecting H1 onto
it decouples the cells when the initial state is a plain product, so
single-cell results raise to the ``n``-th power.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError
from .fock_basis import StateSubset
from .hamiltonian import ModelKind, SparseOperator

FAMILIES = {
    "minimal": ("210", "120", "300"),
    "extended": ("210", "120", "300", "111"),
    "h3": ("210", "120"),
}


def generalized_patterns(N: int) -> tuple[str, ...]:
    """Cell states ``|(N+1-i)(i-1)0...0>`` for ``i = 1..N``."""
    if N < 2 or N > 9:
        raise ConfigError(f"cell length must lie in [2, 9], got {N}")
    return tuple(f"{N + 1 - i}{i - 1}" + "0" * (N - 2) for i in range(1, N + 1))


@dataclass(frozen=True)
class ClusterSpec:
    patterns: tuple[str, ...]
    n: int
    periodic: bool = True

    def __post_init__(self):
        if not self.patterns:
            raise ConfigError("a cluster needs at least one pattern")
        N = len(self.patterns[0])
        for p in self.patterns:
            if len(p) != N or sum(int(c) for c in p) != sum(int(c) for c in self.patterns[0]):
                raise ConfigError(f"patterns must share length and particle number: {self.patterns}")
        if self.n < 1:
            raise ConfigError("need at least one cell")

    @classmethod
    def family(cls, name: str, n: int, N: int | None = None, periodic: bool = True) -> "ClusterSpec":
        if name == "generalized":
            return cls(generalized_patterns(3 if N is None else N), n, periodic)
        if name not in FAMILIES:
            raise ConfigError(f"unknown cluster family {name!r}")
        return cls(FAMILIES[name], n, periodic)

    @property
    def cell_length(self) -> int:
        return len(self.patterns[0])

    @property
    def L(self) -> int:
        return self.cell_length * self.n

    @property
    def Np(self) -> int:
        return sum(int(c) for c in self.patterns[0]) * self.n


def build_cluster_basis(spec: ClusterSpec) -> StateSubset:
    """All ``|p_1 ... p_n>`` with each ``p_i`` from the pattern set."""
    cells = [np.array([int(c) for c in p], dtype=np.uint8) for p in spec.patterns]
    states = np.array([np.concatenate(c) for c in itertools.product(cells, repeat=spec.n)], dtype=np.uint8)
    return StateSubset.from_states(states, spec.L, spec.Np, spec.periodic, label="cluster")


def minimal_cluster_fidelity(n: int, t):
    """``|cos 4t|^(2n)``; period pi/4."""
    return np.abs(np.cos(4 * np.asarray(t, dtype=float))) ** (2 * n)


def h3_fidelity(n: int, t, symmetrized: bool = False):
    """H3 return probability from ``|(210)^n>``, or from its translation-symmetric orbit sum."""
    c = np.cos(2 * np.asarray(t, dtype=float))
    s = np.sin(2 * np.asarray(t, dtype=float))
    if not symmetrized:
        return np.abs(c) ** (2 * n)
    return np.abs(c**n + (-1j) ** n * s**n) ** 2


@dataclass(frozen=True)
class ExtendedClusterSolution:
    alpha: float
    beta: float
    a: float
    b: float
    c: float
    d: float

    @property
    def period(self) -> float:
        """Revival period estimate ``pi / alpha``."""
        return float(np.pi / self.alpha)


def extended_cell_matrix(J: float = 1.0) -> np.ndarray:
    """H1 on one extended cell in the order (300, 210, 120, 111)."""
    r3, r2 = np.sqrt(3.0), np.sqrt(2.0)
    return -J * np.array([
        [0, 2 * r3, 0, 0],
        [2 * r3, 0, 2, 0],
        [0, 2, 0, r2],
        [0, 0, r2, 0],
    ])


@lru_cache(maxsize=1)
def solve_extended_constants() -> ExtendedClusterSolution:
    """Eigen-decomposition of the extended cell.

    ``(a, b, c, d)`` is the ``E = -alpha`` eigenvector with all entries positive;
    the ``E = -beta`` eigenvector is ``(-c, -d, a, b)``.
    """
    w, v = np.linalg.eigh(extended_cell_matrix())
    alpha, beta = -w[0], -w[1]
    vec = v[:, 0] * np.sign(v[0, 0])
    a, b, c, d = (float(x) for x in vec)
    if min(a, b, c, d) <= 0:
        raise ArithmeticError("ground state of the extended cell is not positive")
    if abs(2 * (b * b + d * d) - 1) > 1e-12:
        raise ArithmeticError("normalization 2(b^2 + d^2) = 1 violated")
    return ExtendedClusterSolution(float(alpha), float(beta), a, b, c, d)


def extended_cluster_fidelity(n: int, t):
    """``4^n |b^2 cos(alpha t) + d^2 cos(beta t)|^(2n)``."""
    s = solve_extended_constants()
    t = np.asarray(t, dtype=float)
    return 4.0**n * np.abs(s.b**2 * np.cos(s.alpha * t) + s.d**2 * np.cos(s.beta * t)) ** (2 * n)


def extended_peak_height(L: int) -> float:
    """Extended-cluster fidelity at ``t = pi / alpha`` for ``L = 3n``."""
    if L % 3:
        raise ConfigError(f"L must be a multiple of 3, got {L}")
    s = solve_extended_constants()
    return float(extended_cluster_fidelity(L // 3, s.period))


def extended_decay_rate() -> float:
    """``kappa`` in ``F(pi/alpha) = exp(-kappa L)``."""
    return -np.log(extended_peak_height(3)) / 3.0


def generalized_cluster_matrix(N: int, J: float = 1.0) -> SparseOperator:
    """Tridiagonal H1 on the ``N`` cell states ``|(N+1-i)(i-1)0..0>``.

    The coupling of states ``i`` and ``i+1`` is ``-J (N - i) sqrt(i (N + 1 - i))``.
    """
    if N < 2:
        raise ConfigError(f"cell length must be at least 2, got {N}")
    i = np.arange(1, N, dtype=float)
    off = -J * (N - i) * np.sqrt(i * (N + 1 - i))
    M = sp.diags([off, off], [-1, 1], shape=(N, N), format="csr")
    basis = build_cluster_basis(ClusterSpec(generalized_patterns(N), 1)) if N <= 9 else None
    return SparseOperator(M, basis, ModelKind("H1", J), sector=f"generalized-cell N={N}")


def generalized_cluster_fidelity(N: int, n: int, t) -> np.ndarray:
    """Fidelity of ``|((N-1) 1 0..0)^n>`` in the generalized cluster."""
    H = generalized_cluster_matrix(N).toarray()
    E, V = np.linalg.eigh(H)
    w = V[1] ** 2  # initial state is i = 2
    t = np.asarray(t, dtype=float)
    amp = np.exp(-1j * np.multiply.outer(t, E)) @ w
    return np.abs(amp) ** (2 * n)
