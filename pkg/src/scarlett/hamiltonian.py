"""Correlated-hopping Hamiltonians as sparse matrices.

Each model is a sum of nearest-neighbour hops dressed by density factors.
For a particle hopping from a site with ``ns`` bosons onto a neighbour with
``nd`` (both counted before the hop) the element is

    -J * f * sqrt(ns * (nd + 1))

with the dressing ``f``:

======  ==================  =====================
model   hop to the left     hop to the right
======  ==================  =====================
H1      nd                  ns - 1
H2      nd + 1              ns
H3      nd * (ns - 1)       nd * (ns - 1)
H1a     nd**2               (ns - 1)**2
H1b     [nd > 0]            [ns > 1]
FREE    1                   1
======  ==================  =====================

so H1 forbids hopping left onto an empty site and hopping right out of a
singly occupied one, and H3 never changes which sites are empty.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import CapacityError, ConfigError
from .fock_basis import BasisTable, StateSubset, _as_states, enumerate_basis, rank_table
from .symmetry import SectorBasis

MODEL_CODES = {"H1": 0, "H2": 1, "H3": 2, "H1a": 3, "H1b": 4, "FREE": 5}
OPERATOR_LIMIT = 60_000_000  # stored hops


@dataclass(frozen=True)
class ModelKind:
    tag: str
    J: float = 1.0

    def __post_init__(self):
        if self.tag not in MODEL_CODES:
            raise ConfigError(f"unknown model {self.tag!r}; choose from {sorted(MODEL_CODES)}")
        if not self.J > 0:
            raise ConfigError(f"J must be positive, got {self.J}")

    @property
    def code(self) -> int:
        return MODEL_CODES[self.tag]


def as_model(model: ModelKind | str) -> ModelKind:
    return model if isinstance(model, ModelKind) else ModelKind(str(model))


def _dressing(tag: str, left: bool, ns: int, nd: int) -> float:
    if tag == "H1":
        return nd if left else ns - 1
    if tag == "H2":
        return nd + 1 if left else ns
    if tag == "H3":
        return nd * (ns - 1)
    if tag == "H1a":
        return nd * nd if left else (ns - 1) ** 2
    if tag == "H1b":
        return float(nd > 0) if left else float(ns > 1)
    return 1.0


def amplitude(model: ModelKind | str, source, target, periodic: bool = True) -> float:
    """``<target|H|source>`` evaluated directly from the model definition.

    A slow reference used to check the compiled builder.
    """
    model = as_model(model)
    s = [int(v) for v in np.asarray(source).ravel()]
    t = [int(v) for v in np.asarray(target).ravel()]
    L = len(s)
    if len(t) != L or sum(s) != sum(t):
        return 0.0
    diff = [t[j] - s[j] for j in range(L)]
    gone = [j for j in range(L) if diff[j] == -1]
    came = [j for j in range(L) if diff[j] == 1]
    if len(gone) != 1 or len(came) != 1 or sum(abs(x) for x in diff) != 2:
        return 0.0
    src, dst = gone[0], came[0]
    total = 0.0
    for side, d in ((True, src - 1), (False, src + 1)):
        if not 0 <= d < L:
            if not periodic:
                continue
            d %= L
        if d != dst or d == src:
            continue
        ns, nd = s[src], s[dst]
        total += -model.J * _dressing(model.tag, side, ns, nd) * sqrt(ns * (nd + 1))
    return total


@dataclass(eq=False)
class SparseOperator:
    """A Hamiltonian restricted to a basis, stored as CSR."""

    matrix: sp.csr_matrix = field(repr=False)
    basis: object = field(repr=False)
    model: ModelKind
    sector: str = "full"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.matrix.data)

    def matvec(self, x: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        """``H @ x``; complex vectors against real matrices go through the compiled kernel."""
        if not self.is_complex and np.iscomplexobj(x):
            x = np.ascontiguousarray(x, dtype=np.complex128)
            if out is None:
                out = np.empty(self.dim, dtype=np.complex128)
            m = self.matrix
            return kernels.csr_matvec(m.indptr, m.indices, m.data, x, out)
        res = self.matrix @ x
        if out is not None:
            out[:] = res
            return out
        return res

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def max_abs(self) -> float:
        return float(np.abs(self.matrix.data).max()) if self.nnz else 0.0

    def hermiticity_defect(self) -> float:
        d = self.matrix - self.matrix.conj().T
        return float(abs(d).max()) if d.nnz else 0.0

    def describe(self) -> dict:
        b = self.basis
        return {
            "model": self.model.tag, "J": self.model.J, "L": b.L, "Np": b.Np,
            "sector": self.sector, "dimension": self.dim, "nnz": self.nnz,
        }


def _csr(rows, cols, vals, n) -> sp.csr_matrix:
    m = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    m.sum_duplicates()
    m.eliminate_zeros()
    m.sort_indices()
    return m


def _hops(model: ModelKind, states: np.ndarray, L: int, Np: int, periodic: bool):
    src, dst, amp = kernels.hop_ranks(_as_states(states, L), model.code, periodic, rank_table(L, Np), Np)
    if src.size > OPERATOR_LIMIT:
        raise CapacityError(f"{src.size} hops exceed the operator limit {OPERATOR_LIMIT}")
    return src, dst, -model.J * amp


def build_operator(model: ModelKind | str, basis, periodic: bool | None = None) -> SparseOperator:
    """Sparse matrix of ``model`` on a full basis, a subset, or a symmetry sector.

    Hops that leave a ``StateSubset`` are dropped without renormalization.
    ``periodic`` defaults to the basis' own boundary condition.
    """
    model = as_model(model)
    if periodic is None:
        periodic = basis.periodic
    if isinstance(basis, SectorBasis):
        return _build_sector(model, basis, periodic)
    if not isinstance(basis, (BasisTable, StateSubset)):
        raise TypeError(f"unsupported basis type {type(basis).__name__}")
    src, dst_rank, vals = _hops(model, basis.states, basis.L, basis.Np, periodic)
    dst = basis.lookup(dst_rank)
    keep = dst >= 0
    if not keep.all():
        src, dst, vals = src[keep], dst[keep], vals[keep]
    label = "full" if isinstance(basis, BasisTable) else (basis.label or "subset")
    return SparseOperator(_csr(dst, src, vals, basis.dim), basis, model, label)


def _build_sector(model: ModelKind, sector: SectorBasis, periodic: bool) -> SparseOperator:
    parent = sector.parent
    reps = parent.states[sector.rep_index]
    src, dst_rank, vals = _hops(model, reps, parent.L, parent.Np, periodic)
    dst = parent.lookup(dst_rank)
    keep = dst >= 0
    dst, src, vals = dst[keep], src[keep], vals[keep]
    b = sector.member_rep[dst]
    keep = b >= 0
    dst, src, vals, b = dst[keep], src[keep], vals[keep], b[keep]
    # <b|H|a> = h * omega**l * sqrt(p_a / p_b) for a hop a -> g**l b
    w = sector.phase(sector.member_shift[dst]) * np.sqrt(sector.period[src] / sector.period[b])
    vals = vals * w
    if sector.is_real:
        vals = np.real(vals).astype(np.float64)
    label = sector.kind if sector.kind == "trivial" else f"{sector.kind}={sector.label}"
    return SparseOperator(_csr(b, src, vals, sector.dim), sector, model, label)


def full_operator(model: ModelKind | str, L: int, Np: int, periodic: bool = True) -> SparseOperator:
    return build_operator(model, enumerate_basis(L, Np, periodic=periodic), periodic)


def h2_identity_defect(L: int, Np: int, J: float = 1.0, periodic: bool = True) -> float:
    """max |H2 - (H1 + H_free)| with ``H_free = -J sum_j (b+_j b_{j+1} + h.c.)``."""
    basis = enumerate_basis(L, Np, periodic=periodic)
    h1 = build_operator(ModelKind("H1", J), basis).matrix
    h2 = build_operator(ModelKind("H2", J), basis).matrix
    free = build_operator(ModelKind("FREE", J), basis).matrix
    d = h2 - (h1 + free)
    return float(abs(d).max()) if d.nnz else 0.0


def verify_h2_identity(L: int, Np: int, J: float = 1.0, periodic: bool = True) -> bool:
    return h2_identity_defect(L, Np, J, periodic) < 1e-12
