"""Full diagonalization, level statistics, zero modes, and eigenstate entanglement."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
from scipy.integrate import quad

from . import kernels
from .errors import CapacityError, ConfigError, ScarlettError
from .fock_basis import BasisTable, StateSubset, enumerate_basis, rank_states
from .hamiltonian import SparseOperator, as_model, build_operator
from .symmetry import SectorBasis, SectorVector, build_momentum_sector, expand_to_full

DENSE_LIMIT = 40_000
ZERO_REL_TOL = 1e-8


class ZeroModeWarning(UserWarning):
    """The zero-mode count changes between ``tol`` and ``10 * tol``."""


class TooFewLevelsError(ScarlettError, ValueError):
    exit_code = 2


@dataclass(eq=False)
class EigenSystem:
    values: np.ndarray
    vectors: np.ndarray | None = field(default=None, repr=False)
    basis: object = field(default=None, repr=False)
    scale: float = 1.0  # max |H_ij|, sets the zero threshold
    label: str = ""

    @property
    def zero_tol(self) -> float:
        return ZERO_REL_TOL * max(1.0, self.scale)

    def __len__(self) -> int:
        return self.values.size


def diagonalize(op: SparseOperator, vectors: bool = True, limit: int | None = None) -> EigenSystem:
    """Dense Hermitian eigensolve of the whole operator."""
    limit = DENSE_LIMIT if limit is None else limit
    if op.dim > limit:
        raise CapacityError(
            f"dimension {op.dim} exceeds the dense limit {limit}; use Krylov evolution instead"
        )
    H = op.toarray()
    if vectors:
        w, v = np.linalg.eigh(H)
    else:
        w, v = la.eigvalsh(H, check_finite=False), None
    return EigenSystem(w, v, op.basis, op.max_abs(), op.sector)


def basis_colors(basis) -> np.ndarray:
    """Bipartite color per basis element; sector elements take their representative's."""
    if isinstance(basis, SectorBasis):
        parent = basis.parent
        c = kernels.colors(parent.states, parent.Np, parent.periodic)
        return c[basis.rep_index]
    return kernels.colors(basis.states, basis.Np, basis.periodic)


def chiral_blocks(op: SparseOperator, labels: np.ndarray | None = None):
    """Split ``H = [[0, C^dagger], [C, 0]]`` by color; raises if the coloring is not proper."""
    labels = basis_colors(op.basis) if labels is None else labels
    g = np.nonzero(labels == 0)[0]
    r = np.nonzero(labels == 1)[0]
    M = op.matrix
    for idx in (g, r):
        if idx.size and M[idx][:, idx].nnz:
            raise ConfigError("operator is not bipartite under this coloring")
    return M[r][:, g], g.size, r.size


def chiral_values(op: SparseOperator, labels: np.ndarray | None = None) -> EigenSystem:
    """Spectrum of a bipartite operator from the singular values of its off-diagonal block.

    Nonzero levels come in pairs ``+-sigma``, and ``|g - r|`` extra zeros
    appear because ``C`` is rectangular.
    """
    if op.dim > DENSE_LIMIT:
        raise CapacityError(f"dimension {op.dim} exceeds the dense limit {DENSE_LIMIT}")
    C, g, r = chiral_blocks(op, labels)
    if min(g, r):
        s = la.svdvals(C.toarray(), check_finite=False)
    else:
        s = np.zeros(0)
    w = np.concatenate([-s, s, np.zeros(abs(g - r))])
    return EigenSystem(np.sort(w), None, op.basis, op.max_abs(), op.sector)


def count_zero_modes(eigs: EigenSystem, tol: float | None = None) -> int:
    """Levels with ``|E| < tol``; warns when the count is sensitive to ``tol``."""
    tol = eigs.zero_tol if tol is None else tol
    a = np.abs(eigs.values)
    n = int((a < tol).sum())
    if int((a < 10 * tol).sum()) != n:
        warnings.warn(f"zero-mode count changes between tol={tol:g} and {10 * tol:g}", ZeroModeWarning)
    return n


@dataclass(frozen=True)
class ZeroModeRow:
    model: str
    L: int
    counts: tuple  # per momentum index
    method: str

    @property
    def total(self) -> int:
        return int(sum(self.counts))

    def as_dict(self) -> dict:
        return {"model": self.model, "L": self.L, "counts": list(self.counts), "total": self.total, "method": self.method}


def sector_zero_modes(op: SparseOperator, method: str = "auto") -> tuple[int, str]:
    if method in ("auto", "chiral"):
        try:
            return count_zero_modes(chiral_values(op)), "chiral"
        except ConfigError:
            if method == "chiral":
                raise
    return count_zero_modes(diagonalize(op, vectors=False)), "dense"


def zero_mode_table(model, L: int, method: str = "auto", mirror: bool = True) -> ZeroModeRow:
    """Zero modes per momentum sector at unit filling.

    With ``mirror`` only ``k <= L/2`` is solved: the ``-k`` block is the complex
    conjugate of the ``k`` block and has the same spectrum.
    """
    model = as_model(model)
    basis = enumerate_basis(L, L)
    counts = [0] * L
    used = set()
    for k in range(L):
        if mirror and k > L // 2:
            counts[k] = counts[L - k]
            continue
        op = build_operator(model, build_momentum_sector(basis, k))
        counts[k], how = sector_zero_modes(op, method)
        used.add(how)
    return ZeroModeRow(model.tag, L, tuple(counts), "+".join(sorted(used)))


@dataclass(eq=False)
class LevelStatistics:
    r_values: np.ndarray = field(repr=False)
    mean_r: float
    edges: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)
    window: float
    n_levels: int

    def as_dict(self) -> dict:
        return {"mean_r": self.mean_r, "window": self.window, "n_levels": self.n_levels}


def gap_ratios(levels: np.ndarray) -> np.ndarray:
    s = np.diff(np.sort(levels))
    a, b = s[:-1], s[1:]
    return np.minimum(a, b) / np.maximum(a, b)


def level_statistics(
    eigs: EigenSystem | np.ndarray,
    window: float = 1.0 / 3.0,
    exclude_zero_modes: bool = True,
    collapse: float = 1e-10,
    bins: int = 20,
    zero_tol: float | None = None,
) -> LevelStatistics:
    """Gap-ratio statistics of the middle ``window`` fraction of levels (by index).

    Levels closer than ``collapse`` count once; the E=0 cluster is dropped
    when ``exclude_zero_modes`` is set.
    """
    if isinstance(eigs, EigenSystem):
        values, tol = eigs.values, eigs.zero_tol
    else:
        values, tol = np.asarray(eigs, dtype=float), ZERO_REL_TOL
    tol = tol if zero_tol is None else zero_tol
    E = np.sort(values)
    if exclude_zero_modes:
        E = E[np.abs(E) >= tol]
    if E.size:
        keep = np.concatenate([[True], np.diff(E) > collapse])
        E = E[keep]
    if not 0 < window <= 1:
        raise ConfigError(f"window must be in (0, 1], got {window}")
    n = E.size
    lo = int(round(n * (1 - window) / 2))
    hi = n - lo
    E = E[lo:hi]
    if E.size < 3:
        raise TooFewLevelsError(f"need at least 3 levels in the window, have {E.size}")
    r = gap_ratios(E)
    density, edges = np.histogram(r, bins=bins, range=(0.0, 1.0), density=True)
    return LevelStatistics(r, float(r.mean()), edges, density, float(window), int(E.size))


def goe_mean_r() -> float:
    """Mean of ``min(s_n, s_{n+1}) / max`` under the 3x3 GOE surmise, by quadrature."""

    def p(r):
        return 27.0 / 8.0 * (r + r * r) / (1.0 + r + r * r) ** 2.5

    # folding r -> min(r, 1/r) doubles the density on [0, 1]
    val, _ = quad(lambda x: 2.0 * x * p(x), 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
    return val


def poisson_mean_r() -> float:
    return 2.0 * np.log(2.0) - 1.0


class Bipartition:
    """Precomputed Schmidt blocks for a site cut of a fixed basis.

    Subsystem A is the ``L_A`` sites starting at ``offset`` (cyclically).
    Amplitudes are grouped by the particle number in A.
    """

    def __init__(self, basis: BasisTable | StateSubset, L_A: int, offset: int = 0):
        L, Np = basis.L, basis.Np
        if not 0 <= L_A <= L:
            raise ConfigError(f"cut size must lie in [0, {L}], got {L_A}")
        self.L_A, self.offset = int(L_A), int(offset) % L
        self.dim = basis.dim
        rolled = np.roll(basis.states, -self.offset, axis=1)
        A = np.ascontiguousarray(rolled[:, :L_A])
        B = np.ascontiguousarray(rolled[:, L_A:])
        nA = A.sum(axis=1, dtype=np.int64)
        self.blocks = []
        if L_A in (0, L):
            return
        for n in np.unique(nA):
            idx = np.nonzero(nA == n)[0]
            ra = rank_states(A[idx], L_A, int(n))
            rb = rank_states(B[idx], L - L_A, Np - int(n))
            ua, ia = np.unique(ra, return_inverse=True)
            ub, ib = np.unique(rb, return_inverse=True)
            self.blocks.append((idx, ia, ib, ua.size, ub.size))

    def schmidt_values(self, psi: np.ndarray) -> np.ndarray:
        psi = np.asarray(psi)
        if psi.shape != (self.dim,):
            raise ValueError(f"expected a vector of length {self.dim}")
        if not self.blocks:
            return np.array([np.linalg.norm(psi)])
        out = []
        for idx, ia, ib, na, nb in self.blocks:
            M = np.zeros((na, nb), dtype=psi.dtype)
            M[ia, ib] = psi[idx]
            if na == 1 or nb == 1:
                out.append([np.linalg.norm(M)])
            else:
                out.append(la.svdvals(M, check_finite=False))
        return np.concatenate(out)

    def entropy(self, psi: np.ndarray) -> float:
        p = self.schmidt_values(psi) ** 2
        p = p[p > 1e-300]
        return float(max(0.0, -(p * np.log(p)).sum()))


@dataclass(frozen=True)
class EntanglementResult:
    L_A: int
    offset: int
    entropy: float


def entanglement_entropy(psi: np.ndarray, basis, L_A: int, offset: int = 0) -> EntanglementResult:
    """Von Neumann entropy (nats) of A = sites ``offset .. offset+L_A-1``."""
    if isinstance(basis, SectorBasis):
        psi = expand_to_full(SectorVector(basis, psi))
        basis = basis.parent
    return EntanglementResult(L_A, offset, Bipartition(basis, L_A, offset).entropy(psi))


def entropy_scatter(eigs: EigenSystem, L_A: int, offset: int = 0) -> np.ndarray:
    """Entropy of every eigenvector, expanded to the parent basis if needed."""
    if eigs.vectors is None:
        raise ConfigError("eigenvectors were not computed")
    basis = eigs.basis
    sector = basis if isinstance(basis, SectorBasis) else None
    parent = sector.parent if sector is not None else basis
    cut = Bipartition(parent, L_A, offset)
    out = np.empty(eigs.values.size)
    for n in range(eigs.values.size):
        v = eigs.vectors[:, n]
        if sector is not None:
            v = expand_to_full(SectorVector(sector, v))
        out[n] = cut.entropy(v)
    return out


def overlap_scatter(eigs: EigenSystem, target, degenerate_tol: float = 1e-8):
    """``(E, |<target|E>|^2)`` with overlaps summed inside degenerate levels."""
    if eigs.vectors is None:
        raise ConfigError("eigenvectors were not computed")
    t = target.amplitudes if isinstance(target, SectorVector) else np.asarray(target)
    w = np.abs(eigs.vectors.conj().T @ t) ** 2
    E = eigs.values
    start = np.concatenate([[True], np.diff(E) > degenerate_tol])
    group = np.cumsum(start) - 1
    sums = np.bincount(group, w)
    return E[start], sums


def verify_zero_mode(state: np.ndarray, op: SparseOperator) -> float:
    """``||H psi||``; an exact zero mode gives machine zero."""
    return float(np.linalg.norm(op.matvec(np.asarray(state))))


def spectrum_symmetry_check(eigs: EigenSystem | np.ndarray) -> float:
    """Largest ``|E_i + E_j|`` after pairing the i-th lowest with the i-th highest level."""
    E = np.sort(eigs.values if isinstance(eigs, EigenSystem) else np.asarray(eigs, dtype=float))
    if E.size == 0:
        return 0.0
    return float(np.abs(E + E[::-1]).max())
