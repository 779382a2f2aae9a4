"""Translation-momentum and inversion-parity sectors.

Both are cyclic groups acting on Fock states, so one construction covers them.
For a group generator ``g`` with character ``omega`` (``exp(ik)`` for
translation by one site, ``+1``/``-1`` for inversion), the sector state built
on an orbit representative ``a`` of orbit size ``p`` is

    |a, omega> = p**-0.5 * sum_{l < p} conj(omega**l) g**l |a>,

which exists only when ``omega**p == 1``. A parent state ``s = g**l a`` then
has amplitude ``conj(omega**l) / sqrt(p)`` in ``|a, omega>``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConfigError
from .fock_basis import BasisTable, StateSubset, rank_table, rank_states


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """Orbit representatives of ``parent`` that carry the character ``omega``.

    Parent-level arrays map every parent state ``s = g**shift a`` to the sector
    index of its representative ``a`` (``-1`` when the orbit does not support
    this character), the ``shift`` and the orbit size.
    """

    parent: BasisTable | StateSubset
    kind: str  # "momentum", "inversion" or "trivial"
    label: int  # k index or inversion parity
    omega: complex
    rep_index: np.ndarray = field(repr=False)  # parent indices of representatives
    period: np.ndarray = field(repr=False)  # orbit size per representative
    member_rep: np.ndarray = field(repr=False)
    member_shift: np.ndarray = field(repr=False)
    member_period: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return int(self.rep_index.shape[0])

    @property
    def L(self) -> int:
        return self.parent.L

    @property
    def Np(self) -> int:
        return self.parent.Np

    @property
    def periodic(self) -> bool:
        return self.parent.periodic

    @property
    def is_real(self) -> bool:
        return abs(self.omega.imag) < 1e-15

    @property
    def representatives(self) -> np.ndarray:
        return self.parent.states[self.rep_index]

    @property
    def normalization(self) -> np.ndarray:
        return 1.0 / np.sqrt(self.period)

    def phase(self, shift: np.ndarray) -> np.ndarray:
        """``omega ** shift``, exact for real characters."""
        shift = np.asarray(shift)
        if self.is_real:
            return np.where(shift % 2 == 0, 1.0, self.omega.real)
        return np.exp(2j * np.pi * self.label / self.L * shift)

    def describe(self) -> dict:
        out = {"L": self.L, "Np": self.Np, "kind": self.kind, "dimension": self.dim}
        if self.kind == "momentum":
            out["k"] = self.label
        elif self.kind == "inversion":
            out["I"] = self.label
        return out

    def __len__(self) -> int:
        return self.dim


@dataclass(eq=False)
class SectorVector:
    sector: SectorBasis
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "SectorVector":
        return SectorVector(self.sector, self.amplitudes / self.norm())

    def expand(self) -> np.ndarray:
        return expand_to_full(self)


def _assemble(parent, kind, label, omega, rep_of, shift, period) -> SectorBasis:
    """``rep_of``: parent index of each state's orbit representative."""
    own = rep_of == np.arange(parent.dim)
    if kind == "momentum":
        ok = (label * period) % parent.L == 0
    elif kind == "inversion":
        ok = (period == 2) | (label == 0)
    else:
        ok = np.ones(parent.dim, dtype=bool)
    keep = own & ok
    rep_index = np.nonzero(keep)[0]
    sector_of = np.full(parent.dim, -1, dtype=np.int64)
    sector_of[rep_index] = np.arange(rep_index.size)
    member_rep = sector_of[rep_of]
    for arr in (rep_index, member_rep, shift, period):
        arr.setflags(write=False)
    return SectorBasis(
        parent, kind, int(label), complex(omega), rep_index,
        period[rep_index].copy(), member_rep, shift, period,
    )


def build_momentum_sector(basis: BasisTable | StateSubset, k_index: int) -> SectorBasis:
    """Momentum ``k = 2 pi k_index / L`` sector of a translation-closed basis."""
    L = basis.L
    if not basis.periodic:
        raise ConfigError("momentum sectors need periodic boundary conditions")
    if not 0 <= k_index < L:
        raise ConfigError(f"k index must lie in [0, {L}), got {k_index}")
    rep_rank, shift, period = kernels.orbit_data(basis.states, rank_table(L, basis.Np), basis.Np)
    rep_of = basis.lookup(rep_rank)
    if np.any(rep_of < 0):
        raise ConfigError("basis is not closed under translation")
    omega = np.exp(2j * np.pi * k_index / L)
    if 2 * k_index % L == 0:
        omega = complex(round(omega.real), 0.0)
    return _assemble(basis, "momentum", k_index, omega, rep_of, shift.astype(np.int64), period.astype(np.int64))


def build_inversion_sector(basis: BasisTable | StateSubset, parity: int) -> SectorBasis:
    """Even (``parity=0``) or odd (``parity=1``) combinations under site reversal."""
    if parity not in (0, 1):
        raise ConfigError(f"inversion parity must be 0 or 1, got {parity}")
    mirror = basis.lookup(rank_states(basis.states[:, ::-1], basis.L, basis.Np))
    if np.any(mirror < 0):
        raise ConfigError("basis is not closed under inversion")
    idx = np.arange(basis.dim)
    rep_of = np.minimum(idx, mirror)
    shift = (rep_of != idx).astype(np.int64)
    period = np.where(mirror == idx, 1, 2).astype(np.int64)
    return _assemble(basis, "inversion", parity, 1.0 if parity == 0 else -1.0, rep_of, shift, period)


def trivial_sector(basis: BasisTable | StateSubset) -> SectorBasis:
    idx = np.arange(basis.dim, dtype=np.int64)
    ones = np.ones(basis.dim, dtype=np.int64)
    return _assemble(basis, "trivial", 0, 1.0, idx, np.zeros(basis.dim, dtype=np.int64), ones)


def expand_to_full(v: SectorVector) -> np.ndarray:
    """Parent-basis amplitudes of a sector vector; an isometry."""
    sec = v.sector
    amps = np.asarray(v.amplitudes)
    if amps.shape != (sec.dim,):
        raise ValueError(f"expected {sec.dim} amplitudes, got {amps.shape}")
    inside = sec.member_rep >= 0
    out = np.zeros(sec.parent.dim, dtype=np.result_type(amps.dtype, complex if not sec.is_real else float))
    ph = np.conj(sec.phase(sec.member_shift[inside]))
    out[inside] = amps[sec.member_rep[inside]] * ph / np.sqrt(sec.member_period[inside])
    return out


def project(psi: np.ndarray, sector: SectorBasis) -> SectorVector:
    """Sector amplitudes ``<a, omega|psi>`` of a parent-basis vector (adjoint of expand)."""
    psi = np.asarray(psi)
    inside = sector.member_rep >= 0
    w = sector.phase(sector.member_shift[inside]) / np.sqrt(sector.member_period[inside])
    contrib = psi[inside] * w
    rows = sector.member_rep[inside]
    if np.iscomplexobj(contrib):
        amps = np.bincount(rows, contrib.real, sector.dim) + 1j * np.bincount(rows, contrib.imag, sector.dim)
    else:
        amps = np.bincount(rows, contrib, sector.dim)
    return SectorVector(sector, amps)


def sector_state(sector: SectorBasis, state) -> SectorVector:
    """The normalized sector state built on the orbit of a Fock state."""
    idx = sector.parent.index_of(state)
    j = int(idx[0])
    if j < 0:
        raise ConfigError("state is not in the parent basis")
    a = int(sector.member_rep[j])
    if a < 0:
        raise ConfigError("this orbit does not support the requested sector")
    amps = np.zeros(sector.dim, dtype=float if sector.is_real else complex)
    amps[a] = 1.0
    return SectorVector(sector, amps)
