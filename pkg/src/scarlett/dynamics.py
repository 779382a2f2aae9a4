"""Quench dynamics: dense and Krylov propagation plus observable time series."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import CapacityError, ConfigError, ConvergenceError
from .fock_basis import BasisTable, StateSubset, _as_states, enumerate_basis, parse_pattern
from .hamiltonian import ModelKind, SparseOperator, as_model, build_operator
from .spectral import Bipartition
from .symmetry import SectorBasis, SectorVector, expand_to_full

DENSE_EVOLVE_LIMIT = 5_000
KRYLOV_DIM = 30
KRYLOV_TOL = 1e-10
MAX_HALVINGS = 40

OBSERVABLES = ("fidelity", "entropy", "n_site", "nn_correlation", "cluster_overlap", "energy", "norm")


def time_grid(tmax: float = 10.0, dt: float = 0.01) -> np.ndarray:
    if tmax < 0 or dt <= 0:
        raise ConfigError(f"need tmax >= 0 and dt > 0, got tmax={tmax}, dt={dt}")
    n = int(round(tmax / dt))
    return np.arange(n + 1) * dt


def _check_grid(times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ConfigError("time grid must start at 0 and increase strictly")
    return t


class DensePropagator:
    """``exp(-iHt)`` from a full eigendecomposition."""

    def __init__(self, op: SparseOperator):
        if op.dim > 4 * DENSE_EVOLVE_LIMIT:
            raise CapacityError(f"dense propagation of dim {op.dim} is too large")
        self.E, self.V = np.linalg.eigh(op.toarray())

    def series(self, psi0: np.ndarray, times: np.ndarray):
        c = self.V.conj().T @ psi0
        for t in times:
            yield self.V @ (np.exp(-1j * self.E * t) * c)


def lanczos(matvec: Callable, v0: np.ndarray, m: int):
    """Orthonormal Krylov basis (rows of ``V``) and tridiagonal ``T``.

    Fully reorthogonalized. Returns ``(V, alpha, beta, beta_next, norm0)`` where
    ``beta_next`` couples the last basis vector to the rest of the space.
    """
    n = v0.size
    norm0 = float(np.linalg.norm(v0))
    V = np.empty((m + 1, n), dtype=np.complex128)
    V[0] = v0 / norm0
    alpha = np.zeros(m)
    beta = np.zeros(m)
    w = np.empty(n, dtype=np.complex128)
    for j in range(m):
        matvec(V[j], w)
        alpha[j] = np.vdot(V[j], w).real
        coef = V[: j + 1].conj() @ w
        w -= coef @ V[: j + 1]
        coef = V[: j + 1].conj() @ w
        w -= coef @ V[: j + 1]
        b = float(np.linalg.norm(w))
        beta[j] = b
        if b < 1e-13 * max(1.0, abs(alpha[j])):
            # invariant subspace: the expansion is exact
            return V[: j + 1], alpha[: j + 1], beta[:j], 0.0, norm0
        V[j + 1] = w / b
    return V[:m], alpha, beta[: m - 1], beta[m - 1], norm0


class KrylovPropagator:
    """Lanczos exponential with one basis reused over as many grid points as the error allows.

    The a-posteriori estimate for a step ``tau`` is
    ``beta_next * |[exp(-i T tau) e_1]_m|``; a step that misses ``tol`` is
    halved until it passes.
    """

    def __init__(self, op: SparseOperator, m: int = KRYLOV_DIM, tol: float = KRYLOV_TOL):
        self.op, self.m, self.tol = op, int(m), float(tol)
        self.bases_built = 0

    def _matvec(self, x, out):
        self.op.matvec(x, out)

    def series(self, psi0: np.ndarray, times: np.ndarray):
        psi = np.ascontiguousarray(psi0, dtype=np.complex128)
        t_now = 0.0
        k = 0
        if times[0] == 0.0:
            yield psi.copy()
            k = 1
        m = min(self.m, self.op.dim)
        while k < times.size:
            V, a, b, b_next, nrm = lanczos(self._matvec, psi, m)
            self.bases_built += 1
            T = np.diag(a) + np.diag(b, 1) + np.diag(b, -1)
            theta, S = np.linalg.eigh(T)
            s0 = S[0].copy()

            def coeffs(tau):
                return nrm * (S @ (np.exp(-1j * theta * tau) * s0))

            def err(tau):
                return abs(b_next * coeffs(tau)[-1])

            advanced = False
            while k < times.size and err(times[k] - t_now) <= self.tol:
                yield coeffs(times[k] - t_now) @ V
                k += 1
                advanced = True
            if k >= times.size:
                return
            if advanced:
                psi = np.ascontiguousarray(coeffs(times[k - 1] - t_now) @ V)
                t_now = times[k - 1]
                continue
            tau = times[k] - t_now
            for _ in range(MAX_HALVINGS):
                tau *= 0.5
                if err(tau) <= self.tol:
                    break
            else:
                raise ConvergenceError(f"Krylov step below {tau:g} still misses tol {self.tol:g}")
            psi = np.ascontiguousarray(coeffs(tau) @ V)
            t_now += tau


@dataclass
class QuenchSpec:
    """What to evolve and what to record.

    ``initial`` is an occupation vector, a pattern string like ``"210x4"``, or a
    ``SectorVector``. ``cut`` is ``(L_A, offset)`` for the entropy.
    """

    model: ModelKind | str
    initial: object
    times: np.ndarray
    cut: tuple[int, int] | None = None
    observables: Sequence[str] = ("fidelity",)
    cluster: StateSubset | None = None
    periodic: bool = True
    method: str = "auto"
    sites: tuple[int, int] = (0, 1)

    def __post_init__(self):
        self.model = as_model(self.model)
        self.times = _check_grid(self.times)
        bad = [o for o in self.observables if o not in OBSERVABLES]
        if bad:
            raise ConfigError(f"unknown observables {bad}; choose from {OBSERVABLES}")
        if "cluster_overlap" in self.observables and self.cluster is None:
            raise ConfigError("cluster_overlap needs a cluster")
        if self.method not in ("auto", "dense", "krylov"):
            raise ConfigError(f"unknown method {self.method!r}")


@dataclass(eq=False)
class TimeSeriesSet:
    times: np.ndarray
    series: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.series[name]

    def summary(self) -> dict:
        out = dict(self.meta)
        if "fidelity" in self.series:
            pk = first_peak(self.times, self.series["fidelity"])
            out["first_peak_time"] = None if pk is None else pk[0]
            out["first_peak_height"] = None if pk is None else pk[1]
        return out

    def write_csv(self, target) -> None:
        """Write ``t`` plus one column per series to a path or an open text stream."""
        if hasattr(target, "write"):
            self._write(target)
            return
        with open(target, "w", newline="") as fh:
            self._write(fh)

    def _write(self, fh) -> None:
        names = list(self.series)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", *names])
        for i, t in enumerate(self.times):
            w.writerow([f"{t:.10g}", *(f"{self.series[n][i]:.15e}" for n in names)])


def _setup(spec: QuenchSpec):
    """Evolution basis, operator, initial vector, and the parent basis for observables."""
    init = spec.initial
    if isinstance(init, SectorVector):
        sector = init.sector
        op = build_operator(spec.model, sector, spec.periodic)
        psi0 = np.asarray(init.amplitudes, dtype=np.complex128)
        return sector, op, psi0 / np.linalg.norm(psi0), sector.parent
    if isinstance(init, str):
        init = parse_pattern(init)
    state = _as_states(init)
    L, Np = state.shape[1], int(state.sum())
    basis = enumerate_basis(L, Np, periodic=spec.periodic)
    op = build_operator(spec.model, basis, spec.periodic)
    psi0 = np.zeros(basis.dim, dtype=np.complex128)
    psi0[basis.index_of(state)[0]] = 1.0
    return basis, op, psi0, basis


def propagator(op: SparseOperator, method: str = "auto"):
    if method == "dense" or (method == "auto" and op.dim <= DENSE_EVOLVE_LIMIT):
        return DensePropagator(op)
    return KrylovPropagator(op)


def evolve(spec: QuenchSpec) -> TimeSeriesSet:
    """Evolve ``spec.initial`` under ``spec.model`` and record the requested series."""
    basis, op, psi0, parent = _setup(spec)
    prop = propagator(op, spec.method)
    sector = basis if isinstance(basis, SectorBasis) else None
    obs = list(spec.observables)
    need_full = any(o in obs for o in ("entropy", "n_site", "nn_correlation", "cluster_overlap"))

    L = parent.L
    cut = None
    if "entropy" in obs:
        L_A, off = spec.cut if spec.cut is not None else (L // 2, 0)
        cut = Bipartition(parent, L_A, off)
    n_i = n_ij = None
    if "n_site" in obs or "nn_correlation" in obs:
        i, j = spec.sites
        n_i = parent.states[:, i % L].astype(float)
        n_ij = n_i * parent.states[:, j % L]
    members = None
    if spec.cluster is not None:
        if spec.cluster.L != L or spec.cluster.Np != parent.Np:
            raise ConfigError("cluster and evolution basis differ in L or Np")
        members = parent.index_of(spec.cluster.states)
        if np.any(members < 0):
            raise ConfigError("cluster is not contained in the evolution basis")

    n_t = spec.times.size
    out = {o: np.empty(n_t) for o in obs}
    if "n_site" in out:
        out[f"n_{spec.sites[0] + 1}"] = out.pop("n_site")
    if "nn_correlation" in out:
        out[f"n{spec.sites[0] + 1}n{spec.sites[1] + 1}"] = out.pop("nn_correlation")
    for k, psi in enumerate(prop.series(psi0, spec.times)):
        if "fidelity" in obs:
            out["fidelity"][k] = abs(np.vdot(psi0, psi)) ** 2
        if "norm" in obs:
            out["norm"][k] = np.linalg.norm(psi)
        if "energy" in obs:
            out["energy"][k] = np.vdot(psi, op.matvec(psi)).real
        if need_full:
            full = expand_to_full(SectorVector(sector, psi)) if sector is not None else psi
            p = np.abs(full) ** 2
            if cut is not None:
                out["entropy"][k] = cut.entropy(full)
            if n_i is not None:
                if "n_site" in obs:
                    out[f"n_{spec.sites[0] + 1}"][k] = p @ n_i
                if "nn_correlation" in obs:
                    out[f"n{spec.sites[0] + 1}n{spec.sites[1] + 1}"][k] = p @ n_ij
            if members is not None:
                out["cluster_overlap"][k] = p[members].sum()
    meta = {
        "model": spec.model.tag, "L": L, "Np": parent.Np, "dimension": op.dim,
        "method": type(prop).__name__.replace("Propagator", "").lower(),
    }
    if isinstance(prop, KrylovPropagator):
        meta["krylov_bases"] = prop.bases_built
    return TimeSeriesSet(spec.times, out, meta)


def fidelity_series(spec: QuenchSpec) -> np.ndarray:
    spec.observables = ("fidelity",)
    return evolve(spec)["fidelity"]


def local_densities(psi: np.ndarray, basis) -> np.ndarray:
    """``<n_j>`` for every site."""
    p = np.abs(np.asarray(psi)) ** 2
    return p @ basis.states.astype(float)


def find_peaks(times: np.ndarray, values: np.ndarray) -> list[tuple[float, float]]:
    """Interior local maxima, refined by a parabola through the three grid points."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    out = []
    for i in range(1, v.size - 1):
        if v[i - 1] < v[i] >= v[i + 1]:
            out.append(_parabola(t[i - 1:i + 2], v[i - 1:i + 2]))
    return out


def _parabola(t, v) -> tuple[float, float]:
    c2, c1, c0 = np.polyfit(t - t[1], v, 2)
    if c2 >= 0:
        return float(t[1]), float(v[1])
    x = -c1 / (2 * c2)
    x = min(max(x, t[0] - t[1]), t[2] - t[1])
    return float(t[1] + x), float(c0 + c1 * x + c2 * x * x)


def first_peak(times, values, t_min: float = 0.0) -> tuple[float, float] | None:
    """First revival: the first local maximum after ``t_min``."""
    for pk in find_peaks(times, values):
        if pk[0] > t_min:
            return pk
    return None


def dominant_frequency(times, values, pad: int = 8) -> float:
    """Angular frequency of the largest nonzero Fourier component (uniform grid)."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    v = (v - v.mean()) * np.hanning(v.size)
    dt = t[1] - t[0]
    spec = np.abs(np.fft.rfft(v, n=pad * v.size))
    freqs = np.fft.rfftfreq(pad * v.size, dt)
    i = int(np.argmax(spec[1:])) + 1
    return float(2 * np.pi * freqs[i])
