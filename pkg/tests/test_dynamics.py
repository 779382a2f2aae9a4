import numpy as np
import pytest

from scarlett import cluster as cl
from scarlett import dynamics as dyn
from scarlett import fock_basis as fb
from scarlett import hamiltonian as ham
from scarlett import symmetry as sy
from scarlett.errors import ConfigError


def _full_vector(basis, weights):
    psi = np.zeros(basis.dim, dtype=complex)
    for s, w in weights.items():
        psi[basis.index_of(fb.parse_pattern(s))[0]] += w
    return psi / np.linalg.norm(psi)


def test_time_grid():
    t = dyn.time_grid(1.0, 0.25)
    assert np.allclose(t, [0, 0.25, 0.5, 0.75, 1.0])
    with pytest.raises(ConfigError):
        dyn.time_grid(1.0, 0.0)
    with pytest.raises(ConfigError):
        dyn.QuenchSpec("H1", "210", np.array([0.1, 0.2]))


@pytest.mark.parametrize("model", ["H1", "H2", "H1a", "H1b", "H3"])
def test_krylov_matches_dense(model):
    times = dyn.time_grid(3.0, 0.05)
    obs = ("fidelity", "entropy", "norm", "energy")
    a = dyn.evolve(dyn.QuenchSpec(model, "210x2", times, observables=obs, method="dense"))
    b = dyn.evolve(dyn.QuenchSpec(model, "210x2", times, observables=obs, method="krylov"))
    assert b.meta["method"] == "krylov"
    for name in obs:
        assert np.allclose(a[name], b[name], atol=1e-8), name


def test_norm_and_energy_conserved():
    times = dyn.time_grid(5.0, 0.1)
    res = dyn.evolve(dyn.QuenchSpec("H1", "2020x2", times, observables=("norm", "energy"), method="krylov"))
    assert np.allclose(res["norm"], 1.0, atol=1e-10)
    assert np.allclose(res["energy"], 0.0, atol=1e-9)


def test_propagator_is_unitary():
    basis = fb.enumerate_basis(5, 5)
    op = ham.build_operator("H2", basis)
    rng = np.random.default_rng(0)
    X = rng.normal(size=(basis.dim, 2)) + 1j * rng.normal(size=(basis.dim, 2))
    X /= np.linalg.norm(X, axis=0)
    times = np.array([0.0, 0.7, 1.9])
    prop = dyn.KrylovPropagator(op)
    u = list(prop.series(X[:, 0], times))
    v = list(prop.series(X[:, 1], times))
    for a, b in zip(u, v):
        assert abs(np.vdot(a, b) - np.vdot(X[:, 0], X[:, 1])) < 1e-9


def test_lanczos_stops_on_invariant_subspace():
    basis = fb.enumerate_basis(6, 6)
    op = ham.build_operator("H3", basis)
    psi = _full_vector(basis, {"210210": 1.0})
    V, a, b, b_next, nrm = dyn.lanczos(lambda x, out: op.matvec(x, out), psi, 30)
    # cells are identical, so the orbit {aa, ab+ba, bb} spans the Krylov space
    assert V.shape[0] == 3 and b_next == 0.0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_h3_product_state_is_exact(n):
    times = dyn.time_grid(np.pi, 0.01)
    res = dyn.evolve(dyn.QuenchSpec("H3", f"210x{n}", times))
    assert np.max(np.abs(res["fidelity"] - cl.h3_fidelity(n, times))) < 1e-9


@pytest.mark.parametrize("n", [2, 3])
def test_h3_symmetric_state_doubles_frequency(n):
    basis = fb.enumerate_basis(3 * n, 3 * n)
    weights = {}
    for r in range(3):
        for cell in ("210", "120"):
            s = fb.format_state(fb.translate(fb.parse_pattern(f"{cell}x{n}"), r))
            weights[s] = 1.0
    psi = _full_vector(basis, weights)
    vec = sy.SectorVector(sy.trivial_sector(basis), psi)
    times = dyn.time_grid(np.pi, 0.01)
    res = dyn.evolve(dyn.QuenchSpec("H3", vec, times))
    assert np.max(np.abs(res["fidelity"] - cl.h3_fidelity(n, times, symmetrized=True))) < 1e-9
    pk = dyn.first_peak(times, res["fidelity"], t_min=0.1)
    assert pk[0] == pytest.approx(np.pi / 4, abs=1e-3)


def test_sector_evolution_matches_full():
    basis = fb.enumerate_basis(6, 6)
    sec = sy.build_momentum_sector(basis, 0)
    v = sy.sector_state(sec, fb.parse_pattern("210x2"))
    full = sy.expand_to_full(v)
    times = dyn.time_grid(2.0, 0.05)
    obs = ("fidelity", "entropy", "n_site", "nn_correlation")
    a = dyn.evolve(dyn.QuenchSpec("H1", v, times, observables=obs))
    b = dyn.evolve(dyn.QuenchSpec("H1", sy.SectorVector(sy.trivial_sector(basis), full), times, observables=obs))
    for name in a.series:
        assert np.allclose(a[name], b[name], atol=1e-10), name


def test_local_observables():
    times = dyn.time_grid(1.0, 0.1)
    res = dyn.evolve(dyn.QuenchSpec("H1", "210x2", times, observables=("n_site", "nn_correlation"), sites=(0, 1)))
    assert res["n_1"][0] == pytest.approx(2.0) and res["n1n2"][0] == pytest.approx(2.0)
    basis = fb.enumerate_basis(3, 3)
    psi = _full_vector(basis, {"210": 1.0, "120": 1.0})
    assert np.allclose(dyn.local_densities(psi, basis), [1.5, 1.5, 0.0])


def test_cluster_overlap_bounds_fidelity():
    spec = cl.ClusterSpec.family("minimal", 2)
    times = dyn.time_grid(2.0, 0.02)
    res = dyn.evolve(dyn.QuenchSpec("H1", "210x2", times, observables=("fidelity", "cluster_overlap"),
                                    cluster=cl.build_cluster_basis(spec)))
    assert np.all(res["cluster_overlap"] >= res["fidelity"] - 1e-12)
    assert res["cluster_overlap"][0] == pytest.approx(1.0)


def test_csv_and_summary(tmp_path):
    times = dyn.time_grid(2.0, 0.01)
    res = dyn.evolve(dyn.QuenchSpec("H3", "210x2", times))
    path = tmp_path / "f.csv"
    res.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,fidelity" and len(lines) == times.size + 1
    s = res.summary()
    assert s["first_peak_time"] == pytest.approx(np.pi / 2, abs=1e-3)
    assert s["first_peak_height"] == pytest.approx(1.0, abs=1e-6)
    assert s["dimension"] == 462


def test_peak_tools():
    t = dyn.time_grid(3.0, 0.01)
    f = np.cos(2.5 * t) ** 2
    pk = dyn.first_peak(t, f)
    assert pk[0] == pytest.approx(np.pi / 2.5, abs=1e-4)
    assert pk[1] == pytest.approx(1.0, abs=1e-4)
    assert dyn.dominant_frequency(dyn.time_grid(40.0, 0.01), np.cos(3.0 * dyn.time_grid(40.0, 0.01))) == pytest.approx(3.0, abs=0.02)
    assert dyn.find_peaks(t, t) == []


def test_bad_observable():
    with pytest.raises(ConfigError):
        dyn.QuenchSpec("H1", "210", dyn.time_grid(1, 0.1), observables=("magnetization",))
    with pytest.raises(ConfigError):
        dyn.QuenchSpec("H1", "210", dyn.time_grid(1, 0.1), observables=("cluster_overlap",))
