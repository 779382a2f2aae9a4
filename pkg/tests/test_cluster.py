import numpy as np
import pytest

from scarlett import cluster as cl
from scarlett import dynamics as dyn
from scarlett import fock_basis as fb
from scarlett import hamiltonian as ham
from scarlett.errors import ConfigError

R2, R3 = np.sqrt(2.0), np.sqrt(3.0)


def _projected(family, n=1, order=None):
    spec = cl.ClusterSpec.family(family, n)
    basis = cl.build_cluster_basis(spec)
    H = ham.build_operator("H1", basis).toarray()
    if order is None:
        return basis, H
    idx = [basis.index_of(fb.parse_pattern(s))[0] for s in order]
    return basis, H[np.ix_(idx, idx)]


def test_minimal_cell_matrix():
    _, H = _projected("minimal", order=("300", "210", "120"))
    expect = -np.array([[0, 2 * R3, 0], [2 * R3, 0, 2], [0, 2, 0]])
    assert np.allclose(H, expect, rtol=0, atol=1e-15)
    assert np.allclose(np.linalg.eigvalsh(H), [-4, 0, 4])


def test_extended_cell_matrix():
    _, H = _projected("extended", order=("300", "210", "120", "111"))
    assert np.allclose(H, cl.extended_cell_matrix(), atol=1e-15)
    assert H[2, 3] == pytest.approx(-R2, abs=1e-15)


def test_cells_decouple():
    basis, H = _projected("minimal", n=3)
    assert basis.dim == 27
    E = np.sort(np.linalg.eigvalsh(H))
    one = np.array([-4.0, 0.0, 4.0])
    sums = np.sort(np.add.outer(np.add.outer(one, one), one).ravel())
    assert np.allclose(E, sums, atol=1e-12)


def test_cluster_fidelity_matches_projected_evolution():
    spec = cl.ClusterSpec.family("extended", 2)
    basis = cl.build_cluster_basis(spec)
    op = ham.build_operator("H1", basis)
    times = dyn.time_grid(3.0, 0.01)
    psi0 = np.zeros(basis.dim, dtype=complex)
    psi0[basis.index_of(fb.parse_pattern("210x2"))[0]] = 1
    F = [abs(np.vdot(psi0, p)) ** 2 for p in dyn.DensePropagator(op).series(psi0, times)]
    assert np.allclose(F, cl.extended_cluster_fidelity(2, times), atol=1e-12)

    spec = cl.ClusterSpec.family("minimal", 3)
    basis = cl.build_cluster_basis(spec)
    op = ham.build_operator("H1", basis)
    psi0 = np.zeros(basis.dim, dtype=complex)
    psi0[basis.index_of(fb.parse_pattern("210x3"))[0]] = 1
    F = [abs(np.vdot(psi0, p)) ** 2 for p in dyn.DensePropagator(op).series(psi0, times)]
    assert np.allclose(F, cl.minimal_cluster_fidelity(3, times), atol=1e-12)


def test_independence_of_cells():
    t = np.linspace(0, 3, 301)
    for n in (2, 3, 5):
        assert np.allclose(cl.minimal_cluster_fidelity(n, t), cl.minimal_cluster_fidelity(1, t) ** n)
        assert np.allclose(cl.extended_cluster_fidelity(n, t), cl.extended_cluster_fidelity(1, t) ** n)
        assert np.allclose(cl.h3_fidelity(n, t), cl.h3_fidelity(1, t) ** n)


def test_extended_constants():
    s = cl.solve_extended_constants()
    # roots of E^4 - 18 E^2 + 24 = 0, from the characteristic polynomial of the cell
    assert s.alpha == pytest.approx(np.sqrt(9 + np.sqrt(57)), abs=1e-12)
    assert s.beta == pytest.approx(np.sqrt(9 - np.sqrt(57)), abs=1e-12)
    v = np.array([s.a, s.b, s.c, s.d])
    assert np.allclose(cl.extended_cell_matrix() @ v, -s.alpha * v)
    assert 2 * (s.b**2 + s.d**2) == pytest.approx(1.0)
    assert s.period == pytest.approx(np.pi / s.alpha)


def test_extended_peak_law():
    kappa = cl.extended_decay_rate()
    for L in (3, 6, 9, 30):
        assert cl.extended_peak_height(L) == pytest.approx(np.exp(-kappa * L), rel=1e-12)
    with pytest.raises(ConfigError):
        cl.extended_peak_height(10)


def test_h3_formulas():
    assert cl.h3_fidelity(2, np.pi / 4, symmetrized=True) == pytest.approx(1.0)
    assert cl.h3_fidelity(2, np.pi / 4) == pytest.approx(0.0, abs=1e-30)
    assert cl.h3_fidelity(3, np.pi / 2) == pytest.approx(1.0)


def test_generalized_reduces_to_minimal():
    t = np.linspace(0, 2, 201)
    assert np.allclose(cl.generalized_cluster_fidelity(3, 2, t), cl.minimal_cluster_fidelity(2, t), atol=1e-12)
    assert cl.generalized_patterns(3) == ("300", "210", "120")


@pytest.mark.parametrize("N", [3, 4, 5])
def test_generalized_matrix_matches_projection(N):
    M = cl.generalized_cluster_matrix(N).toarray()
    basis = cl.build_cluster_basis(cl.ClusterSpec(cl.generalized_patterns(N), 1))
    H = ham.build_operator("H1", basis).toarray()
    idx = [basis.index_of(fb.parse_pattern(p))[0] for p in cl.generalized_patterns(N)]
    assert np.allclose(H[np.ix_(idx, idx)], M, atol=1e-13)


def test_bad_specs():
    with pytest.raises(ConfigError):
        cl.ClusterSpec(("210", "12"), 1)
    with pytest.raises(ConfigError):
        cl.ClusterSpec.family("huge", 1)
    with pytest.raises(ConfigError):
        cl.generalized_patterns(1)
