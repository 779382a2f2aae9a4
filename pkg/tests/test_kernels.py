import numpy as np
import pytest

from scarlett import fock_basis as fb
from scarlett import hamiltonian as ham
from scarlett import kernels

try:
    CY = kernels.backend_module("cython")
except ImportError:  # pragma: no cover - compiled core missing
    CY = None
PY = kernels.backend_module("python")

needs_cython = pytest.mark.skipif(CY is None, reason="compiled core not built")


def test_backend_names():
    assert kernels.BACKEND in ("cython", "python")
    with pytest.raises(ValueError):
        kernels.backend_module("fortran")
    with pytest.raises(ValueError):
        kernels.set_threads(0)


@pytest.mark.parametrize("L,Np", [(1, 4), (3, 3), (5, 4), (7, 7), (4, 9)])
def test_python_enumeration_is_lexicographic(L, Np):
    D = fb.count_states(L, Np)
    st = PY.enumerate_compositions(L, Np, D)
    assert st.shape == (D, L)
    assert [tuple(r) for r in st] == sorted({tuple(r) for r in st}, reverse=True)


@needs_cython
@pytest.mark.parametrize("L,Np", [(1, 4), (3, 3), (5, 4), (7, 7), (4, 9), (9, 9)])
def test_enumerate_and_rank_agree(L, Np):
    D = fb.count_states(L, Np)
    a = CY.enumerate_compositions(L, Np, D)
    b = PY.enumerate_compositions(L, Np, D)
    assert np.array_equal(a, b)
    table = fb.rank_table(L, Np)
    assert np.array_equal(CY.rank_states(a, table, Np), np.arange(D))
    assert np.array_equal(PY.rank_states(a, table, Np), np.arange(D))


@needs_cython
@pytest.mark.parametrize("model", range(6))
@pytest.mark.parametrize("periodic", [True, False])
def test_hop_ranks_agree(model, periodic):
    L = Np = 6
    basis = fb.enumerate_basis(L, Np)
    table = fb.rank_table(L, Np)
    a = CY.hop_ranks(basis.states, model, periodic, table, Np)
    b = PY.hop_ranks(basis.states, model, periodic, table, Np)
    for x, y in zip(a, b):
        assert np.allclose(np.asarray(x), np.asarray(y))


@needs_cython
@pytest.mark.parametrize("L", [3, 4, 5, 6, 7])
def test_orbit_data_agree(L):
    basis = fb.enumerate_basis(L, L)
    table = fb.rank_table(L, L)
    for x, y in zip(CY.orbit_data(basis.states, table, L), PY.orbit_data(basis.states, table, L)):
        assert np.array_equal(np.asarray(x), np.asarray(y))


@needs_cython
@pytest.mark.parametrize("L,Np", [(L, L) for L in range(2, 10)] + [(5, 3), (4, 6)])
def test_colors_and_census_agree(L, Np):
    basis = fb.enumerate_basis(L, Np)
    for periodic in (True, False):
        assert np.array_equal(np.asarray(CY.colors(basis.states, Np, periodic)), PY.colors(basis.states, Np, periodic))
    assert tuple(CY.census(L, Np, basis.dim)) == tuple(PY.census(L, Np, basis.dim))


@needs_cython
def test_csr_matvec_agree():
    op = ham.full_operator("H1", 7, 7)
    m = op.matrix
    rng = np.random.default_rng(0)
    x = rng.normal(size=op.dim) + 1j * rng.normal(size=op.dim)
    a = np.empty_like(x)
    b = np.empty_like(x)
    CY.csr_matvec(m.indptr, m.indices, m.data, x, a, 1)
    PY.csr_matvec(m.indptr, m.indices, m.data, x, b, 1)
    assert np.allclose(a, b, atol=1e-12)
    assert np.allclose(a, m @ x, atol=1e-12)
