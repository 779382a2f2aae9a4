import numpy as np
import pytest

import oracle
from scarlett import fock_basis as fb
from scarlett import graph as gr
from scarlett import hamiltonian as ham
from scarlett import symmetry as sy
from scarlett.errors import ConfigError


def test_l3_dimensions():
    basis = fb.enumerate_basis(3, 3)
    dims = [sy.build_momentum_sector(basis, k).dim for k in range(3)]
    # projector traces from oracle.momentum_dims(3, 3)
    assert dims == [4, 3, 3]
    k0 = sy.build_momentum_sector(basis, 0)
    reps = {fb.format_state(s) for s in k0.representatives}
    # representative = lexicographically largest member
    assert reps == {"300", "210", "201", "111"}


@pytest.mark.parametrize("L", range(2, 7))
def test_dims_match_projector_oracle(L):
    basis = fb.enumerate_basis(L, L)
    dims = [sy.build_momentum_sector(basis, k).dim for k in range(L)]
    assert dims == oracle.momentum_dims(L, L)


@pytest.mark.parametrize("L", range(1, 9))
def test_sector_completeness(L):
    basis = fb.enumerate_basis(L, L)
    assert sum(sy.build_momentum_sector(basis, k).dim for k in range(L)) == basis.dim


def test_representative_is_orbit_minimum():
    basis = fb.enumerate_basis(6, 6)
    sec = sy.build_momentum_sector(basis, 0)
    for j in range(basis.dim):
        rep = sec.rep_index[sec.member_rep[j]]
        orbit = [basis.index_of(fb.translate(basis.states[j], r))[0] for r in range(6)]
        assert rep == min(orbit)
        assert np.array_equal(fb.translate(basis.states[rep], sec.member_shift[j]), basis.states[j])


def test_expand_k0_orbit_sum():
    basis = fb.enumerate_basis(3, 3)
    sec = sy.build_momentum_sector(basis, 0)
    v = sy.sector_state(sec, [2, 1, 0])
    full = sy.expand_to_full(v)
    expect = np.zeros(basis.dim)
    for s in ([2, 1, 0], [0, 2, 1], [1, 0, 2]):
        expect[basis.index_of(s)[0]] = 1 / np.sqrt(3)
    assert np.allclose(full, expect, atol=1e-15)


def test_trivial_sector_is_identity():
    basis = fb.enumerate_basis(4, 4)
    sec = sy.trivial_sector(basis)
    x = np.random.default_rng(0).normal(size=basis.dim)
    assert np.array_equal(sy.expand_to_full(sy.SectorVector(sec, x)), x)


def test_expand_is_isometry():
    rng = np.random.default_rng(3)
    basis = fb.enumerate_basis(6, 6)
    for k in range(6):
        sec = sy.build_momentum_sector(basis, k)
        u = rng.normal(size=sec.dim) + 1j * rng.normal(size=sec.dim)
        v = rng.normal(size=sec.dim) + 1j * rng.normal(size=sec.dim)
        eu = sy.expand_to_full(sy.SectorVector(sec, u))
        ev = sy.expand_to_full(sy.SectorVector(sec, v))
        assert abs(np.vdot(eu, ev) - np.vdot(u, v)) < 1e-12 * max(1, abs(np.vdot(u, v)))
        assert np.allclose(sy.project(eu, sec).amplitudes, u, atol=1e-12)


def test_momentum_eigenvalue_of_expanded_vectors():
    basis = fb.enumerate_basis(5, 5)
    for k in range(5):
        sec = sy.build_momentum_sector(basis, k)
        v = sy.expand_to_full(sy.SectorVector(sec, np.ones(sec.dim, dtype=complex)))
        shifted = np.zeros_like(v)
        shifted[basis.index_of(np.ascontiguousarray(fb.translate(basis.states, 1)))] = v
        assert np.allclose(shifted, np.exp(1j * 2 * np.pi * k / 5) * v, atol=1e-12)


def test_inversion_sectors():
    single = fb.StateSubset.from_states([[1, 2, 1]], 3, 4, periodic=False)
    assert sy.build_inversion_sector(single, 0).dim == 1
    assert sy.build_inversion_sector(single, 1).dim == 0
    comp = gr.largest_component(12)
    d0 = sy.build_inversion_sector(comp, 0).dim
    d1 = sy.build_inversion_sector(comp, 1).dim
    assert d0 + d1 == comp.dim


def test_inversion_blocks_match_spectrum():
    comp = gr.largest_component(10)
    full = np.linalg.eigvalsh(ham.build_operator("H3", comp).toarray())
    parts = []
    for I in (0, 1):
        op = ham.build_operator("H3", sy.build_inversion_sector(comp, I))
        assert not op.is_complex
        parts.append(np.linalg.eigvalsh(op.toarray()))
    assert np.allclose(np.sort(np.concatenate(parts)), full, atol=1e-10)


def test_errors():
    basis = fb.enumerate_basis(4, 4)
    with pytest.raises(ConfigError):
        sy.build_momentum_sector(basis, 4)
    with pytest.raises(ConfigError):
        sy.build_momentum_sector(fb.enumerate_basis(4, 4, periodic=False), 0)
    with pytest.raises(ConfigError):
        sy.build_inversion_sector(basis, 2)
