import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from loclab import manybody
from loclab.freefermion import diagonalize, free_correlations
from loclab.models import (Boundary, LatticeSpec, ManyBodyHamiltonianSpec, build_aa_manybody, build_aa_single,
                           terms_from_matrix)


def _aa(n, m, delta, v, boundary=Boundary.PERIODIC):
    spec = ManyBodyHamiltonianSpec(LatticeSpec(n, boundary, m), 1.0, delta, V=v)
    basis = manybody.build_basis(n, m)
    return manybody.assemble(build_aa_manybody(spec), basis), basis


def test_basis_enumeration():
    b = manybody.build_basis(4, 2)
    assert [format(s, "04b") for s in b.states] == ["0011", "0101", "0110", "1001", "1010", "1100"]
    assert len(manybody.build_basis(12, 6)) == 924
    assert len(manybody.build_basis(18, 9)) == 48620
    assert np.array_equal(b.index(b.states[::-1]), np.arange(6)[::-1])
    with pytest.raises(KeyError):
        b.index([0b0111])


def test_basis_limits():
    with pytest.raises(ValueError):
        manybody.build_basis(25, 3)
    with pytest.raises(ValueError):
        manybody.build_basis(4, 0)


@pytest.mark.parametrize("n,m,boundary", [(4, 2, "periodic"), (5, 2, "open"), (7, 3, "periodic"), (8, 4, "open")])
def test_free_limit_energy(n, m, boundary):
    h, basis = _aa(n, m, 1.3, 0.0, Boundary(boundary))
    st_ = manybody.ground_state(h, basis)
    orb = diagonalize(build_aa_single(n, 1.0, 1.3, boundary=boundary, filling=m))
    assert st_.energy == pytest.approx(orb.energies[:m].sum(), abs=1e-10)


def test_two_site_single_particle():
    h, _ = _aa(2, 1, 0.0, 0.0)
    hop = build_aa_single(2, 1.0, 0.0).matrix[0, 1]
    assert np.allclose(np.linalg.eigvalsh(h.toarray()), [-abs(hop), abs(hop)])


def test_interacting_energy_fixture():
    # dense eigensolve of the 924-state problem, frozen
    h, basis = _aa(12, 6, 1.0, 0.25)
    assert abs(h - h.conj().T).max() == 0
    assert manybody.ground_state(h, basis).energy == pytest.approx(-8.335764922269663, abs=1e-9)


def test_one_by_one():
    st_ = manybody.ground_state(sp.csr_matrix(np.array([[2.5]])))
    assert st_.energy == 2.5 and np.allclose(np.abs(st_.amplitudes), 1.0)


def test_dense_and_iterative_agree():
    h, basis = _aa(14, 7, 3.0, 0.25)
    dense = manybody.ground_state(h, basis, method="dense")
    it = manybody.ground_state(h, basis, method="iterative")
    assert dense.energy == pytest.approx(it.energy, abs=1e-8)
    assert np.allclose(np.abs(dense.amplitudes), np.abs(it.amplitudes), atol=1e-6)
    assert it.metadata["monotone"]
    assert it.metadata["residual"] < 1e-8


def test_lanczos_raises_without_budget():
    h, _ = _aa(10, 5, 1.0, 0.25)
    v0 = np.ones(h.shape[0]) / np.sqrt(h.shape[0])
    with pytest.raises(manybody.ConvergenceError):
        manybody.lanczos(h, v0, tol=1e-14, krylov_dim=3, max_restarts=2)


def test_single_state_correlator():
    basis = manybody.build_basis(4, 2)
    amps = np.zeros(6)
    amps[basis.index([0b0101])[0]] = 1.0
    corr = manybody.density_density_mb(manybody.ManyBodyState(basis, amps, 0.0))
    bits = np.array([1, 0, 1, 0])
    assert np.allclose(corr.nn, np.outer(bits, bits))
    assert np.allclose(corr.c, 0.0)


@pytest.mark.parametrize("n", [6, 8, 10])
def test_free_limit_correlator_matches_wick(n):
    h, basis = _aa(n, n // 2, 2.2, 0.0)
    c_ed = manybody.density_density_mb(manybody.ground_state(h, basis)).c
    _, corr = free_correlations(build_aa_single(n, 1.0, 2.2))
    assert np.allclose(c_ed, corr.c, atol=1e-9)
    assert np.allclose(c_ed.sum(axis=1), 0.0, atol=1e-10)


@given(st.integers(2, 7), st.data())
def test_assembled_matrix_is_hermitian(n, data):
    m = data.draw(st.integers(1, n))
    seed = data.draw(st.integers(0, 2 ** 31))
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = manybody.assemble(terms_from_matrix(a + a.conj().T), manybody.build_basis(n, m))
    assert abs(h - h.conj().T).max() < 1e-14
    # fermion signs: the many-body spectrum is sums of M single-particle levels
    e = np.sort(np.linalg.eigvalsh(a + a.conj().T))
    assert np.linalg.eigvalsh(h.toarray())[0] == pytest.approx(e[:m].sum(), abs=1e-9)


def test_degenerate_ground_state_follows_previous():
    h = sp.csr_matrix(np.diag([0.0, 0.0, 1.0]))
    prev = manybody.ManyBodyState(None, np.array([0.0, 1.0, 0.0]), 0.0)
    st_ = manybody.ground_state(h, previous=prev)
    assert st_.metadata["degenerate"]
    assert np.allclose(np.abs(st_.amplitudes), [0, 1, 0])
