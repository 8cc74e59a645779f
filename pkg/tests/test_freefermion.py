import numpy as np
import pytest
from hypothesis import given, strategies as st

from loclab.correlations import structure_factor
from loclab.freefermion import (CalibrationError, calibrate_ssh_lambda, diagonalize, free_correlations, ipr,
                                one_body_correlator, ssh_analytic_correlator, ssh_lambda, wick_density_density)
from loclab.indicators import lt_resta
from loclab.models import build_aa_single, build_ssh
from loclab.oracle import ed_free_compare, random_quadratic


def test_free_ring_levels_and_reconstruction():
    orb = diagonalize(build_ssh(4, 0.0), 2)
    assert np.allclose(orb.energies, [-2, 0, 0, 2])
    u = orb.orbitals
    assert np.allclose(u @ np.diag(orb.energies) @ u.conj().T, build_ssh(4, 0.0).matrix, atol=1e-10)


def test_ssh_fermi_sea_is_negative():
    orb = diagonalize(build_ssh(200, 0.3))
    assert np.all(orb.energies[orb.occupied] < 0)
    assert not orb.fermi_degenerate


@pytest.mark.parametrize("n", [8, 12, 20])
def test_plane_wave_correlator(n):
    m = n // 2
    _, corr = free_correlations(build_ssh(n, 0.0))
    # contiguous Fermi sea of momenta
    k = np.arange(-(m // 2), m - m // 2) if n % 4 else np.arange(-(m // 2) + 1, m // 2 + 1)
    idx = np.arange(n)
    expect = np.exp(2j * np.pi * np.subtract.outer(idx, idx)[..., None] * -k / n).sum(-1) / n
    assert np.allclose(corr.g, expect, atol=1e-12)
    assert np.allclose(np.diag(corr.g).real, m / n)


def test_correlator_trace_and_projector():
    _, corr = free_correlations(build_aa_single(30, 1.0, 1.7))
    g = corr.g
    assert np.trace(g).real == pytest.approx(15, abs=1e-10)
    assert np.allclose(g @ g, g, atol=1e-10)


def test_wick_diagonal_and_sum_rule():
    _, corr = free_correlations(build_ssh(6, 0.0))
    gd = np.diag(corr.g).real
    assert np.allclose(np.diag(corr.c), gd * (1 - gd))
    assert abs(corr.c.sum()) < 1e-12


def test_wick_matches_exact_diagonalization(rng):
    devs = [ed_free_compare(random_quadratic(6, rng), 3) for _ in range(10)]
    assert max(d for d in devs if d is not None) < 1e-10


@given(st.integers(2, 12).map(lambda k: 2 * k), st.floats(0, 1), st.integers(0, 2 ** 31))
def test_random_phase_gauge_leaves_density_correlations(n, delta, seed):
    """A site-dependent phase rotation changes G but not <n n>."""
    h = build_ssh(n, delta).matrix
    phases = np.exp(1j * np.random.default_rng(seed).uniform(0, 2 * np.pi, n))
    u = np.diag(phases)
    m = n // 2
    c1 = wick_density_density(one_body_correlator(diagonalize(h, m))).c
    c2 = wick_density_density(one_body_correlator(diagonalize(u.conj().T @ h @ u, m))).c
    e = np.linalg.eigvalsh(h)
    if e[m] - e[m - 1] > 1e-8:
        assert np.allclose(c1, c2, atol=1e-10)


@given(st.integers(2, 40).map(lambda k: 2 * k), st.floats(0.05, 4.0))
def test_aa_hopping_sign_is_a_gauge(n, delta):
    _, a = free_correlations(build_aa_single(n, 1.0, delta))
    _, b = free_correlations(build_aa_single(n, -1.0, delta))
    assert np.allclose(a.c, b.c, atol=1e-9)


def test_closed_form_lambda_calibration():
    for delta in (0.2, 0.5, 0.9):
        lam, resid = calibrate_ssh_lambda(delta)
        assert lam == pytest.approx(ssh_lambda(delta), abs=1e-7)
        assert resid < 1e-8


def test_closed_form_matches_numerics():
    _, corr = free_correlations(build_ssh(8, 0.5))
    assert np.allclose(ssh_analytic_correlator(8, 0.5), corr.g, atol=1e-8)
    _, ring = free_correlations(build_ssh(10, 0.0))
    assert np.allclose(ssh_analytic_correlator(10, 0.0), ring.g, atol=1e-12)


def test_closed_form_resta_agrees():
    g = ssh_analytic_correlator(200, 0.3)
    from_closed = lt_resta(wick_density_density(g))
    _, corr = free_correlations(build_ssh(200, 0.3))
    assert from_closed == pytest.approx(lt_resta(corr), abs=1e-8)


def test_closed_form_rejects_bad_input():
    with pytest.raises(ValueError):
        ssh_analytic_correlator(7, 0.3)
    assert issubclass(CalibrationError, RuntimeError)


def test_ipr_limits():
    eye = diagonalize(np.diag(np.arange(5.0)), 2)
    assert np.allclose(ipr(eye, np.arange(5)), 1.0)
    ring = diagonalize(build_ssh(16, 0.0), 8)
    assert np.allclose(ipr(ring, np.arange(16)), 1 / 16)


def test_occupied_ipr_grows_with_disorder():
    o1 = diagonalize(build_aa_single(610, 1.0, 1.0))
    o3 = diagonalize(build_aa_single(610, 1.0, 3.0))
    assert np.all(ipr(o3, o3.occupied) > ipr(o1, o1.occupied))


def test_free_ring_structure_factor_is_linear_even_when_n_divisible_by_four():
    for n in (12, 16, 20):
        _, corr = free_correlations(build_ssh(n, 0.0))
        p = np.arange(n // 2 + 1)
        assert np.allclose(structure_factor(corr).diagonal[p], p / n, atol=1e-12)


def test_refuses_oversized_dense_problem():
    with pytest.raises(ValueError):
        diagonalize(np.zeros((3000, 3000)), 10)
