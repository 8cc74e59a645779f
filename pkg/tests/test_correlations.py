import numpy as np
import pytest
from hypothesis import given, strategies as st

from loclab.correlations import (DistributionError, JointDistribution, difference_distribution, joint_distribution,
                                 lt_structure_identity, structure_factor)
from loclab.freefermion import CorrelationData, free_correlations
from loclab.indicators import lt_resta
from loclab.models import build_aa_single, build_ssh
from loclab.oracle import structure_factor_naive


def _point_state(n, site):
    density = np.zeros(n)
    density[site] = 1.0
    return CorrelationData(c=np.diag(density) - np.outer(density, density), density=density)


def test_single_particle_on_one_site():
    f = joint_distribution(_point_state(5, 2))
    expect = np.zeros((5, 5))
    expect[2, 2] = 1.0
    assert np.allclose(f.table, expect)


def test_free_ring_marginals_uniform():
    _, corr = free_correlations(build_ssh(4, 0.0))
    f = joint_distribution(corr)
    assert f.table.sum() == pytest.approx(1.0)
    assert np.allclose(f.marginal, 0.25)


def test_ssh_table_symmetric_normalized():
    _, corr = free_correlations(build_ssh(200, 0.5))
    f = joint_distribution(corr)
    assert np.allclose(f.table, f.table.T)
    assert abs(f.table.sum() - 1) < 1e-10
    assert np.allclose(f.marginal, f.marginal2)
    g = difference_distribution(f)
    assert abs(g.sum() - 1) < 1e-10


def test_negative_table_is_rejected():
    c = CorrelationData(c=np.array([[0.0, 0.5], [0.5, 0.0]]) - 0.25, density=np.array([0.5, 0.5]))
    bad = CorrelationData(c=c.c - 0.01, density=c.density)
    with pytest.raises(DistributionError):
        joint_distribution(bad, 1)


def test_difference_law_of_point_mass():
    table = np.zeros((6, 6))
    table[3, 3] = 1.0
    g = difference_distribution(JointDistribution(6, table, table.sum(1), 1))
    assert g[0] == 1.0 and g[1:].sum() == 0


def test_difference_law_shift_sum():
    _, corr = free_correlations(build_ssh(12, 0.0))
    f = joint_distribution(corr)
    assert np.allclose(difference_distribution(f), 12 * f.table[:, 0])


@pytest.mark.parametrize("n", [12, 200, 610])
def test_free_ring_linear(n):
    p = np.arange(n // 2 + 1)
    _, corr = free_correlations(build_ssh(n, 0.0))
    d = structure_factor(corr).diagonal
    assert np.allclose(d[p], p / n, atol=1e-10)
    assert np.allclose(d[1:], d[1:][::-1], atol=1e-12)


def test_fast_transform_matches_double_sum():
    _, corr = free_correlations(build_ssh(12, 0.5))
    sf = structure_factor(corr, full=True)
    slow = structure_factor_naive(corr)
    assert np.max(np.abs(sf.full - slow)) < 1e-12
    assert np.max(np.abs(sf.diagonal - np.diag(slow).real)) < 1e-12
    assert abs(sf.full[0, 0]) < 1e-12


def test_plateau_at_pi():
    _, corr = free_correlations(build_ssh(610, 0.4))
    assert abs(structure_factor(corr).at_pi() - 0.5) < 2e-3


def test_identity_on_translation_invariant_state():
    _, corr = free_correlations(build_ssh(16, 0.0))
    sf = structure_factor(corr, full=True)
    assert abs(sf.full[0, 1]) < 1e-12 and abs(sf.full[1, 0]) < 1e-12
    assert lt_structure_identity(sf) == pytest.approx(16 * (16 / (2 * np.pi)) ** 2 * sf.full[1, 1].real)


def test_identity_matches_resta():
    _, corr = free_correlations(build_ssh(100, 0.3))
    assert lt_structure_identity(structure_factor(corr, full=True)) == pytest.approx(lt_resta(corr), abs=1e-10)


def test_identity_needs_full_matrix():
    _, corr = free_correlations(build_ssh(8, 0.3))
    with pytest.raises(ValueError):
        lt_structure_identity(structure_factor(corr))


@given(st.integers(3, 40), st.floats(0, 4), st.floats(0, 6.28))
def test_parseval_and_zero_mode(n, delta, phase):
    """sum_p C_pp equals the trace of C, and number conservation kills C_0."""
    _, corr = free_correlations(build_aa_single(n, 1.0, delta, phase=phase))
    sf = structure_factor(corr, full=True)
    assert sf.diagonal.sum() == pytest.approx(np.trace(corr.c), abs=1e-10)
    assert np.sum(np.abs(sf.full) ** 2) == pytest.approx(np.sum(corr.c ** 2), abs=1e-10)
    assert abs(sf.diagonal[0]) < 1e-12
    assert np.allclose(corr.c.sum(axis=1), 0, atol=1e-10)
