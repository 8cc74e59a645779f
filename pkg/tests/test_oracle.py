import numpy as np
import pytest

from loclab import oracle
from loclab.correlations import structure_factor
from loclab.freefermion import free_correlations
from loclab.indicators import frechet_variance
from loclab.models import build_ssh


def test_degenerate_filling_is_skipped():
    assert oracle.ed_free_compare(build_ssh(4, 0.0).matrix, 2) is None


def test_two_site_hand_algebra():
    # one particle, H = [[a, b], [b, -a]]: ground amplitude weights p, 1 - p
    a, b = 0.3, -0.8
    nn, energy, _ = oracle.ed_density_density(np.array([[a, b], [b, -a]]), 1)
    assert energy == pytest.approx(-np.hypot(a, b))
    p = 0.5 * (1 - a / np.hypot(a, b))
    assert np.allclose(nn, np.diag([p, 1 - p]))


def test_wick_suite():
    rep = oracle.ed_free_check(instances=50)
    assert rep.passed and rep.instance_count + rep.skipped == 50
    assert rep.to_dict()["passed"]


def test_naive_structure_factor():
    _, corr = free_correlations(build_ssh(4, 0.0))
    slow = oracle.structure_factor_naive(corr)
    assert np.allclose(structure_factor(corr, full=True).full, slow, atol=1e-14)
    assert abs(slow[0, 0]) < 1e-15
    assert oracle.structure_check().passed
    with pytest.raises(ValueError):
        oracle.structure_factor_naive(np.zeros((40, 40)))


def test_grid_scan():
    g = np.zeros(30)
    g[7] = 1.0
    assert oracle.frechet_grid(g, 300).variance == pytest.approx(0.0, abs=1e-20)
    g = np.zeros(30)
    g[0] = g[15] = 0.5
    assert abs(oracle.frechet_grid(g, 10_000).variance - frechet_variance(g).variance) <= (2 * np.pi / 1e4) ** 2
    with pytest.raises(ValueError):
        oracle.frechet_grid(g, 100)


def test_frechet_suite():
    assert oracle.frechet_check().passed


def test_free_limit_suite():
    assert oracle.free_limit_check().passed


def test_dimer_fixture():
    fx = oracle.dimer_closed_form(12)
    assert fx.c_p[6] == pytest.approx(0.5)
    assert np.allclose(structure_factor(fx.c).diagonal, fx.c_p, atol=1e-14)


def test_run_suite_dispatch():
    assert [r.name for r in oracle.run_suite("structure")] == ["structure"]
    with pytest.raises(ValueError):
        oracle.run_suite("nope")
