"""Slow, independent reference computations used to validate the fast paths."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import manybody
from .correlations import structure_factor
from .freefermion import CorrelationData, diagonalize, free_correlations, one_body_correlator, wick_density_density
from .indicators import CircularVariance, frechet_variance
from .models import (Boundary, LatticeSpec, ManyBodyHamiltonianSpec, build_aa_manybody, build_aa_single, build_ssh,
                     terms_from_matrix)

DEFAULT_SEED = 12345


@dataclass
class OracleReport:
    name: str
    max_abs_deviation: float
    instance_count: int
    worst_instance: dict = field(default_factory=dict)
    threshold: float = 0.0
    seed: int | None = None
    skipped: int = 0

    @property
    def passed(self) -> bool:
        return self.instance_count > 0 and self.max_abs_deviation <= self.threshold

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def random_quadratic(n_sites: int, rng: np.random.Generator, bandwidth: int | None = None) -> np.ndarray:
    """Gaussian Hermitian matrix, optionally zeroed beyond ``bandwidth`` (with periodic wrap)."""
    a = rng.standard_normal((n_sites, n_sites)) + 1j * rng.standard_normal((n_sites, n_sites))
    h = (a + a.conj().T) / 2.0
    if bandwidth is not None:
        i = np.arange(n_sites)
        dist = np.abs(i[:, None] - i[None, :])
        dist = np.minimum(dist, n_sites - dist)
        h[dist > bandwidth] = 0.0
    return h


def ed_density_density(h: np.ndarray, n_particles: int) -> tuple[np.ndarray, float, float]:
    """``<n_m n_n>`` of the many-body ground state of a quadratic Hamiltonian.

    Returns ``(nn, energy, gap)`` with ``gap`` the many-body gap above the ground state.
    """
    n = h.shape[0]
    basis = manybody.build_basis(n, n_particles)
    mat = manybody.assemble(terms_from_matrix(h), basis).toarray()
    vals, vecs = np.linalg.eigh(mat)
    prob = np.abs(vecs[:, 0]) ** 2
    occ = basis.occupations().astype(float)
    nn = occ.T @ (prob[:, None] * occ)
    gap = float(vals[1] - vals[0]) if len(vals) > 1 else np.inf
    return nn, float(vals[0]), gap


def ed_free_compare(h: np.ndarray, n_particles: int, gap_tol: float = 1e-8) -> float | None:
    """Max deviation of Wick ``<n n>`` from ED, or None when the filling is degenerate."""
    nn_ed, _, gap = ed_density_density(h, n_particles)
    if gap < gap_tol:
        return None
    corr = wick_density_density(one_body_correlator(diagonalize(h, n_particles)))
    return float(np.max(np.abs(corr.nn - nn_ed)))


def ed_free_check(n_sites: int = 6, n_particles: int | None = None, instances: int = 50, seed: int = DEFAULT_SEED,
                  bandwidth: int | None = None, threshold: float = 1e-10) -> OracleReport:
    if n_sites > 10:
        raise ValueError("ED oracle limited to N <= 10")
    m = n_sites // 2 if n_particles is None else n_particles
    report = OracleReport("wick", 0.0, 0, threshold=threshold, seed=seed)
    for k in range(instances):
        rng = np.random.default_rng([seed, k])
        h = random_quadratic(n_sites, rng, bandwidth)
        dev = ed_free_compare(h, m)
        if dev is None:
            report.skipped += 1
            continue
        report.instance_count += 1
        if dev >= report.max_abs_deviation:
            report.max_abs_deviation = dev
            report.worst_instance = {"instance": k, "N": n_sites, "M": m}
    return report


def structure_factor_naive(c: CorrelationData | np.ndarray) -> np.ndarray:
    """Full ``C_pq`` by the literal double sum over 1-based sites."""
    cmat = c.c if isinstance(c, CorrelationData) else np.asarray(c)
    n = cmat.shape[0]
    if n > 32:
        raise ValueError("literal structure factor limited to N <= 32")
    sites = range(1, n + 1)
    out = np.zeros((n, n), dtype=complex)
    for p in range(n):
        for q in range(n):
            total = 0.0j
            for m in sites:
                for nn in sites:
                    total += np.exp(2j * np.pi * (nn * q - m * p) / n) * cmat[m - 1, nn - 1]
            out[p, q] = total / n
    return out


def structure_check(n_sites: int = 12, delta: float = 0.5, threshold: float = 1e-12) -> OracleReport:
    _, corr = free_correlations(build_ssh(n_sites, delta))
    fast = structure_factor(corr, full=True)
    slow = structure_factor_naive(corr)
    dev = max(float(np.max(np.abs(fast.full - slow))), float(np.max(np.abs(fast.diagonal - np.diag(slow)))))
    return OracleReport("structure", dev, 1, {"model": "ssh", "N": n_sites, "delta": delta}, threshold)


def frechet_grid(g, resolution: int) -> CircularVariance:
    """Grid scan of the Frechet objective over ``resolution`` equally spaced centers."""
    g = np.asarray(g, dtype=float)
    if resolution < 10 * len(g):
        raise ValueError("resolution must be at least 10 N")
    theta = 2.0 * np.pi * np.arange(len(g)) / len(g)
    centers = 2.0 * np.pi * np.arange(resolution) / resolution
    d = np.abs(theta[None, :] - centers[:, None])
    d = np.where(d > np.pi, 2.0 * np.pi - d, d)
    objective = (d * d) @ g
    r = int(np.argmin(objective))
    best, best_c = float(objective[r]), float(centers[r])
    return CircularVariance(best, best_c, False)


def frechet_check(n_dist: int = 100, n_sites: int = 50, resolution: int = 10_000, seed: int = DEFAULT_SEED
                  ) -> OracleReport:
    """Cut enumeration must sit below the grid minimum by at most ``(2 pi / resolution)^2``."""
    tol = (2.0 * np.pi / resolution) ** 2
    report = OracleReport("frechet", 0.0, 0, threshold=tol, seed=seed)
    for k in range(n_dist):
        rng = np.random.default_rng([seed, k])
        # alternate spread and clustered weights
        w = rng.random(n_sites) ** (1 + 4 * (k % 3))
        g = w / w.sum()
        exact = frechet_variance(g).variance
        grid = frechet_grid(g, resolution).variance
        # the grid can never beat the exact minimum
        dev = grid - exact if grid >= exact - 1e-12 else np.inf
        report.instance_count += 1
        if dev >= report.max_abs_deviation:
            report.max_abs_deviation = float(dev)
            report.worst_instance = {"instance": k, "N": n_sites}
    return report


def free_limit_check(sizes=(4, 6, 8, 10), delta: float = 1.3, e_tol: float = 1e-10, c_tol: float = 1e-9
                     ) -> OracleReport:
    """Interacting ED at V = 0 against the Wick path on Aubry-Andre chains."""
    report = OracleReport("free-limit", 0.0, 0, threshold=1.0)
    worst_ratio = 0.0
    for n in sizes:
        m = n // 2
        lat = LatticeSpec(n, Boundary.PERIODIC, m)
        spec = ManyBodyHamiltonianSpec(lat, J=1.0, delta=delta, V=0.0)
        basis = manybody.build_basis(n, m)
        state = manybody.ground_state(manybody.assemble(build_aa_manybody(spec), basis), basis)
        orb, corr = free_correlations(build_aa_single(n, 1.0, delta, filling=m))
        de = abs(state.energy - float(np.sum(orb.energies[orb.occupied])))
        dc = float(np.max(np.abs(manybody.density_density_mb(state).c - corr.c)))
        ratio = max(de / e_tol, dc / c_tol)
        report.instance_count += 1
        if ratio >= worst_ratio:
            worst_ratio = ratio
            report.worst_instance = {"N": n, "M": m, "energy_dev": de, "c_dev": dc}
    # deviation expressed in units of the per-quantity tolerance
    report.max_abs_deviation = worst_ratio
    return report


@dataclass(frozen=True)
class DimerFixture:
    c: np.ndarray
    c_p: np.ndarray
    lambda_lf: float
    lambda_inf: float


def dimer_closed_form(n_sites: int) -> DimerFixture:
    """Exact correlations of the fully dimerized chain (delta = 1).

    Each bond (2j-1, 2j) holds one particle in its bonding orbital, so
    ``n = 1/2``, ``C_aa = 1/4`` and ``C_ab = -1/4`` inside a dimer, zero otherwise.
    Then ``C_p = (1 - cos(2 pi p / N)) / 4``.
    """
    if n_sites % 2:
        raise ValueError("need even N")
    c = np.zeros((n_sites, n_sites))
    for a in range(0, n_sites, 2):
        c[a, a] = c[a + 1, a + 1] = 0.25
        c[a, a + 1] = c[a + 1, a] = -0.25
    p = np.arange(n_sites)
    c_p = (1.0 - np.cos(2.0 * np.pi * p / n_sites)) / 4.0
    return DimerFixture(c, c_p, float(n_sites * c_p[1]), 0.125)


SUITES = ("wick", "structure", "frechet", "free-limit")


def run_suite(name: str, seed: int = DEFAULT_SEED, instances: int = 50) -> list[OracleReport]:
    if name == "all":
        return [r for s in SUITES for r in run_suite(s, seed, instances)]
    if name == "wick":
        return [ed_free_check(6, 3, instances=instances, seed=seed)]
    if name == "structure":
        return [structure_check()]
    if name == "frechet":
        return [frechet_check(seed=seed)]
    if name == "free-limit":
        return [free_limit_check()]
    raise ValueError(f"unknown suite {name!r}")
