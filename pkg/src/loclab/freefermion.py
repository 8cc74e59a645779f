"""Free-fermion ground states: orbitals, one-body correlator, Wick density correlator."""

from __future__ import annotations

import functools
import hashlib
from dataclasses import dataclass

import numpy as np

from .models import SingleParticleHamiltonian, build_ssh

MAX_DENSE_SITES = 2048
DEGENERACY_TOL = 1e-10


class DiagonalizationError(RuntimeError):
    pass


class CalibrationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class OrbitalSet:
    """Eigenpairs in ascending energy; ``orbitals[:, k]`` is orbital k."""

    energies: np.ndarray
    orbitals: np.ndarray
    occupied: np.ndarray
    fermi_degenerate: bool = False

    @property
    def n_sites(self) -> int:
        return self.orbitals.shape[0]

    @property
    def n_particles(self) -> int:
        return len(self.occupied)

    def occupied_orbitals(self) -> np.ndarray:
        return self.orbitals[:, self.occupied]


@dataclass(frozen=True, eq=False)
class CorrelationData:
    """Connected density correlator ``c`` and mean densities.

    ``g`` is the one-body correlator ``G_mn = <a_m^dag a_n>``; it is ``None`` on the
    many-body path where only densities are measured.
    """

    c: np.ndarray
    density: np.ndarray
    g: np.ndarray | None = None

    @property
    def n_sites(self) -> int:
        return len(self.density)

    @property
    def n_particles(self) -> int:
        return int(round(float(np.sum(self.density))))

    @property
    def nn(self) -> np.ndarray:
        """Full ``<n_m n_n>``."""
        return self.c + np.outer(self.density, self.density)


def _fingerprint(h: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(h).tobytes()).hexdigest()[:16]


def _phase_fix(vecs: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real and positive."""
    vecs = np.array(vecs, dtype=complex)
    idx = np.argmax(np.abs(vecs) - 1e-12 * np.arange(vecs.shape[0])[:, None], axis=0)
    pivots = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(pivots) / pivots)[None, :]


def _degenerate_groups(energies: np.ndarray, tol: float = DEGENERACY_TOL) -> list[np.ndarray]:
    groups, start = [], 0
    for k in range(1, len(energies) + 1):
        if k == len(energies) or energies[k] - energies[k - 1] > tol:
            groups.append(np.arange(start, k))
            start = k
    return groups


def _plane_wave_orbitals(h: np.ndarray):
    """Diagonalize a circulant matrix in the momentum basis.

    Degenerate levels are ordered by descending signed momentum in (-N/2, N/2],
    so a partially filled shell is occupied contiguously.
    """
    n = h.shape[0]
    m = np.arange(1, n + 1)
    k = np.arange(n)
    signed = np.where(k > n // 2, k - n, k)
    # (H psi_k)(m) = e^{ikm} sum_d h[0, d] e^{ikd}
    energies = np.real(h[0, :] @ np.exp(2j * np.pi * np.outer(np.arange(n), k) / n))
    order = np.argsort(energies, kind="stable")
    ranked = []
    for grp in _degenerate_groups(energies[order]):
        members = order[grp]
        ranked.extend(members[np.argsort(-signed[members], kind="stable")])
    ranked = np.asarray(ranked)
    vecs = np.exp(2j * np.pi * np.outer(m, k[ranked]) / n) / np.sqrt(n)
    return energies[ranked], vecs


def diagonalize(h: SingleParticleHamiltonian | np.ndarray, n_particles: int | None = None) -> OrbitalSet:
    """Ascending eigenpairs with the lowest ``n_particles`` orbitals occupied.

    Translation-invariant periodic chains are diagonalized with plane waves so that
    degenerate Fermi levels are filled by momentum; otherwise degenerate eigenvectors
    are phase fixed and sorted lexicographically.
    """
    if isinstance(h, SingleParticleHamiltonian):
        matrix = h.matrix
        if n_particles is None:
            n_particles = h.lattice.filling
        circulant = h.is_translation_invariant()
    else:
        matrix = np.asarray(h)
        circulant = False
    n = matrix.shape[0]
    if n_particles is None or not 0 <= n_particles <= n:
        raise ValueError(f"need 0 <= M <= N, got M={n_particles}, N={n}")
    if n > MAX_DENSE_SITES:
        raise ValueError(f"dense eigensolve refused above N={MAX_DENSE_SITES} (got N={n})")

    if circulant:
        energies, vecs = _plane_wave_orbitals(matrix)
    else:
        try:
            energies, vecs = np.linalg.eigh(matrix)
        except np.linalg.LinAlgError as exc:
            raise DiagonalizationError(
                f"eigensolver failed for N={n} matrix (fingerprint {_fingerprint(matrix)})") from exc
        vecs = _phase_fix(vecs)
        for grp in _degenerate_groups(energies):
            if len(grp) > 1:
                sub = vecs[:, grp]
                keys = [tuple(np.round(np.concatenate([sub[:, j].real, sub[:, j].imag]), 12))
                        for j in range(len(grp))]
                perm = sorted(range(len(grp)), key=lambda j: keys[j], reverse=True)
                vecs[:, grp] = sub[:, perm]

    degenerate = 0 < n_particles < n and energies[n_particles] - energies[n_particles - 1] <= DEGENERACY_TOL
    energies.setflags(write=False)
    vecs.setflags(write=False)
    return OrbitalSet(energies, vecs, np.arange(n_particles), bool(degenerate))


def one_body_correlator(orb: OrbitalSet) -> np.ndarray:
    """``G_mn = sum_{k occ} psi_k(m)^* psi_k(n)``."""
    occ = orb.occupied_orbitals()
    return occ.conj() @ occ.T


def wick_density_density(g: np.ndarray, density: np.ndarray | None = None) -> CorrelationData:
    """Connected ``C_mn = G_mn (delta_mn - G_nm)`` of a Slater determinant."""
    g = np.asarray(g)
    if density is None:
        density = np.real(np.diag(g)).copy()
    # G Hermitian: G_mn G_nm = |G_mn|^2
    c = np.diag(np.asarray(density, dtype=float)) - np.abs(g) ** 2
    return CorrelationData(c=c, density=np.asarray(density, dtype=float), g=g)


def free_correlations(h: SingleParticleHamiltonian, n_particles: int | None = None):
    """Convenience: orbitals and Wick correlation data of the filled Fermi sea."""
    orb = diagonalize(h, n_particles)
    return orb, wick_density_density(one_body_correlator(orb))


def ssh_lambda(delta: float) -> float:
    """Mixing parameter in ``tan theta_p = lambda tan(2 pi p / N)`` for the SSH chain.

    Recovered by fitting the closed-form correlator to exact diagonalization;
    the fit gives ``lambda = -delta`` to machine precision.
    """
    return -float(delta)


def _ssh_closed_form(n_sites: int, lam: float) -> np.ndarray:
    m = np.arange(1, n_sites + 1)
    sign = (-1.0) ** m
    p = np.arange(n_sites // 2)
    k = 2.0 * np.pi * p / n_sites
    # atan2 keeps theta continuous through k = pi/2
    theta = np.arctan2(lam * np.sin(k), np.cos(k))
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    left = np.exp(-1j * np.outer(m, k)) * (c[None, :] - 1j * sign[:, None] * s[None, :])
    right = np.exp(1j * np.outer(m, k)) * (c[None, :] + 1j * sign[:, None] * s[None, :])
    return left @ right.T / n_sites


CALIBRATION_SITES = 10


def calibrate_ssh_lambda(delta: float, n_sites: int = CALIBRATION_SITES) -> tuple[float, float]:
    """Fit the mixing parameter by minimizing the max deviation from diagonalization.

    Returns ``(lambda, residual)`` where the residual is the max elementwise error.
    """
    from scipy.optimize import minimize_scalar

    _, ref = free_correlations(build_ssh(n_sites, delta))

    def err(lam):
        return float(np.max(np.abs(_ssh_closed_form(n_sites, lam) - ref.g)))

    res = minimize_scalar(err, bounds=(-1.5, 1.5), method="bounded", options={"xatol": 1e-12})
    return float(res.x), err(res.x)


@functools.lru_cache(maxsize=256)
def _frozen_map_residual(delta: float) -> float:
    _, ref = free_correlations(build_ssh(CALIBRATION_SITES, delta))
    return float(np.max(np.abs(_ssh_closed_form(CALIBRATION_SITES, ssh_lambda(delta)) - ref.g)))


def ssh_analytic_correlator(n_sites: int, delta: float) -> np.ndarray:
    """Closed-form half-filled SSH correlator ``<a_m^dag a_n>``."""
    if n_sites % 2:
        raise ValueError("SSH correlator needs even N")
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    resid = _frozen_map_residual(float(delta))
    if resid > 1e-8:
        raise CalibrationError(f"closed-form correlator misses diagonalization by {resid:.3e} at delta={delta}")
    return _ssh_closed_form(n_sites, ssh_lambda(delta))


def ipr(orb: OrbitalSet, k) -> float | np.ndarray:
    """Inverse participation ratio ``sum |psi|^4 / sum |psi|^2`` of orbital(s) k."""
    psi2 = np.abs(orb.orbitals[:, k]) ** 2
    return np.sum(psi2 ** 2, axis=0) / np.sum(psi2, axis=0)
