"""Site-pair distributions and structure factors built from density correlations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .freefermion import CorrelationData

CLAMP_TOL = 1e-12


class DistributionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """``table[x1, x2]`` is the probability of finding particles at sites x1 and x2."""

    n_sites: int
    table: np.ndarray
    marginal: np.ndarray
    n_particles: int

    @property
    def marginal2(self) -> np.ndarray:
        return self.table.sum(axis=0)


@dataclass(frozen=True, eq=False)
class StructureFactor:
    diagonal: np.ndarray
    full: np.ndarray | None = None

    @property
    def n_sites(self) -> int:
        return len(self.diagonal)

    @property
    def angles(self) -> np.ndarray:
        """Momentum angle ``2 pi p / N`` for each index p."""
        return 2.0 * np.pi * np.arange(self.n_sites) / self.n_sites

    def at_pi(self) -> float:
        return float(self.diagonal[self.n_sites // 2])


def joint_distribution(c: CorrelationData, n_particles: int | None = None) -> JointDistribution:
    """``f(x1, x2) = <n_x1 n_x2> / M^2``.

    Entries in ``[-1e-12, 0)`` are rounding and get clamped; anything more negative
    means the correlator is broken.
    """
    m = c.n_particles if n_particles is None else n_particles
    table = c.nn / float(m) ** 2
    worst = float(table.min())
    if worst < -CLAMP_TOL:
        raise DistributionError(f"density-density table has negative entry {worst:.3e}")
    if worst < 0.0:
        table = np.where(table < 0.0, 0.0, table)
    table = 0.5 * (table + table.T)
    table = table / table.sum()
    return JointDistribution(c.n_sites, table, table.sum(axis=1), m)


def _lag_sums(c: np.ndarray) -> np.ndarray:
    """``s(d) = sum_m c[m, (m + d) mod N]``."""
    n = c.shape[0]
    m = np.arange(n)
    return np.array([c[m, (m + d) % n].sum() for d in range(n)])


def structure_factor(c: CorrelationData | np.ndarray, full: bool = False) -> StructureFactor:
    """``C_pq = (1/N) sum_mn exp(2 pi i (n q - m p) / N) C_mn`` with 1-based m, n.

    Only the diagonal ``C_p`` is computed unless ``full`` is set.
    """
    cmat = c.c if isinstance(c, CorrelationData) else np.asarray(c)
    n = cmat.shape[0]
    # diagonal depends only on n - m, so sum along lags and transform once
    lags = _lag_sums(cmat)
    diag = np.real(np.fft.ifft(lags))
    full_mat = None
    if full:
        # fft over m gives exp(-2 pi i m p / N); n * ifft over n gives exp(+2 pi i n q / N)
        raw = np.fft.fft(np.fft.ifft(cmat, axis=1), axis=0)
        p = np.arange(n)
        # shift from 0-based to 1-based site labels
        full_mat = raw * np.exp(2j * np.pi * (p[None, :] - p[:, None]) / n)
    return StructureFactor(diag, full_mat)


def difference_distribution(f: JointDistribution) -> np.ndarray:
    """Law of ``D = X1 - X2 mod N``: ``g(d) = sum_x f((x + d) mod N, x)``."""
    n = f.n_sites
    x = np.arange(n)
    return np.array([f.table[(x + d) % n, x].sum() for d in range(n)])


def lt_structure_identity(sf: StructureFactor) -> float:
    """Second cumulant of the exponential position operator from four structure-factor entries."""
    if sf.full is None:
        raise ValueError("full structure factor required; rebuild with full=True")
    n = sf.n_sites
    combo = sf.full[1, 1] - sf.full[0, 1] - sf.full[1, 0] + sf.full[0, 0]
    return float(np.real(combo)) * n * (n / (2.0 * np.pi)) ** 2
