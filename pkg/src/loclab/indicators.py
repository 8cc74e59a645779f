"""Localization-tensor variants and their free-fermion normalization."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .correlations import (JointDistribution, StructureFactor, difference_distribution, joint_distribution,
                           structure_factor)
from .freefermion import CorrelationData

INDICATORS = ("r", "rc", "mi", "lf")


@dataclass(frozen=True)
class CircularVariance:
    variance: float
    center: float
    degenerate_center: bool = False


@dataclass(frozen=True)
class ObcSpread:
    operator_path: float
    covariance_path: float

    @property
    def value(self) -> float:
        return self.operator_path


def lt_obc(c: CorrelationData, positions=None) -> ObcSpread:
    """Position spread per site ``(<X^2> - <X>^2) / N`` in open geometry.

    Evaluated twice, from ``sum_mn m n C_mn`` and as ``(M^2/N) Cov[X1, X2]`` under the
    site-pair distribution; the two must agree.
    """
    n = c.n_sites
    x = np.arange(1, n + 1, dtype=float) if positions is None else np.asarray(positions, dtype=float)
    operator = float(x @ c.c @ x) / n

    f = joint_distribution(c)
    m = f.n_particles
    e12 = float(x @ f.table @ x)
    cov = e12 - float(x @ f.marginal) * float(x @ f.marginal2)
    covariance = m * m * cov / n

    if abs(operator - covariance) > 1e-9 * max(1.0, abs(operator)):
        raise RuntimeError(f"spread paths disagree: {operator!r} vs {covariance!r}")
    return ObcSpread(operator, covariance)


def resta_positions(n_sites: int) -> np.ndarray:
    """``q_L(m) = (N / 2 pi i)(exp(2 pi i m / N) - 1)`` for m = 1..N."""
    m = np.arange(1, n_sites + 1)
    return n_sites / (2j * np.pi) * (np.exp(2j * np.pi * m / n_sites) - 1.0)


def lt_resta(c: CorrelationData) -> float:
    """Raw second cumulant ``<Q^dag Q> - |<Q>|^2`` of the exponential position operator."""
    q = resta_positions(c.n_sites)
    return float(np.real(q.conj() @ c.c @ q))


def _circular_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = np.abs(a - b) % (2.0 * np.pi)
    return np.minimum(d, 2.0 * np.pi - d)


def frechet_objective(g: np.ndarray, centers) -> np.ndarray:
    """``sum_j g_j d(theta_j, c)^2`` for sites at ``theta_j = 2 pi j / N``."""
    g = np.asarray(g, dtype=float)
    theta = 2.0 * np.pi * np.arange(len(g)) / len(g)
    centers = np.atleast_1d(np.asarray(centers, dtype=float))
    return (_circular_distance(theta[None, :], centers[:, None]) ** 2) @ g


def frechet_variance(g, tol: float = 1e-12) -> CircularVariance:
    """Exact Frechet variance (radians^2) of a distribution on N equally spaced sites.

    For each of the N ways to cut the circle between neighbouring sites the
    points unwrap to a segment on which squared geodesic distance is Euclidean
    for centers whose antipode sits in that gap.  The piecewise objective is a
    parabola around the segment mean, so clamping the mean into the admissible
    window and adding the offset gives the piece minimum exactly.
    """
    g = np.asarray(g, dtype=float)
    total = g.sum()
    if not np.isfinite(total) or abs(total - 1.0) > 1e-9 or np.any(g < -1e-12):
        raise ValueError(f"distribution must be nonnegative and sum to 1 (sum={total!r})")
    n = len(g)
    step = 2.0 * np.pi / n
    j = np.arange(n)

    values = np.empty(n)
    centers = np.empty(n)
    for cut in range(n):
        # sites cut, cut+1, ... unwrapped to theta_cut + step * j
        w = g[(cut + j) % n]
        u = cut * step + step * j
        mean = float(w @ u)
        var = float(w @ (u - mean) ** 2)
        # admissible centers put the antipode in the gap [theta_cut - step, theta_cut]
        lo, hi = cut * step + np.pi - step, cut * step + np.pi
        mu = min(max(mean, lo), hi)
        values[cut] = var + (mean - mu) ** 2
        centers[cut] = mu % (2.0 * np.pi)
    best = float(values.min())
    winners = np.sort(centers[values - best <= tol * max(1.0, best)])
    spread = _circular_distance(winners, winners[0])
    return CircularVariance(max(best, 0.0), float(winners[0]), bool(np.any(spread > 1e-9)))


@dataclass(frozen=True)
class RiemannParts:
    """Frechet variances (radians^2) entering the circular localization tensor."""

    var_x1: float
    var_x2: float
    var_diff: float
    var_diff_independent: float

    @property
    def literal(self) -> float:
        """``Var[X1] + Var[X2] - Var[X1 - X2]`` with no baseline correction."""
        return self.var_x1 + self.var_x2 - self.var_diff

    @property
    def connected(self) -> float:
        """Drop in ``Var[X1 - X2]`` caused by correlations between X1 and X2."""
        return self.var_diff_independent - self.var_diff


def riemann_parts(f: JointDistribution) -> RiemannParts:
    v1 = frechet_variance(f.marginal).variance
    v2 = frechet_variance(f.marginal2).variance
    vd = frechet_variance(difference_distribution(f)).variance
    product = JointDistribution(f.n_sites, np.outer(f.marginal, f.marginal2), f.marginal, f.n_particles)
    vi = frechet_variance(difference_distribution(product)).variance
    return RiemannParts(v1, v2, vd, vi)


def lt_riemann(f: JointDistribution) -> float:
    """Raw circular localization tensor in site units.

    On a line ``Var[X1 - X2] = Var[X1] + Var[X2]`` for independent X1, X2, so the
    covariance combination equals the drop of ``Var[X1 - X2]`` below its value for
    the product of the marginals.  On the circle only the second form vanishes for
    uncorrelated positions, and that is the one used here.
    """
    n = f.n_sites
    return (n * n / (4.0 * np.pi ** 2)) * riemann_parts(f).connected


def mutual_information(f: JointDistribution) -> float:
    """Mutual information (nats) between the two site coordinates."""
    table = f.table
    outer = np.outer(f.marginal, f.marginal2)
    mask = (table > 0.0) & (outer > 0.0)
    val = float(np.sum(table[mask] * np.log(table[mask] / outer[mask])))
    # rounding on product tables
    return 0.0 if -1e-14 < val < 0.0 else val


def lt_locfunc(sf: StructureFactor) -> float:
    """``2 pi dC/dp`` at p = 0 by forward difference, i.e. ``N (C_1 - C_0)``."""
    n = sf.n_sites
    if n < 2:
        raise ValueError("need at least two momenta")
    return n * float(sf.diagonal[1] - sf.diagonal[0])


def raw_indicators(c: CorrelationData, which=INDICATORS, sf: StructureFactor | None = None) -> dict[str, float]:
    """Raw values of the requested indicators, keyed by ``r``, ``rc``, ``mi``, ``lf``."""
    unknown = set(which) - set(INDICATORS)
    if unknown:
        raise ValueError(f"unknown indicators {sorted(unknown)}")
    out = {}
    f = joint_distribution(c) if {"rc", "mi"} & set(which) else None
    if "r" in which:
        out["r"] = lt_resta(c)
    if "rc" in which:
        out["rc"] = lt_riemann(f)
    if "mi" in which:
        out["mi"] = c.n_sites * mutual_information(f)
    if "lf" in which:
        out["lf"] = lt_locfunc(sf if sf is not None else structure_factor(c))
    return out


@dataclass(frozen=True)
class IndicatorValue:
    raw: float
    normalized: float


@dataclass
class IndicatorReport:
    values: dict[str, IndicatorValue]
    reference: dict[str, float]
    metadata: dict = field(default_factory=dict)

    def __getattr__(self, name):
        if name.startswith("lambda_") and name[7:] in INDICATORS:
            return self.values.get(name[7:])
        raise AttributeError(name)

    def normalized(self) -> dict[str, float]:
        return {k: v.normalized for k, v in self.values.items()}

    def raw(self) -> dict[str, float]:
        return {k: v.raw for k, v in self.values.items()}


def normalize(raw: dict[str, float], reference: dict[str, float], metadata: dict | None = None) -> IndicatorReport:
    values = {}
    for name, value in raw.items():
        ref = reference[name]
        if not ref > 0.0:
            raise ValueError(f"reference for {name} must be positive, got {ref!r}")
        values[name] = IndicatorValue(value, value / ref)
    return IndicatorReport(values, {k: reference[k] for k in raw}, dict(metadata or {}))


@functools.lru_cache(maxsize=64)
def free_reference(n_sites: int, n_particles: int, boundary: str = "periodic") -> dict[str, float]:
    """Raw indicators of the uniform ring (hopping -1, no potential) at the same N and M."""
    from .freefermion import free_correlations
    from .models import build_aa_single

    h = build_aa_single(n_sites, J=-1.0, delta=0.0, boundary=boundary, filling=n_particles)
    _, corr = free_correlations(h)
    return raw_indicators(corr)


def evaluate(c: CorrelationData, which=INDICATORS, boundary: str = "periodic", metadata: dict | None = None
             ) -> IndicatorReport:
    """Raw and normalized indicators of one state."""
    ref = free_reference(c.n_sites, c.n_particles, str(getattr(boundary, "value", boundary)))
    meta = {"N": c.n_sites, "M": c.n_particles}
    meta.update(metadata or {})
    return normalize(raw_indicators(c, which), ref, meta)
