"""Thermodynamic-limit localization function, IPR bound, asymptotics and phase classification."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .correlations import StructureFactor, structure_factor
from .freefermion import OrbitalSet, ipr, one_body_correlator, wick_density_density

QUAD_TOL = 1e-10
RICHARDSON_STEPS = (1e-2, 5e-3, 2.5e-3)


class QuadratureError(RuntimeError):
    pass


def _dimer_ratio(delta: float) -> float:
    d2 = float(delta) ** 2
    return (1.0 - d2) / (1.0 + d2)


def _locfunc_limit_scalar(p: float, delta: float, epsabs: float) -> float:
    a = _dimer_ratio(delta)
    cp, sp2 = np.cos(p), np.sin(p) ** 2

    def integrand(q):
        x = cp + a * np.cos(q)
        r = np.sqrt(x * x + (1.0 - a * a) * sp2)
        return x / r if r > 0.0 else 0.0

    # kinks where cos p + a cos p' changes sign; a genuine cusp at a = 1
    points = []
    if a > 0.0 and abs(cp) <= a:
        q0 = np.arccos(-cp / a)
        points = sorted({q0, 2.0 * np.pi - q0} - {0.0, 2.0 * np.pi})
    val, err = 0.0, 0.0
    edges = [0.0, *points, 2.0 * np.pi]
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo <= 0.0:
            continue
        with warnings.catch_warnings():
            # roundoff notices near the requested floor; the summed estimate is checked below
            warnings.simplefilter("ignore", IntegrationWarning)
            v, e = quad(integrand, lo, hi, epsabs=epsabs / len(edges), epsrel=0.0, limit=400)
        val += v
        err += e
    if err > 10 * epsabs:
        raise QuadratureError(f"quadrature error estimate {err:.2e} at p={p}, delta={delta}")
    return 0.25 - val / (8.0 * np.pi)


def ssh_locfunc_limit(p, delta: float, epsabs: float = QUAD_TOL):
    """Thermodynamic-limit SSH localization function at momentum angle(s) ``p`` in [0, pi]."""
    if not -1.0 <= delta <= 1.0:
        raise ValueError(f"|delta| must be at most 1, got {delta}")
    arr = np.asarray(p, dtype=float)
    if np.any(arr < -1e-12) or np.any(arr > np.pi + 1e-12):
        raise ValueError("momentum angle must lie in [0, pi]")
    out = np.array([_locfunc_limit_scalar(float(x), delta, epsabs) for x in arr.ravel()]).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def lt_thermodynamic(delta: float) -> float:
    """``(1/2) C''(0)`` of the limiting localization function.

    Central differences use the evenness of C(p); two Richardson levels over the
    step sequence remove the h^2 and h^4 errors.
    """
    if delta == 0.0:
        raise ValueError("localization tensor diverges at delta = 0 (gapless chain)")
    c0 = ssh_locfunc_limit(0.0, delta, epsabs=1e-13)

    def second(h):
        return 2.0 * (ssh_locfunc_limit(h, delta, epsabs=1e-13) - c0) / h ** 2

    d = [second(h) for h in RICHARDSON_STEPS]
    r1 = [(4.0 * d[i + 1] - d[i]) / 3.0 for i in range(2)]
    r2 = (16.0 * r1[1] - r1[0]) / 15.0
    return 0.5 * r2


@dataclass(frozen=True)
class LocalizedEstimate:
    estimate: np.ndarray
    exact: np.ndarray


def locfunc_localized_estimate(orb: OrbitalSet, p=None) -> LocalizedEstimate:
    """Non-overlapping-orbital estimate ``(1/N) sum_k (1 - |rho_k(p)|^2)`` beside the exact C_p."""
    n = orb.n_sites
    pidx = np.arange(n) if p is None else np.atleast_1d(np.asarray(p, dtype=int))
    rho = np.abs(orb.occupied_orbitals()) ** 2
    m = np.arange(1, n + 1)
    rho_p = np.exp(2j * np.pi * np.outer(pidx, m) / n) @ rho
    est = np.sum(1.0 - np.abs(rho_p) ** 2, axis=1) / n
    est[pidx % n == 0] = 0.0
    exact = structure_factor(wick_density_density(one_body_correlator(orb))).diagonal[pidx % n]
    return LocalizedEstimate(est, exact)


def ipr_bound(orb: OrbitalSet) -> float:
    """Momentum-independent upper bound ``(1/N) sum_k (2 - 2 R_k)`` over occupied orbitals."""
    if orb.n_particles == 0:
        raise ValueError("no occupied orbitals")
    r = ipr(orb, orb.occupied)
    return float(np.sum(2.0 - 2.0 * r) / orb.n_sites)


@dataclass(frozen=True)
class AsymptoticFit:
    exponent: float
    fit_window: tuple[int, int]
    residual: float


def default_window(n_sites: int) -> tuple[int, int]:
    return 1, max(4, n_sites // 100)


def fit_small_p(sf: StructureFactor, window: tuple[int, int] | None = None) -> AsymptoticFit:
    """Power of C(p) as p -> 0+ from a log-log least-squares line."""
    n = sf.n_sites
    lo, hi = default_window(n) if window is None else window
    if lo < 1 or hi > n // 2:
        raise ValueError(f"fit window {lo}..{hi} outside 1..{n // 2}")
    p = np.arange(lo, hi + 1)
    c = sf.diagonal[p]
    usable = c > 10 * np.finfo(float).eps
    if usable.sum() < 3:
        raise ValueError("fewer than 3 usable points for the small-p fit")
    x, y = np.log(2.0 * np.pi * p[usable] / n), np.log(c[usable])
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    rms = float(np.sqrt(res[0] / usable.sum())) if len(res) else 0.0
    return AsymptoticFit(float(coef[0]), (int(lo), int(hi)), rms)


@dataclass(frozen=True)
class ClassifierThresholds:
    extended_below: float = 1.4
    quadratic_above: float = 1.6
    plateau_tol: float = 0.05
    suppressed_below: float = 0.3


@dataclass(frozen=True)
class PhaseVerdict:
    label: str
    evidence: dict = field(default_factory=dict)


def classify(sf: StructureFactor, orb: OrbitalSet | None = None,
             thresholds: ClassifierThresholds = ClassifierThresholds()) -> PhaseVerdict:
    """Extended / dimerized / localized from the small-p power and the finite-p profile.

    A linear onset means extended.  With a quadratic onset, a plateau of 1/2 at
    p = pi marks dimerization, while finite-p values held down (under the IPR bound
    when orbitals are given, else under an absolute threshold) mark localization.
    """
    fit = fit_small_p(sf)
    c_pi = sf.at_pi()
    c_max = float(np.max(sf.diagonal))
    bound = ipr_bound(orb) if orb is not None else None
    evidence = {
        "exponent": fit.exponent,
        "c_pi": c_pi,
        "c_max": c_max,
        "ipr_bound": bound,
        "bound_margin": None if bound is None else bound - c_max,
    }
    if fit.exponent < thresholds.extended_below:
        return PhaseVerdict("extended", evidence)
    if fit.exponent > thresholds.quadratic_above:
        if abs(c_pi - 0.5) < thresholds.plateau_tol:
            return PhaseVerdict("dimerized", evidence)
        if c_max < thresholds.suppressed_below or (bound is not None and c_max <= bound):
            return PhaseVerdict("localized", evidence)
    return PhaseVerdict("inconclusive", evidence)
