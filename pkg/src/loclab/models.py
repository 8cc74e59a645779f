"""Single-particle and many-body Hamiltonians for the SSH and Aubry-Andre chains.

Sites are 1-based in the physics (potential phase, hopping parity) and 0-based
in every array.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

GOLDEN_BETA = (math.sqrt(5.0) - 1.0) / 2.0


class Boundary(str, enum.Enum):
    PERIODIC = "periodic"
    OPEN = "open"


@dataclass(frozen=True)
class LatticeSpec:
    n_sites: int
    boundary: Boundary = Boundary.PERIODIC
    filling: int | None = None

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 1:
            raise ValueError(f"n_sites must be a positive integer, got {self.n_sites!r}")
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        if self.filling is None:
            object.__setattr__(self, "filling", max(1, self.n_sites // 2))
        if not 0 < self.filling <= self.n_sites:
            raise ValueError(f"filling must satisfy 0 < M <= N, got M={self.filling}, N={self.n_sites}")

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC


@dataclass(frozen=True)
class ModelParams:
    J: float = 1.0
    delta: float = 0.0
    beta: float = GOLDEN_BETA
    phase: float = 0.0


@dataclass(frozen=True, eq=False)
class SingleParticleHamiltonian:
    lattice: LatticeSpec
    matrix: np.ndarray
    params: ModelParams
    model: str

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def n_sites(self) -> int:
        return self.lattice.n_sites

    def is_translation_invariant(self, atol: float = 1e-14) -> bool:
        """True for a periodic circulant matrix (one-site translation symmetry)."""
        if not self.lattice.periodic:
            return False
        h = self.matrix
        return bool(np.allclose(np.roll(np.roll(h, 1, axis=0), 1, axis=1), h, rtol=0.0, atol=atol))


def parse_beta(value) -> float:
    """Accept a float, a numeric string, or a rational ``"p/q"``."""
    if isinstance(value, str) and "/" in value:
        return float(Fraction(value.strip()))
    return float(value)


def _bonds(n: int, periodic: bool) -> list[tuple[int, int]]:
    """Nearest-neighbour bonds (i, i+1) as 0-based pairs; the last one is the wrap."""
    bonds = [(i, i + 1) for i in range(n - 1)]
    if periodic and n > 1:
        bonds.append((n - 1, 0))
    return bonds


def build_ssh(n_sites: int, delta: float, boundary=Boundary.PERIODIC, filling: int | None = None
              ) -> SingleParticleHamiltonian:
    """SSH chain with hoppings ``-t_i``, ``t_i = 1 - delta (-1)^i`` on bond (i, i+1)."""
    if n_sites % 2:
        raise ValueError(f"SSH chain needs an even number of sites, got {n_sites}")
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"dimerization delta must lie in [0, 1], got {delta}")
    lattice = LatticeSpec(n_sites, Boundary(boundary), filling)
    h = np.zeros((n_sites, n_sites), dtype=complex)
    for a, b in _bonds(n_sites, lattice.periodic):
        i = a + 1
        t = 1.0 - delta * (-1) ** i
        h[a, b] += -t
        h[b, a] += -t
    return SingleParticleHamiltonian(lattice, h, ModelParams(J=1.0, delta=delta, beta=0.0), "ssh")


def aa_potential(n_sites: int, delta: float, beta: float = GOLDEN_BETA, phase: float = 0.0) -> np.ndarray:
    i = np.arange(1, n_sites + 1)
    return delta * np.cos(2.0 * np.pi * beta * i + phase)


def build_aa_single(n_sites: int, J: float = 1.0, delta: float = 0.0, beta: float = GOLDEN_BETA,
                    phase: float = 0.0, boundary=Boundary.PERIODIC, filling: int | None = None
                    ) -> SingleParticleHamiltonian:
    """Aubry-Andre chain: hopping ``+J`` and on-site ``delta cos(2 pi beta i + phase)``."""
    if n_sites < 2:
        raise ValueError(f"Aubry-Andre chain needs at least 2 sites, got {n_sites}")
    lattice = LatticeSpec(n_sites, Boundary(boundary), filling)
    h = np.zeros((n_sites, n_sites), dtype=complex)
    for a, b in _bonds(n_sites, lattice.periodic):
        h[a, b] += J
        h[b, a] += J
    h[np.diag_indices(n_sites)] += aa_potential(n_sites, delta, beta, phase)
    return SingleParticleHamiltonian(lattice, h, ModelParams(J=J, delta=delta, beta=beta, phase=phase), "aa")


@dataclass(frozen=True)
class ManyBodyHamiltonianSpec:
    lattice: LatticeSpec
    J: float = 1.0
    delta: float = 0.0
    beta: float = GOLDEN_BETA
    phase: float = 0.0
    V: float = 0.0
    wrap_interaction: bool = True


@dataclass
class ManyBodyTerms:
    """Operator terms on 0-based sites.

    ``hoppings`` holds ``(i, j, amp)`` for ``amp * a_i^dag a_j`` with both directions
    listed explicitly; ``onsite`` holds ``(i, eps)``; ``density_density`` holds
    ``(i, j, V)`` for ``V n_i n_j``.
    """

    n_sites: int
    hoppings: list[tuple[int, int, complex]] = field(default_factory=list)
    onsite: list[tuple[int, float]] = field(default_factory=list)
    density_density: list[tuple[int, int, float]] = field(default_factory=list)


def terms_from_matrix(h: np.ndarray, tol: float = 0.0) -> ManyBodyTerms:
    """Quadratic term list reproducing ``sum_ij h_ij a_i^dag a_j``."""
    h = np.asarray(h)
    n = h.shape[0]
    terms = ManyBodyTerms(n)
    for i in range(n):
        if abs(h[i, i]) > tol:
            terms.onsite.append((i, float(np.real(h[i, i]))))
        for j in range(n):
            if i != j and abs(h[i, j]) > tol:
                terms.hoppings.append((i, j, complex(h[i, j])))
    return terms


def build_aa_manybody(spec: ManyBodyHamiltonianSpec) -> ManyBodyTerms:
    lat = spec.lattice
    n = lat.n_sites
    single = build_aa_single(n, spec.J, spec.delta, spec.beta, spec.phase, lat.boundary, lat.filling)
    terms = terms_from_matrix(single.matrix)
    if spec.V != 0.0:
        for a, b in _bonds(n, lat.periodic):
            if (a, b) == (n - 1, 0) and not spec.wrap_interaction:
                continue
            terms.density_density.append((a, b, float(spec.V)))
    return terms
