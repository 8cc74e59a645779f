"""Exact diagonalization of spinless fermions at fixed particle number.

Operators are ordered site-ascending: a basis mask ``s`` stands for
``a_{i1}^dag a_{i2}^dag ... |0>`` with ``i1 < i2 < ...``.  Moving ``a_j`` or
``a_i^dag`` into place therefore costs ``(-1)`` per occupied site strictly below
it, and a hop ``a_i^dag a_j`` picks up the parity of the occupied sites strictly
between ``i`` and ``j``.  The periodic wrap hop is just another ``(i, j)`` pair.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .freefermion import CorrelationData
from .models import ManyBodyTerms

MAX_BASIS_STATES = 5_000_000
DENSE_LIMIT = 4000
RESIDUAL_TOL = 1e-9
DEGENERACY_TOL = 1e-10
START_SEED = 20240611


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class FockBasis:
    n_sites: int
    n_particles: int
    states: np.ndarray

    def __len__(self) -> int:
        return len(self.states)

    def index(self, masks) -> np.ndarray:
        """Ordinal of each mask; raises KeyError for masks outside the basis."""
        masks = np.asarray(masks, dtype=np.int64)
        pos = np.searchsorted(self.states, masks)
        pos = np.clip(pos, 0, len(self.states) - 1)
        if not np.all(self.states[pos] == masks):
            raise KeyError("mask not in basis")
        return pos

    def occupations(self) -> np.ndarray:
        """Boolean (dim, N) table; column m is bit m of each state."""
        return ((self.states[:, None] >> np.arange(self.n_sites)[None, :]) & 1).astype(bool)


def build_basis(n_sites: int, n_particles: int) -> FockBasis:
    if not 0 < n_particles <= n_sites <= 24:
        raise ValueError(f"need 0 < M <= N <= 24, got N={n_sites}, M={n_particles}")
    dim = math.comb(n_sites, n_particles)
    if dim > MAX_BASIS_STATES:
        raise ValueError(f"basis of {dim} states exceeds the limit of {MAX_BASIS_STATES}")
    masks = np.fromiter((sum(1 << i for i in c) for c in itertools.combinations(range(n_sites), n_particles)),
                        dtype=np.int64, count=dim)
    masks.sort()
    masks.setflags(write=False)
    return FockBasis(n_sites, n_particles, masks)


def _popcount(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    count = np.zeros(x.shape, dtype=np.int64)
    while np.any(x):
        count += x & 1
        x = x >> 1
    return count


def assemble(terms: ManyBodyTerms, basis: FockBasis) -> sp.csr_matrix:
    if terms.n_sites != basis.n_sites:
        raise ValueError("term list and basis disagree on the number of sites")
    states = basis.states
    occ = basis.occupations()
    dim = len(states)
    rows, cols, vals = [], [], []

    diag = np.zeros(dim)
    for i, eps in terms.onsite:
        diag += eps * occ[:, i]
    for i, j, v in terms.density_density:
        diag += v * (occ[:, i] & occ[:, j])
    rows.append(np.arange(dim))
    cols.append(np.arange(dim))
    vals.append(diag.astype(complex))

    for i, j, amp in terms.hoppings:
        if not 0 <= i < basis.n_sites or not 0 <= j < basis.n_sites:
            raise ValueError(f"hopping ({i}, {j}) outside the lattice")
        if i == j:
            rows.append(np.nonzero(occ[:, i])[0])
            cols.append(rows[-1])
            vals.append(np.full(len(rows[-1]), amp, dtype=complex))
            continue
        src = np.nonzero(occ[:, j] & ~occ[:, i])[0]
        s = states[src]
        lo, hi = min(i, j), max(i, j)
        between = ((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1)
        sign = 1.0 - 2.0 * (_popcount(s & between) & 1)
        target = basis.index(s ^ (1 << j) ^ (1 << i))
        rows.append(target)
        cols.append(src)
        vals.append(amp * sign)

    h = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(dim, dim)).tocsr()
    h.sum_duplicates()
    if not np.any(np.iscomplex(h.data)):
        h = h.real.tocsr()
    skew = (h - h.conj().T).tocsr()
    skew.eliminate_zeros()
    if skew.nnz:
        raise RuntimeError(f"assembled Hamiltonian is not Hermitian ({skew.nnz} mismatched entries)")
    return h


@dataclass(frozen=True, eq=False)
class ManyBodyState:
    basis: FockBasis
    amplitudes: np.ndarray
    energy: float
    metadata: dict = field(default_factory=dict)


def _phase_fix(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v) - 1e-12 * np.arange(len(v))))
    return v * (abs(v[k]) / v[k])


def _start_vector(dim: int, dtype) -> np.ndarray:
    rng = np.random.default_rng(START_SEED)
    v = 1.0 + 0.1 * rng.standard_normal(dim)
    return (v / np.linalg.norm(v)).astype(dtype)


def lanczos(h, v0: np.ndarray, tol: float = RESIDUAL_TOL, krylov_dim: int = 200, max_restarts: int = 50,
            n_ritz: int = 2):
    """Lowest Ritz pairs of a Hermitian operator by restarted Lanczos.

    Full reorthogonalization; each restart begins from the current lowest Ritz
    vector.  Returns ``(values, vectors, history, residual)`` where ``history``
    lists the lowest Ritz value after every Krylov step.
    """
    dim = v0.shape[0]
    krylov_dim = min(krylov_dim, dim)
    v = v0 / np.linalg.norm(v0)
    history = []
    for _ in range(max_restarts):
        basis = np.zeros((dim, krylov_dim), dtype=np.result_type(v, h.dtype))
        alpha, beta = [], []
        basis[:, 0] = v
        m = 0
        ritz_vals = ritz_vecs = None
        for m in range(krylov_dim):
            w = h @ basis[:, m]
            a = np.real(np.vdot(basis[:, m], w))
            w = w - basis[:, : m + 1] @ (basis[:, : m + 1].conj().T @ w)
            w = w - basis[:, : m + 1] @ (basis[:, : m + 1].conj().T @ w)
            alpha.append(a)
            b = np.linalg.norm(w)
            t = np.diag(alpha) + np.diag(beta, 1) + np.diag(beta, -1)
            ritz_vals, ritz_vecs = np.linalg.eigh(t)
            history.append(float(ritz_vals[0]))
            # residual of the lowest Ritz pair is |b * last component|
            if b * abs(ritz_vecs[-1, 0]) <= tol or b < 1e-14 or m + 1 == krylov_dim:
                break
            beta.append(b)
            basis[:, m + 1] = w / b
        k = min(n_ritz, m + 1)
        vecs = basis[:, : m + 1] @ ritz_vecs[:, :k]
        vecs /= np.linalg.norm(vecs, axis=0)
        resid = float(np.linalg.norm(h @ vecs[:, 0] - ritz_vals[0] * vecs[:, 0]))
        if resid <= tol:
            return ritz_vals[:k], vecs, history, resid
        v = vecs[:, 0]
    raise ConvergenceError(f"Lanczos did not converge: residual {resid:.3e} after {max_restarts} restarts")


def _select(values, vectors, previous: np.ndarray | None):
    """Pick the ground vector; inside a degenerate pair follow ``previous``."""
    degenerate = len(values) > 1 and values[1] - values[0] < DEGENERACY_TOL
    v = vectors[:, 0]
    if degenerate and previous is not None:
        sub = vectors[:, np.abs(values - values[0]) < DEGENERACY_TOL]
        proj = sub @ (sub.conj().T @ previous)
        if np.linalg.norm(proj) > 1e-8:
            v = proj / np.linalg.norm(proj)
    return _phase_fix(v), bool(degenerate)


def ground_state(h, basis: FockBasis | None = None, method: str = "auto", previous: ManyBodyState | None = None,
                 tol: float = RESIDUAL_TOL) -> ManyBodyState:
    """Lowest eigenpair; dense below ``DENSE_LIMIT`` states, Lanczos above."""
    dim = h.shape[0]
    if dim < 1:
        raise ValueError("empty Hamiltonian")
    if method == "auto":
        method = "dense" if dim <= DENSE_LIMIT else "iterative"
    prev = None if previous is None else previous.amplitudes
    meta = {"method": method, "dim": dim}
    if method == "dense":
        dense = h.toarray() if sp.issparse(h) else np.asarray(h)
        values, vectors = np.linalg.eigh(dense)
        values, vectors = values[:2], vectors[:, :2]
    elif method == "iterative":
        values, vectors, history, resid = lanczos(h, _start_vector(dim, h.dtype), tol=tol)
        meta["history"] = history
        meta["monotone"] = bool(np.all(np.diff(history) <= 1e-12 * max(1.0, abs(history[0]))))
    else:
        raise ValueError(f"unknown method {method!r}")
    v, degenerate = _select(np.asarray(values), np.asarray(vectors), prev)
    energy = float(np.real(np.vdot(v, h @ v)))
    meta["residual"] = float(np.linalg.norm(h @ v - energy * v))
    meta["degenerate"] = degenerate
    if basis is None:
        basis = FockBasis(0, 0, np.zeros(dim, dtype=np.int64))
    return ManyBodyState(basis, v, energy, meta)


def density_density_mb(state: ManyBodyState) -> CorrelationData:
    """Density correlator read off the occupation basis; no one-body G on this path."""
    prob = np.abs(state.amplitudes) ** 2
    occ = state.basis.occupations().astype(float)
    density = prob @ occ
    nn = occ.T @ (prob[:, None] * occ)
    c = nn - np.outer(density, density)
    c = 0.5 * (c + c.T)
    return CorrelationData(c=c, density=density, g=None)
