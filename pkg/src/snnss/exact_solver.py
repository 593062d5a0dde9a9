"""Exact finite-state computations on the full 2^n configuration space.

State index r encodes the configuration with vertex i stored in bit i
(row r of config_stats.enumerate_configurations). The generator matrix Q
acts on row distributions: d(t) = d(0) exp(Q t).

Transient expectations use uniformization: with Lambda an upper bound on
the exit rates, exp(Q t) = sum_m Poisson(m; Lambda t) P^m for the
stochastic matrix P = I + Q/Lambda. The Poisson series is truncated at
tail mass < tail_tol per grid point and the retained probability mass is
certified. The spectral gap and the stationary distribution require an
irreducible chain (checked by strong connectivity of the positive-rate
digraph).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import splu
from scipy.stats import poisson

from .config_stats import Configuration, enumerate_configurations
from .errors import DomainError, NonErgodicError, ResourceLimitError
from .graph import Graph
from .rates import RateTable

__all__ = [
    "FullGenerator",
    "TransientSeries",
    "build_full_generator",
    "state_index",
    "point_distribution",
    "bernoulli_distribution",
    "coverage_observable",
    "transient_expectation",
    "transient_mean_coverage",
    "spectral_gap_exact",
    "stationary_distribution",
]

# dense eigendecomposition / direct stationary solves stop here (4096 states)
MAX_EIG_N = 12

PROB_DEFECT_BOUND = 1e-10


@dataclass(frozen=True)
class FullGenerator:
    """Sparse generator on all 2^n configurations.

    q is CSR with the diagonal included; unif_rate = max exit rate, the
    uniformization constant.
    """

    n: int
    s: int
    dim: int
    q: sp.csr_matrix
    unif_rate: float


def build_full_generator(g: Graph, r: RateTable) -> FullGenerator:
    if g.s != r.s:
        raise DomainError(f"rate table has s={r.s}, graph degree is {g.s}")
    bits = enumerate_configurations(g.n)  # raises ResourceLimitError past 2^20
    dim, n = bits.shape
    k = np.zeros((dim, n), dtype=np.int16)
    for j in range(g.s):
        k += bits[:, g.neighbors[:, j]]
    lam = np.asarray(r.lam)
    mu = np.asarray(r.mu)
    rates = np.where(bits == 0, lam[k], mu[k])

    idx = np.arange(dim, dtype=np.int64)
    cols = idx[:, None] ^ (np.int64(1) << np.arange(n, dtype=np.int64))[None, :]
    rows = np.repeat(idx, n)
    diag = -rates.sum(axis=1)
    q = sp.coo_matrix(
        (
            np.concatenate([rates.ravel(), diag]),
            (np.concatenate([rows, idx]), np.concatenate([cols.ravel(), idx])),
        ),
        shape=(dim, dim),
    ).tocsr()
    return FullGenerator(n=n, s=g.s, dim=dim, q=q, unif_rate=float(-diag.min()))


def state_index(c: Configuration) -> int:
    return int((c.bits.astype(np.int64) << np.arange(c.n, dtype=np.int64)).sum())


def point_distribution(n: int, c: Configuration) -> np.ndarray:
    if c.n != n:
        raise DomainError(f"configuration has {c.n} sites, expected {n}")
    d = np.zeros(1 << n)
    d[state_index(c)] = 1.0
    return d


def bernoulli_distribution(n: int, p: float) -> np.ndarray:
    """Product measure: each site occupied independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must be in [0, 1], got {p}")
    pc = enumerate_configurations(n).sum(axis=1).astype(np.float64)
    return p**pc * (1.0 - p) ** (n - pc)


def coverage_observable(n: int) -> np.ndarray:
    """|eta| per state index."""
    return enumerate_configurations(n).sum(axis=1).astype(np.float64)


@dataclass(frozen=True)
class TransientSeries:
    t_grid: np.ndarray
    values: np.ndarray
    truncation_order: int
    prob_defect: float


def _check_distribution(dim: int, init) -> np.ndarray:
    d = np.asarray(init, dtype=np.float64)
    if d.shape != (dim,):
        raise DomainError(f"initial distribution must have shape ({dim},), got {d.shape}")
    if d.min() < -1e-12:
        raise DomainError(f"initial distribution has negative mass {d.min()}")
    if abs(d.sum() - 1.0) > 1e-9:
        raise DomainError(f"initial distribution sums to {d.sum()}, not 1")
    return np.maximum(d, 0.0)


def transient_expectation(
    fg: FullGenerator, init, observable, t_grid, tail_tol: float = 1e-12
) -> TransientSeries:
    """E[f(eta_t)] at each grid time from the given initial distribution.

    Certifies that the retained probability mass is within
    PROB_DEFECT_BOUND of 1 at every grid point.
    """
    t = np.asarray(t_grid, dtype=np.float64)
    if t.ndim != 1 or t.size == 0:
        raise DomainError("t_grid must be a non-empty 1-d array")
    if t.min() < 0 or np.any(np.diff(t) < 0):
        raise DomainError("t_grid must be ascending and nonnegative")
    f = np.asarray(observable, dtype=np.float64)
    if f.shape != (fg.dim,):
        raise DomainError(f"observable must have shape ({fg.dim},), got {f.shape}")
    d0 = _check_distribution(fg.dim, init)

    lam = fg.unif_rate
    if lam == 0.0:
        val = float(d0 @ f)
        return TransientSeries(t_grid=t, values=np.full(t.shape, val), truncation_order=0, prob_defect=0.0)

    lt = lam * t
    order = 0
    for x in lt:
        if x > 0:
            m = int(poisson.ppf(1.0 - tail_tol, x)) + 1
            while poisson.sf(m, x) > tail_tol:
                m += 1
            order = max(order, m)
    weights = poisson.pmf(np.arange(order + 1)[None, :], lt[:, None])

    pt = (sp.identity(fg.dim, format="csr") + fg.q.multiply(1.0 / lam)).T.tocsr()
    acc = np.zeros((t.size, fg.dim))
    v = d0.copy()
    for m in range(order + 1):
        acc += weights[:, m][:, None] * v[None, :]
        if m < order:
            v = pt @ v
    defect = float(np.abs(1.0 - acc.sum(axis=1)).max())
    if defect > PROB_DEFECT_BOUND:
        raise RuntimeError(f"uniformization lost {defect} probability mass; tail bound violated")
    return TransientSeries(t_grid=t, values=acc @ f, truncation_order=order, prob_defect=defect)


def transient_mean_coverage(fg: FullGenerator, init, t_grid, tail_tol: float = 1e-12) -> TransientSeries:
    return transient_expectation(fg, init, coverage_observable(fg.n), t_grid, tail_tol=tail_tol)


def _require_irreducible(fg: FullGenerator):
    adj = fg.q.tocoo()
    mask = (adj.row != adj.col) & (adj.data > 0)
    pattern = sp.coo_matrix(
        (np.ones(mask.sum()), (adj.row[mask], adj.col[mask])), shape=(fg.dim, fg.dim)
    ).tocsr()
    ncomp, _ = connected_components(pattern, directed=True, connection="strong")
    if ncomp != 1:
        raise NonErgodicError(f"chain is reducible: {ncomp} strongly connected components")


def spectral_gap_exact(fg: FullGenerator) -> float:
    """-max{Re w : w nonzero eigenvalue of Q}, by dense eigendecomposition.

    Bounded at n <= MAX_EIG_N vertices; requires irreducibility (so the
    zero eigenvalue is simple).
    """
    if fg.n > MAX_EIG_N:
        raise ResourceLimitError(f"dense spectral gap bounded at n <= {MAX_EIG_N}, got {fg.n}")
    _require_irreducible(fg)
    w = np.linalg.eigvals(fg.q.toarray())
    re = np.sort(w.real)[::-1]
    scale = max(1.0, float(np.abs(re).max()))
    if abs(re[0]) > 1e-8 * scale:
        raise RuntimeError(f"leading eigenvalue {re[0]} is not numerically zero")
    return float(-re[1])


def stationary_distribution(fg: FullGenerator) -> np.ndarray:
    """The unique distribution with nu Q = 0, by a direct sparse solve.

    The last balance equation is replaced by the normalization row (valid
    for any irreducible Q). The residual ||nu Q||_inf is checked against
    1e-10.
    """
    if fg.n > MAX_EIG_N:
        raise ResourceLimitError(f"direct stationary solve bounded at n <= {MAX_EIG_N}, got {fg.n}")
    _require_irreducible(fg)
    qt = fg.q.T.tocsr()
    ones_row = sp.csr_matrix(np.ones((1, fg.dim)))
    a = sp.vstack([qt[:-1, :], ones_row]).tocsc()
    b = np.zeros(fg.dim)
    b[-1] = 1.0
    nu = splu(a).solve(b)
    if nu.min() < -1e-12:
        raise RuntimeError(f"stationary solve produced negative mass {nu.min()}")
    nu = np.maximum(nu, 0.0)
    nu /= nu.sum()
    resid = float(np.abs(nu @ fg.q).max())
    if resid > 1e-10:
        raise RuntimeError(f"stationary residual {resid} exceeds 1e-10")
    return nu
