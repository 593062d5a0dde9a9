"""The Markov generator acting on configuration functions.

For f on configurations, (Omega f)(eta) = sum_x c(x, eta) (f(eta_x) - f(eta))
where c is the flip rate of site x. g_i denotes the i-fold application of
Omega to the coverage function |eta|; g_1 has a second, purely statistical
form sum_k (lambda_k n_k^(0) - mu_k n_k^(1)) and g1() evaluates both as a
running consistency check.

fit_closure tests whether g_2 is an affine function of (g_1, |eta|) over a
set of configurations, i.e. whether the coverage mean closes into a
second-order linear ODE, and returns the fitted coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config_stats import Configuration, _as_bits_matrix, enumerate_configurations, neighbor_counts, stats
from .errors import DomainError, FitDegenerateError, ResourceLimitError, SnnssError
from .graph import Graph
from .rates import RateTable

__all__ = [
    "g1",
    "site_rates",
    "apply_generator",
    "g_iterate",
    "batch_g1",
    "batch_g2",
    "ClosureFit",
    "fit_closure",
]

MAX_ITERATE_ORDER = 4
# residual scale below which the one-parameter model g2 = A1 g1 is accepted
PURE_A1_TOL = 1e-9
# default residual scale separating "closure holds" from "closure fails"
CLOSURE_TOL = 1e-6
DEFAULT_SAMPLE_SIZE = 4096


def _check_compat(g: Graph, r: RateTable):
    if g.s != r.s:
        raise DomainError(f"rate table has s={r.s}, graph degree is {g.s}")


def site_rates(g: Graph, r: RateTable, c: Configuration) -> np.ndarray:
    """c(x, eta) for every site x."""
    _check_compat(g, r)
    k = neighbor_counts(g, c)
    lam = np.asarray(r.lam)
    mu = np.asarray(r.mu)
    return np.where(c.bits == 0, lam[k], mu[k])


def g1(g: Graph, r: RateTable, c: Configuration) -> float:
    """First generator moment of the coverage.

    Evaluated both as sum_x c(x, eta)(1 - 2 eta(x)) and as
    sum_k (lambda_k n_k^(0) - mu_k n_k^(1)); the two must agree to 1e-12
    relative, and the statistical form is returned.
    """
    rates = site_rates(g, r, c)
    flip_form = float((rates * (1 - 2 * c.bits.astype(np.float64))).sum())
    t = stats(g, c)
    stat_form = float(
        sum(r.lam[k] * t.n0[k] for k in range(r.s + 1))
        - sum(r.mu[k] * t.n1[k] for k in range(r.s + 1))
    )
    if abs(flip_form - stat_form) > 1e-12 * max(1.0, abs(flip_form), abs(stat_form)):
        raise SnnssError(
            f"g1 cross-check failed: flip form {flip_form!r} vs statistical form {stat_form!r}"
        )
    return stat_form


def apply_generator(g: Graph, r: RateTable, f, c: Configuration) -> float:
    """(Omega f)(eta) for an arbitrary f: Configuration -> float."""
    rates = site_rates(g, r, c)
    base = f(c)
    return float(sum(rates[x] * (f(c.flip(x)) - base) for x in range(g.n)))


def g_iterate(g: Graph, r: RateTable, c: Configuration, order: int):
    """(g_1(eta), .., g_order(eta)) by literal nested application of the
    generator. Cost grows as n^order; order is capped at 4."""
    if not 1 <= order <= MAX_ITERATE_ORDER:
        raise ResourceLimitError(f"order must be in 1..{MAX_ITERATE_ORDER}, got {order}")
    _check_compat(g, r)

    def omega_pow(conf: Configuration, i: int) -> float:
        if i == 0:
            return float(conf.coverage)
        rates = site_rates(g, r, conf)
        base = omega_pow(conf, i - 1)
        return float(sum(rates[x] * (omega_pow(conf.flip(x), i - 1) - base) for x in range(g.n)))

    return tuple(omega_pow(c, i) for i in range(1, order + 1))


def batch_g1(g: Graph, r: RateTable, configs) -> np.ndarray:
    """g_1 over a stack of configurations in one vectorized pass."""
    _check_compat(g, r)
    S = _as_bits_matrix(g, configs).astype(np.float64)
    K = S[:, g.neighbors].sum(axis=2).astype(np.int64)
    lam = np.asarray(r.lam)
    mu = np.asarray(r.mu)
    rates = np.where(S == 0, lam[K], mu[K])
    return (rates * (1.0 - 2.0 * S)).sum(axis=1)


def batch_g2(g: Graph, r: RateTable, configs) -> np.ndarray:
    """g_2 over a stack of configurations: sum_x c(x,.) (g_1 flip increment),
    recomputing g_1 per flipped column. O(m n^2 s) array work."""
    _check_compat(g, r)
    S = _as_bits_matrix(g, configs).astype(np.float64)
    m, n = S.shape
    K = S[:, g.neighbors].sum(axis=2).astype(np.int64)
    lam = np.asarray(r.lam)
    mu = np.asarray(r.mu)
    rates = np.where(S == 0, lam[K], mu[K])
    g1_base = (rates * (1.0 - 2.0 * S)).sum(axis=1)

    out = np.zeros(m)
    a = g.adjacency_matrix()
    for x in range(n):
        Sx = S.copy()
        Sx[:, x] = 1.0 - Sx[:, x]
        Kx = K + np.outer(1 - 2 * S[:, x].astype(np.int64), a[x])
        rx = np.where(Sx == 0, lam[Kx], mu[Kx])
        g1_x = (rx * (1.0 - 2.0 * Sx)).sum(axis=1)
        out += rates[:, x] * (g1_x - g1_base)
    return out


@dataclass(frozen=True)
class ClosureFit:
    """Least-squares fit of g_2 = a1 g_1 + a0 |eta| + b over a sample.

    holds is the verdict at the default threshold; threshold stores the
    absolute residual bound that was applied.
    """

    a1: float
    a0: float
    b: float
    residual_max: float
    residual_rms: float
    n_samples: int
    holds: bool
    threshold: float


def _default_sample(g: Graph, seed: int) -> np.ndarray:
    if g.n <= 16:
        return enumerate_configurations(g.n)
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=(DEFAULT_SAMPLE_SIZE, g.n), dtype=np.uint8)


def fit_closure(g: Graph, r: RateTable, sample=None, seed: int = 0, tol: float = CLOSURE_TOL) -> ClosureFit:
    """Fit the second-moment closure over a configuration sample.

    sample: (m, n) bits matrix or sequence of Configuration; None picks the
    default policy (exhaustive enumeration for n <= 16, else 4096
    configurations from the given seed). The one-parameter model
    g2 = a1 g1 is preferred when it already fits at machine scale, which is
    the exact situation for arithmetic rate tables where g_1 is an affine
    function of coverage and the full design is rank-deficient.
    """
    _check_compat(g, r)
    bits = _default_sample(g, seed) if sample is None else _as_bits_matrix(g, sample)
    cov = bits.astype(np.int64).sum(axis=1).astype(np.float64)
    g1v = batch_g1(g, r, bits)
    g2v = batch_g2(g, r, bits)

    scale = max(1.0, float(np.abs(g2v).max(initial=0.0)))
    threshold = tol * scale

    denom = float(g1v @ g1v)
    if denom == 0.0:
        if float(np.abs(g2v).max(initial=0.0)) == 0.0:
            return ClosureFit(0.0, 0.0, 0.0, 0.0, 0.0, len(cov), True, threshold)
        raise FitDegenerateError("g1 vanishes on the whole sample but g2 does not")
    a1_only = float(g1v @ g2v) / denom
    resid1 = g2v - a1_only * g1v
    if float(np.abs(resid1).max()) <= PURE_A1_TOL * scale:
        rmax = float(np.abs(resid1).max())
        rrms = float(np.sqrt(np.mean(resid1**2)))
        return ClosureFit(a1_only, 0.0, 0.0, rmax, rrms, len(cov), rmax <= threshold, threshold)

    design = np.column_stack([g1v, cov, np.ones_like(cov)])
    coef, _, rank, _ = np.linalg.lstsq(design, g2v, rcond=None)
    if rank < 3:
        raise FitDegenerateError(
            "design matrix [g1, coverage, 1] is rank deficient on this sample; "
            "enlarge or diversify the sample"
        )
    resid = g2v - design @ coef
    rmax = float(np.abs(resid).max())
    rrms = float(np.sqrt(np.mean(resid**2)))
    return ClosureFit(
        a1=float(coef[0]),
        a0=float(coef[1]),
        b=float(coef[2]),
        residual_max=rmax,
        residual_rms=rrms,
        n_samples=len(cov),
        holds=rmax <= threshold,
        threshold=threshold,
    )
