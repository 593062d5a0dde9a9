"""Closed forms for the mean coverage M(t) = E[|eta_t|] of the solvable
families, together with the second-moment closure coefficients they satisfy
and the spectral bounds attached to the rate table.

Every family obeys M'' = A1 M' + A0 M + B (e_coeffs), whose solution is a
two-exponential curve c1 exp(-alpha1 t) + c2 exp(-alpha2 t) + K with
alpha1 >= alpha2 >= 0. For C1 and C2 the ODE degenerates to first order:
alpha2 = 0 carries the constant mode and c2 = 0, so K is still the value
the curve settles at. The initial data enters through |eta|, g_1(eta) and,
for C2, the corner statistics n_s^(0), n_0^(1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config_stats import Configuration, stats
from .errors import DegenerateSpectrumError, DomainError, NonErgodicError
from .generator import g1 as _g1
from .graph import Graph
from .rates import ModelClass, RateTable

__all__ = [
    "ClosedFormMCF",
    "select_model",
    "mcf_initial",
    "bernoulli_initial",
    "e_coeffs",
    "decay_rates",
    "build_mcf",
    "density_limit",
    "epsilon_M",
]

_REL = 1e-9


def select_model(mc: ModelClass):
    """(label, params) for the highest-priority family the table matched."""
    lab = mc.primary
    if lab is None:
        raise DomainError("rate table is not in any solvable family")
    return lab, mc.params[lab]


def mcf_initial(g: Graph, r: RateTable, c: Configuration):
    """(coverage, g1, n_s^(0), n_0^(1)) of a configuration, the initial
    data build_mcf consumes."""
    t = stats(g, c)
    return (c.coverage, _g1(g, r, c), t.n0[g.s], t.n1[0])


def bernoulli_initial(n: int, r: RateTable, p: float):
    """Expected (coverage, g1, n_s^(0), n_0^(1)) under the product measure
    with site density p on any graph of the table's degree.

    The curve amplitudes are linear in these statistics, so feeding the
    expectations to build_mcf yields the exact measure-averaged M(t).
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"Bernoulli density must lie in [0, 1], got {p}")
    s = r.s
    # k occupied neighbors of a fixed site is Binomial(s, p), independent
    # of the site's own spin
    pk = np.array([math.comb(s, k) * p**k * (1.0 - p) ** (s - k) for k in range(s + 1)])
    lam = np.asarray(r.lam)
    mu = np.asarray(r.mu)
    g1_exp = n * float(pk @ ((1.0 - p) * lam - p * mu))
    return (n * p, g1_exp, n * (1.0 - p) * p**s, n * p * (1.0 - p) ** s)


def _c2_variant(a: float, b: float) -> str:
    scale = max(abs(a), abs(b))
    if scale == 0.0:
        return "frozen"
    if a < 0 or b < 0:
        raise DomainError(f"C2 needs a, b >= 0, got a={a}, b={b}")
    if abs(b) <= _REL * scale:
        return "a"
    if abs(a) <= _REL * scale:
        return "b"
    if abs(a - b) <= _REL * scale:
        return "ab"
    raise DomainError(f"C2 needs a b = 0 or a = b, got a={a}, b={b}")


def _c3_check(params):
    h, a = float(params["h"]), float(params["a"])
    if h < 0 or h + a < 0:
        raise DomainError(f"C3 needs h >= 0 and h + a >= 0, got h={h}, a={a}")
    return h, a


def _c4_check(params):
    h, a, b = (float(params[k]) for k in ("h", "a", "b"))
    if h < 0 or h + a < 0 or h + b < 0:
        raise DomainError(f"C4 needs h, h+a, h+b >= 0, got h={h}, a={a}, b={b}")
    scale = max(h, abs(a), abs(b), 1e-300)
    if abs(h * (a + b) - a * b) > _REL * scale * scale:
        raise DomainError(f"C4 needs h(a+b) = ab, got h={h}, a={a}, b={b}")
    return h, a, b


def e_coeffs(label: str, params: dict, n: int):
    """(A1, A0, B) of the closure g_2 = A1 g_1 + A0 |eta| + B."""
    if label == "C1":
        beta = float(params["h1"]) + float(params["h2"])
        return (-beta, 0.0, 0.0)
    if label == "C2":
        a, b = float(params["a"]), float(params["b"])
        rate = b if _c2_variant(a, b) == "b" else a
        return (-rate, 0.0, 0.0)
    if label == "C3":
        h, a = _c3_check(params)
        return (-(a + 8.0 * h), -12.0 * h * h, 6.0 * h * h * n)
    if label == "C4":
        h, a, b = _c4_check(params)
        return (-(6.0 * h + a + b), -h * (8.0 * h + a + b), h * n * (4.0 * h + a))
    raise DomainError(f"unknown model label {label!r}")


def decay_rates(label: str, params: dict):
    """(alpha1, alpha2) with alpha1 >= alpha2; alpha2 = 0 for the
    first-order families C1, C2 and whenever h = 0."""
    if label == "C1":
        h1, h2 = float(params["h1"]), float(params["h2"])
        if h1 < 0 or h2 < 0:
            raise DomainError(f"C1 needs h1, h2 >= 0, got h1={h1}, h2={h2}")
        return (h1 + h2, 0.0)
    if label == "C2":
        a, b = float(params["a"]), float(params["b"])
        rate = b if _c2_variant(a, b) == "b" else a
        return (rate, 0.0)
    if label == "C3":
        h, a = _c3_check(params)
        tr = 8.0 * h + a
        disc = tr * tr - 48.0 * h * h
    elif label == "C4":
        h, a, b = _c4_check(params)
        tr = 6.0 * h + a + b
        disc = 4.0 * h * h + (a + b) * (a + b) + 8.0 * h * (a + b)
    else:
        raise DomainError(f"unknown model label {label!r}")
    if disc < 0:
        raise DomainError(f"negative discriminant {disc} for {label} parameters {params}")
    sq = math.sqrt(disc)
    a1, a2 = 0.5 * (tr + sq), 0.5 * (tr - sq)
    if a1 - a2 <= 1e-12 * max(1.0, a1):
        raise DegenerateSpectrumError(
            f"coincident decay rates {a1} for {label}; the two-exponential form is invalid"
        )
    return (a1, a2)


@dataclass(frozen=True)
class ClosedFormMCF:
    """Mean-coverage curve c1 exp(-alpha1 t) + c2 exp(-alpha2 t) + asymptote.

    The asymptote field is the constant term of the formula; it is the
    t -> infinity limit exactly when alpha2 > 0 (otherwise the constant
    mode c2 joins it).
    """

    label: str
    params: dict
    n: int
    alpha1: float
    alpha2: float
    c1: float
    c2: float
    asymptote: float
    variant: str | None = None
    initial: tuple = field(default=())

    def evaluate(self, t):
        tt = np.asarray(t, dtype=np.float64)
        if np.any(tt < 0):
            raise DomainError("evaluation times must be >= 0")
        out = self.c1 * np.exp(-self.alpha1 * tt) + self.c2 * np.exp(-self.alpha2 * tt) + self.asymptote
        return float(out) if np.isscalar(t) else out

    __call__ = evaluate


def build_mcf(label: str, params: dict, n: int, initial) -> ClosedFormMCF:
    """Closed-form mean coverage for one of the solvable families.

    initial = (coverage, g1, n_s^(0), n_0^(1)) of the starting
    configuration, e.g. from mcf_initial. The curve satisfies
    M(0) = coverage and M'(0) = g1 by construction.
    """
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    try:
        cov, g1v, ns0, n01 = initial
    except (TypeError, ValueError):
        raise DomainError("initial must be (coverage, g1, ns0, n01)") from None
    cov, g1v, ns0, n01 = float(cov), float(g1v), float(ns0), float(n01)
    if not 0 <= cov <= n:
        raise DomainError(f"coverage {cov} out of range 0..{n}")

    common = dict(label=label, params=dict(params), n=n, initial=(cov, g1v, ns0, n01))

    if label == "C1":
        h1, h2 = float(params["h1"]), float(params["h2"])
        d = float(params.get("d", 0.0))
        if h1 < 0 or h2 < 0 or d < 0:
            raise DomainError(f"C1 needs d, h1, h2 >= 0, got d={d}, h1={h1}, h2={h2}")
        beta = h1 + h2
        if beta == 0.0:
            # pure voter: coverage is a martingale
            return ClosedFormMCF(alpha1=0.0, alpha2=0.0, c1=0.0, c2=0.0, asymptote=cov, **common)
        k = h1 * n / beta
        return ClosedFormMCF(alpha1=beta, alpha2=0.0, c1=cov - k, c2=0.0, asymptote=k, **common)

    if label == "C2":
        a, b = float(params["a"]), float(params["b"])
        variant = _c2_variant(a, b)
        if variant == "frozen":
            return ClosedFormMCF(
                alpha1=0.0, alpha2=0.0, c1=0.0, c2=0.0, asymptote=cov, variant=variant, **common
            )
        if variant == "a":
            amp, rate = -ns0, a
        elif variant == "b":
            amp, rate = n01, b
        else:  # a = b: both corner statistics decay at the same rate
            amp, rate = -(ns0 - n01), a
        return ClosedFormMCF(
            alpha1=rate, alpha2=0.0, c1=amp, c2=0.0, asymptote=cov - amp, variant=variant, **common
        )

    if label == "C3":
        _c3_check(params)
        alpha1, alpha2 = decay_rates(label, params)
        k = n / 2.0
    elif label == "C4":
        h, a, b = _c4_check(params)
        denom = 8.0 * h + a + b
        if denom <= 0:
            # h = 0 and a + b = 0 force a = b = 0: frozen table
            return ClosedFormMCF(alpha1=0.0, alpha2=0.0, c1=0.0, c2=0.0, asymptote=cov, **common)
        alpha1, alpha2 = decay_rates(label, params)
        k = n * (4.0 * h + a) / denom
    else:
        raise DomainError(f"unknown model label {label!r}")

    c1 = (alpha2 * (cov - k) + g1v) / (alpha2 - alpha1)
    c2 = cov - k - c1
    return ClosedFormMCF(alpha1=alpha1, alpha2=alpha2, c1=c1, c2=c2, asymptote=k, **common)


def density_limit(label: str, params: dict) -> float:
    """Stationary mean density. Requires an ergodic member: C1 with
    h1 + h2 > 0, or C3/C4 with h > 0."""
    if label == "C1":
        h1, h2 = float(params["h1"]), float(params["h2"])
        if h1 + h2 <= 0:
            raise NonErgodicError("C1 needs h1 + h2 > 0 for a stationary density")
        return h1 / (h1 + h2)
    if label == "C3":
        h, _ = _c3_check(params)
        if h <= 0:
            raise NonErgodicError("C3 needs h > 0 for a stationary density")
        return 0.5
    if label == "C4":
        h, a, b = _c4_check(params)
        if h <= 0:
            raise NonErgodicError("C4 needs h > 0 for a stationary density")
        return (4.0 * h + a) / (8.0 * h + a + b)
    raise DomainError(f"no stationary density formula for label {label!r}")


def epsilon_M(r: RateTable) -> float:
    """Lower bound eps - M for the spectral gap: eps = min_k
    (lambda_k + mu_k), M = s max_k max(|lambda increment|, |mu increment|).
    Positive only when the table is nearly constant in k."""
    eps = min(l + m for l, m in zip(r.lam, r.mu))
    if r.s == 0:
        return eps
    big_m = r.s * max(
        max(abs(r.lam[k] - r.lam[k - 1]), abs(r.mu[k] - r.mu[k - 1])) for k in range(1, r.s + 1)
    )
    return eps - big_m
