"""Flip-rate tables and recognition of the four solvable families.

A rate table assigns the birth rate lambda_k (empty site, k occupied
neighbors) and death rate mu_k (occupied site, k occupied neighbors) for
k = 0..s. The solvable families, in the threshold-at-s parameterization
lambda = (h, .., h, h+a), mu = (h+b, h, .., h):

  C1  noisy voter: both sequences arithmetic, lambda-increment equals
      mu-decrement d >= 0; params (d, h1 = lambda_0, h2 = mu_0 - s d)
  C2  noiseless threshold: h = 0 and (a b = 0 or a = b); params (a, b)
  C3  threshold noisy voter: a = b, degree s in {2, 3}; params (h, a)
  C4  s = 2 with the balance h (a + b) = a b; params (h, a, b)

classify reports every family a table belongs to; overlaps are real
(e.g. a frozen table is in all four).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "RateTable",
    "ModelClass",
    "CLASS_PRIORITY",
    "make_noisy_voter",
    "make_threshold_voter",
    "make_generalized_threshold",
    "flip_rate",
    "classify",
]

CLASS_PRIORITY = ("C1", "C3", "C4", "C2")
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class RateTable:
    """Immutable (lambda_k, mu_k) table for k = 0..s; all entries finite
    and nonnegative."""

    s: int
    lam: tuple
    mu: tuple

    def __post_init__(self):
        if self.s < 1:
            raise DomainError(f"degree must be >= 1, got {self.s}")
        lam = tuple(float(v) for v in self.lam)
        mu = tuple(float(v) for v in self.mu)
        if len(lam) != self.s + 1 or len(mu) != self.s + 1:
            raise DomainError(
                f"rate table for s={self.s} needs {self.s + 1} entries per row, "
                f"got {len(lam)} lambdas and {len(mu)} mus"
            )
        for name, row in (("lambda", lam), ("mu", mu)):
            for k, v in enumerate(row):
                if not math.isfinite(v):
                    raise DomainError(f"{name}_{k} is not finite")
                if v < 0:
                    raise DomainError(f"{name}_{k} = {v} is negative")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)

    @property
    def max_rate(self) -> float:
        return max(max(self.lam), max(self.mu))

    def to_json(self) -> str:
        return json.dumps({"s": self.s, "lambda": list(self.lam), "mu": list(self.mu)})

    @classmethod
    def from_json(cls, text: str) -> "RateTable":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise DomainError(f"rate table is not valid JSON: {e}") from None
        return cls.from_dict(obj)

    @classmethod
    def from_dict(cls, obj) -> "RateTable":
        if not isinstance(obj, dict) or not {"s", "lambda", "mu"} <= set(obj):
            raise DomainError('rate table JSON needs keys "s", "lambda", "mu"')
        return cls(s=int(obj["s"]), lam=tuple(obj["lambda"]), mu=tuple(obj["mu"]))


def flip_rate(r: RateTable, spin: int, k: int) -> float:
    """Rate of flipping a site with the given spin and k occupied neighbors."""
    if spin not in (0, 1):
        raise DomainError(f"spin must be 0 or 1, got {spin}")
    if not 0 <= k <= r.s:
        raise DomainError(f"neighbor count {k} out of range 0..{r.s}")
    return r.lam[k] if spin == 0 else r.mu[k]


def make_noisy_voter(s: int, d: float, h1: float, h2: float) -> RateTable:
    """lambda_k = h1 + k d, mu_k = h2 + (s-k) d with d, h1, h2 >= 0."""
    if d < 0 or h1 < 0 or h2 < 0:
        raise DomainError(f"noisy voter needs d, h1, h2 >= 0 (got d={d}, h1={h1}, h2={h2})")
    return RateTable(
        s=s,
        lam=tuple(h1 + k * d for k in range(s + 1)),
        mu=tuple(h2 + (s - k) * d for k in range(s + 1)),
    )


def _check_threshold_args(s, q, h, a):
    if not 1 <= q <= s:
        raise DomainError(f"threshold must satisfy 1 <= q <= s, got q={q}, s={s}")
    if h < 0:
        raise DomainError(f"threshold family needs h >= 0, got {h}")
    if h + a < 0:
        raise DomainError(f"threshold family needs h + a >= 0, got h={h}, a={a}")


def make_threshold_voter(s: int, q: int, h: float, a: float) -> RateTable:
    """lambda_k = h below the threshold q and h+a at or above it; mu mirrors
    (mu_k = h+a for k <= s-q, h above)."""
    _check_threshold_args(s, q, h, a)
    return RateTable(
        s=s,
        lam=tuple(h + a if k >= q else h for k in range(s + 1)),
        mu=tuple(h + a if k <= s - q else h for k in range(s + 1)),
    )


def make_generalized_threshold(s: int, q: int, h: float, a: float, b: float) -> RateTable:
    """Threshold family with independent birth and death jumps a, b."""
    _check_threshold_args(s, q, h, a)
    if h + b < 0:
        raise DomainError(f"threshold family needs h + b >= 0, got h={h}, b={b}")
    return RateTable(
        s=s,
        lam=tuple(h + a if k >= q else h for k in range(s + 1)),
        mu=tuple(h + b if k <= s - q else h for k in range(s + 1)),
    )


@dataclass(frozen=True)
class ModelClass:
    """Classification outcome: every family label the table matches, the
    extracted parameters per label, and the per-family residual (worst
    absolute violation of the family's defining conditions; the C4 balance
    residual is in squared-rate units)."""

    labels: frozenset
    params: dict
    residuals: dict
    tol: float

    @property
    def primary(self):
        """The label used for closed-form selection, or None."""
        for lab in CLASS_PRIORITY:
            if lab in self.labels:
                return lab
        return None

    def __contains__(self, label) -> bool:
        return label in self.labels


def classify(r: RateTable, tol: float = DEFAULT_TOL) -> ModelClass:
    """Match a table against the four solvable families.

    tol is relative: degree-1 conditions are checked with absolute slack
    tol * max_rate, the quadratic C4 balance with tol * max_rate**2, so the
    label set is invariant under scaling every rate by a positive constant.
    """
    if tol < 0:
        raise DomainError(f"tolerance must be >= 0, got {tol}")
    s = r.s
    scale = r.max_rate
    lin = tol * scale
    quad = tol * scale * scale

    labels = set()
    params = {}
    residuals = {}

    # C1: pooled lambda-increments and mu-decrements all equal to one d >= 0
    incs = [r.lam[k] - r.lam[k - 1] for k in range(1, s + 1)]
    incs += [r.mu[k - 1] - r.mu[k] for k in range(1, s + 1)]
    d = sum(incs) / len(incs)
    resid_c1 = max(abs(v - d) for v in incs)
    if d < 0:
        resid_c1 = max(resid_c1, -d)
    residuals["C1"] = resid_c1
    if resid_c1 <= lin:
        d_hat = max(d, 0.0)
        params["C1"] = {"d": d_hat, "h1": r.lam[0], "h2": r.mu[0] - s * d_hat}
        labels.add("C1")

    # threshold-at-s shape shared by C2/C3/C4:
    # lambda_0..lambda_{s-1} and mu_1..mu_s all equal h
    plateau = list(r.lam[:s]) + list(r.mu[1:])
    h = sum(plateau) / len(plateau)
    shape_resid = max(abs(v - h) for v in plateau)
    a = r.lam[s] - h
    b = r.mu[0] - h

    resid_c2 = max(shape_resid, abs(h), min(abs(a * b) / max(scale, 1.0), abs(a - b)))
    residuals["C2"] = resid_c2
    if shape_resid <= lin and abs(h) <= lin and (abs(a * b) <= quad or abs(a - b) <= lin):
        params["C2"] = {"a": a, "b": b}
        labels.add("C2")

    resid_c3 = max(shape_resid, abs(a - b)) if s in (2, 3) else math.inf
    residuals["C3"] = resid_c3
    if s in (2, 3) and shape_resid <= lin and abs(a - b) <= lin:
        params["C3"] = {"h": h, "a": 0.5 * (a + b)}
        labels.add("C3")

    if s == 2:
        balance = h * (a + b) - a * b
        resid_c4 = max(shape_resid, abs(balance) / max(scale, 1.0))
        residuals["C4"] = resid_c4
        if shape_resid <= lin and abs(balance) <= quad:
            params["C4"] = {"h": h, "a": a, "b": b}
            labels.add("C4")
    else:
        residuals["C4"] = math.inf

    return ModelClass(labels=frozenset(labels), params=params, residuals=residuals, tol=tol)
