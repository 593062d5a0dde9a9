"""Spin configurations and the neighbor-count statistics n_k^(i).

n_k^(i)(eta) counts the vertices carrying spin i whose number of occupied
neighbors is exactly k. Everything in this module is exact integer
arithmetic. The flip identities relate sums of single-site increments
Delta_x f = f(eta_x) - f(eta) of the corner statistics n_s^(0), n_0^(1) to
closed forms in the table entries; identity_report evaluates both sides.

Two evaluation paths exist: a scalar one (single configuration, plain
loops, the reference) and a batch one (one numpy pass over a stack of
configurations) used for large sweeps. Tests cross-check them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GraphError, ResourceLimitError
from .graph import ConditionIIWitness, Graph, check_triangle_free

__all__ = [
    "Configuration",
    "StatsTable",
    "IdentityReport",
    "all_empty",
    "all_occupied",
    "with_occupied",
    "eta1_fixture",
    "eta2_fixture",
    "occupied_neighbors",
    "neighbor_counts",
    "stats",
    "identity_report",
    "identity_report_batch",
    "lemma_f1",
    "lemma_check",
    "lemma_residual_batch",
    "enumerate_configurations",
    "random_configurations",
]

# hard cap on exhaustive enumeration / exact state spaces (2^20 states)
MAX_ENUM_VERTICES = 20


class Configuration:
    """Immutable 0/1 spin assignment on n vertices.

    bits[i] is the spin at vertex i. coverage is the number of occupied
    sites, cached at construction.
    """

    __slots__ = ("bits", "coverage")

    def __init__(self, bits):
        arr = np.ascontiguousarray(bits, dtype=np.uint8)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("configuration must be a non-empty 1-d 0/1 array")
        if arr.max(initial=0) > 1:
            raise DomainError("configuration entries must be 0 or 1")
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)
        object.__setattr__(self, "coverage", int(arr.sum()))

    def __setattr__(self, name, value):
        raise AttributeError("Configuration is immutable")

    @property
    def n(self) -> int:
        return self.bits.size

    @classmethod
    def from_string(cls, text: str) -> "Configuration":
        """Parse the '0'/'1' text form, vertex 0 first."""
        if not text or any(ch not in "01" for ch in text):
            raise DomainError(f"configuration string must be nonempty over '0'/'1', got {text!r}")
        return cls(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"))

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def flip(self, x: int) -> "Configuration":
        if not 0 <= x < self.n:
            raise DomainError(f"vertex {x} out of range for n={self.n}")
        b = self.bits.copy()
        b[x] ^= 1
        return Configuration(b)

    def complement(self) -> "Configuration":
        return Configuration(1 - self.bits)

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())

    def __repr__(self):
        return f"Configuration({self.to_string()!r})"


def all_empty(n: int) -> Configuration:
    return Configuration(np.zeros(n, dtype=np.uint8))


def all_occupied(n: int) -> Configuration:
    return Configuration(np.ones(n, dtype=np.uint8))


def with_occupied(n: int, sites) -> Configuration:
    """Empty configuration with the given sites occupied."""
    b = np.zeros(n, dtype=np.uint8)
    for x in sites:
        if not 0 <= x < n:
            raise DomainError(f"vertex {x} out of range for n={n}")
        b[x] = 1
    return Configuration(b)


def eta1_fixture(g: Graph, w) -> Configuration:
    """All sites occupied except an adjacent pair (y, u1).

    w is either a ConditionIIWitness or a plain (y, u1) pair of adjacent
    vertices. On a triangle-free graph this configuration has
    Q0 = 2, Q1 = n - 2s, R0 = 0 and n_s^(0) = n_0^(1) = 0 exactly
    (R1 = 0 for s >= 3; R1 = 2 on cycles).
    """
    if isinstance(w, ConditionIIWitness):
        y, u1 = w.y, w.u1
    else:
        y, u1 = int(w[0]), int(w[1])
    if not g.adjacent(y, u1):
        raise DomainError(f"fixture needs adjacent vertices, {y} and {u1} are not")
    b = np.ones(g.n, dtype=np.uint8)
    b[y] = 0
    b[u1] = 0
    return Configuration(b)


def eta2_fixture(g: Graph, w: ConditionIIWitness) -> Configuration:
    """eta1 with the witness vertex u2 also emptied.

    The singleton cross-shell geometry is what makes the occupied
    neighborhoods of y, u1, u2 pairwise disjoint, giving Q1 = n + 1 - 3s.
    """
    if not isinstance(w, ConditionIIWitness):
        raise DomainError("eta2_fixture requires a ConditionIIWitness")
    c = eta1_fixture(g, w)
    return c.flip(w.u2)


@dataclass(frozen=True)
class StatsTable:
    """n0[k], n1[k] = number of vertices with spin 0 (resp. 1) and k
    occupied neighbors, k = 0..s."""

    n0: tuple
    n1: tuple

    @property
    def s(self) -> int:
        return len(self.n0) - 1

    def n(self, k: int, spin: int) -> int:
        return (self.n0, self.n1)[spin][k]


def _check_size(g: Graph, c: Configuration):
    if c.n != g.n:
        raise DomainError(f"configuration has {c.n} sites, graph has {g.n}")


def neighbor_counts(g: Graph, c: Configuration) -> np.ndarray:
    """k(x) = number of occupied neighbors of x, as an int64 array."""
    _check_size(g, c)
    return c.bits.astype(np.int64)[g.neighbors].sum(axis=1)


def occupied_neighbors(g: Graph, c: Configuration, x: int) -> int:
    if not 0 <= x < g.n:
        raise DomainError(f"vertex {x} out of range for n={g.n}")
    _check_size(g, c)
    return int(c.bits[g.neighbors[x]].sum())


def stats(g: Graph, c: Configuration) -> StatsTable:
    k = neighbor_counts(g, c)
    occ = c.bits.astype(bool)
    n0 = np.bincount(k[~occ], minlength=g.s + 1)
    n1 = np.bincount(k[occ], minlength=g.s + 1)
    return StatsTable(n0=tuple(int(v) for v in n0), n1=tuple(int(v) for v in n1))


def _flip_deltas(g: Graph, bits, k, x):
    """(Delta_x n_s^(0), Delta_x n_0^(1)) in O(s)."""
    s = g.s
    sigma = int(bits[x])
    kx = int(k[x])
    d_ns0 = (sigma == 1 and kx == s) - (sigma == 0 and kx == s)
    d_n01 = (sigma == 0 and kx == 0) - (sigma == 1 and kx == 0)
    delta = 1 if sigma == 0 else -1
    for y in g.neighbors[x]:
        ky = int(k[y])
        if bits[y] == 0:
            d_ns0 += (ky + delta == s) - (ky == s)
        else:
            d_n01 += (ky + delta == 0) - (ky == 0)
    return d_ns0, d_n01


@dataclass(frozen=True)
class IdentityReport:
    """Flip-sum values and per-identity signed residuals (all exact ints).

    p, q0, q1, r0, r1 are the defining sums over single-site flips. Every
    residual is zero on any finite regular graph; a nonzero entry is a bug
    witness, not a tolerance question.
    """

    p: int
    q0: int
    q1: int
    r0: int
    r1: int
    residuals: dict

    @property
    def max_abs_residual(self) -> int:
        return max(abs(v) for v in self.residuals.values())

    @property
    def ok(self) -> bool:
        return self.max_abs_residual == 0


def identity_report(g: Graph, c: Configuration) -> IdentityReport:
    """Evaluate the flip identities for one configuration.

    Residual keys:
      q0_closed      Q0 - (-n_s^(0) + n_{s-1}^(0))
      q1_closed      Q1 - (-s n_s^(0) + n_s^(1))
      p_two_forms    the two defining sums of P against each other
      r0_dual        R0(eta) - Q1(complement) via the reflection
                     n_k^(i)(complement) = n_{s-k}^(1-i)(eta)
      r1_dual        R1(eta) - Q0(complement), same reflection
      flip_ns0_shell sum over the n_s^(0) shell of Delta n_s^(0), plus n_s^(0)
      flip_n01_shell sum over the n_0^(1) shell of Delta n_0^(1), plus n_0^(1)
      degree_sum     sum_k k (n_k^(0)+n_k^(1)) - s |eta|
      s2_balance     2 (n_2^(0)-n_0^(1)) - (n_1^(1)-n_1^(0)), s = 2 only
    """
    _check_size(g, c)
    s = g.s
    bits = c.bits
    k = neighbor_counts(g, c)
    t = stats(g, c)

    q0 = q1 = r0 = r1 = 0
    p1 = p2 = 0
    shell_a = shell_b = 0
    for x in range(g.n):
        d_ns0, d_n01 = _flip_deltas(g, bits, k, x)
        if bits[x] == 0:
            q0 += d_ns0
            r0 += d_n01
            if k[x] == s:
                p1 += d_n01
                shell_a += d_ns0
        else:
            q1 += d_ns0
            r1 += d_n01
            if k[x] == 0:
                p2 += d_ns0
                shell_b += d_n01

    ns0, ns1 = t.n0[s], t.n1[s]
    n01, n00 = t.n1[0], t.n0[0]
    residuals = {
        "q0_closed": q0 - (-ns0 + t.n0[s - 1]),
        "q1_closed": q1 - (-s * ns0 + ns1),
        "p_two_forms": p1 - p2,
        "r0_dual": r0 - (-s * n01 + n00),
        "r1_dual": r1 - (-n01 + t.n1[1]),
        "flip_ns0_shell": shell_a + ns0,
        "flip_n01_shell": shell_b + n01,
        "degree_sum": int(k.sum()) - s * c.coverage,
    }
    if s == 2:
        residuals["s2_balance"] = 2 * (ns0 - n01) - (t.n1[1] - t.n0[1])
    return IdentityReport(p=p1, q0=q0, q1=q1, r0=r0, r1=r1, residuals=residuals)


def _as_bits_matrix(g: Graph, configs) -> np.ndarray:
    if isinstance(configs, np.ndarray):
        m = np.ascontiguousarray(configs, dtype=np.int64)
        if m.ndim != 2 or m.shape[1] != g.n:
            raise DomainError(f"expected a (m, {g.n}) bits matrix, got shape {configs.shape}")
    else:
        m = np.array([c.bits for c in configs], dtype=np.int64)
        if m.size == 0:
            raise DomainError("empty configuration batch")
        if m.shape[1] != g.n:
            raise DomainError(f"configurations have {m.shape[1]} sites, graph has {g.n}")
    if m.min(initial=0) < 0 or m.max(initial=0) > 1:
        raise DomainError("bits matrix entries must be 0 or 1")
    return m


def identity_report_batch(g: Graph, configs) -> dict:
    """Vectorized identity_report over a stack of configurations.

    configs: (m, n) 0/1 matrix or a sequence of Configuration. Returns a
    dict mapping the identity_report residual keys to int64 arrays of
    length m, plus 'p', 'q0', 'q1', 'r0', 'r1' value arrays.
    """
    s = g.s
    S = _as_bits_matrix(g, configs)
    K = S[:, g.neighbors].sum(axis=2)

    src = np.repeat(np.arange(g.n), s)
    dst = g.neighbors.ravel()
    delta = 1 - 2 * S[:, src]
    Sy = S[:, dst]
    Ky = K[:, dst]
    nbr_ns0 = np.where(Sy == 0, ((Ky + delta) == s).astype(np.int64) - (Ky == s), 0)
    nbr_n01 = np.where(Sy == 1, ((Ky + delta) == 0).astype(np.int64) - (Ky == 0), 0)
    starts = np.arange(0, g.n * s, s)
    d_ns0 = np.add.reduceat(nbr_ns0, starts, axis=1)
    d_n01 = np.add.reduceat(nbr_n01, starts, axis=1)
    top = K == s
    bot = K == 0
    occ = S == 1
    emp = ~occ
    d_ns0 += np.where(occ & top, 1, 0) - np.where(emp & top, 1, 0)
    d_n01 += np.where(emp & bot, 1, 0) - np.where(occ & bot, 1, 0)

    q0 = (d_ns0 * emp).sum(axis=1)
    q1 = (d_ns0 * occ).sum(axis=1)
    r0 = (d_n01 * emp).sum(axis=1)
    r1 = (d_n01 * occ).sum(axis=1)
    p1 = (d_n01 * (emp & top)).sum(axis=1)
    p2 = (d_ns0 * (occ & bot)).sum(axis=1)
    shell_a = (d_ns0 * (emp & top)).sum(axis=1)
    shell_b = (d_n01 * (occ & bot)).sum(axis=1)

    ns0 = (emp & top).sum(axis=1)
    ns1 = (occ & top).sum(axis=1)
    n01 = (occ & bot).sum(axis=1)
    n00 = (emp & bot).sum(axis=1)
    n11 = (occ & (K == 1)).sum(axis=1)
    n10 = (emp & (K == 1)).sum(axis=1)
    nsm1_0 = (emp & (K == s - 1)).sum(axis=1)
    coverage = S.sum(axis=1)

    out = {
        "p": p1,
        "q0": q0,
        "q1": q1,
        "r0": r0,
        "r1": r1,
        "q0_closed": q0 - (-ns0 + nsm1_0),
        "q1_closed": q1 - (-s * ns0 + ns1),
        "p_two_forms": p1 - p2,
        "r0_dual": r0 - (-s * n01 + n00),
        "r1_dual": r1 - (-n01 + n11),
        "flip_ns0_shell": shell_a + ns0,
        "flip_n01_shell": shell_b + n01,
        "degree_sum": K.sum(axis=1) - s * coverage,
    }
    if s == 2:
        out["s2_balance"] = 2 * (ns0 - n01) - (n11 - n10)
    return out


RESIDUAL_KEYS = (
    "q0_closed",
    "q1_closed",
    "p_two_forms",
    "r0_dual",
    "r1_dual",
    "flip_ns0_shell",
    "flip_n01_shell",
    "degree_sum",
    "s2_balance",
)


def lemma_f1(s: int) -> int:
    """Coefficient multiplying (n_s^(0) - n_0^(1)) in the four-corner
    balance. -3 at s=2, -2 at s=3; for s > 3 the single-occupied-site
    calibration forces 1-s, and no constant makes the balance hold on all
    configurations (the adjacent-pair configuration misses it by 2s-6).
    """
    if s < 2:
        raise DomainError(f"degree must be >= 2, got {s}")
    return -3 if s == 2 else 1 - s


def _lemma_residual_from_counts(s, n, ns1, nsm10, n11, n00, ns0, n01, cov):
    f1 = lemma_f1(s)
    return (ns1 + nsm10 - n11 - n00) - (f1 * (ns0 - n01) + 2 * cov - n)


def lemma_check(g: Graph, c: Configuration) -> int:
    """Signed residual of the four-corner balance

        n_s^(1) + n_{s-1}^(0) - n_1^(1) - n_0^(0)
            = F1 (n_s^(0) - n_0^(1)) + 2 |eta| - n.

    Zero for every configuration exactly when s is 2 or 3 (the graph must
    be triangle-free). For larger s the calibrated F1 is used and a
    nonzero residual is a meaningful report, not an error.
    """
    _check_size(g, c)
    if not check_triangle_free(g):
        raise DomainError("the four-corner balance requires a triangle-free graph")
    t = stats(g, c)
    s = g.s
    return int(
        _lemma_residual_from_counts(
            s, g.n, t.n1[s], t.n0[s - 1], t.n1[1], t.n0[0], t.n0[s], t.n1[0], c.coverage
        )
    )


def lemma_residual_batch(g: Graph, configs) -> np.ndarray:
    """Vectorized lemma_check over a stack of configurations."""
    if not check_triangle_free(g):
        raise DomainError("the four-corner balance requires a triangle-free graph")
    s = g.s
    S = _as_bits_matrix(g, configs)
    K = S[:, g.neighbors].sum(axis=2)
    occ = S == 1
    emp = ~occ
    return _lemma_residual_from_counts(
        s,
        g.n,
        (occ & (K == s)).sum(axis=1),
        (emp & (K == s - 1)).sum(axis=1),
        (occ & (K == 1)).sum(axis=1),
        (emp & (K == 0)).sum(axis=1),
        (emp & (K == s)).sum(axis=1),
        (occ & (K == 0)).sum(axis=1),
        S.sum(axis=1),
    )


def enumerate_configurations(n: int) -> np.ndarray:
    """All 2^n configurations as a (2^n, n) uint8 matrix.

    Row index doubles as the state index of the exact solver: vertex i is
    bit i, so row r has bits (r >> i) & 1.
    """
    if n > MAX_ENUM_VERTICES:
        raise ResourceLimitError(f"refusing to enumerate 2^{n} configurations (max n={MAX_ENUM_VERTICES})")
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    r = np.arange(1 << n, dtype=np.uint32)
    return ((r[:, None] >> np.arange(n)) & 1).astype(np.uint8)


def random_configurations(n: int, m: int, rng) -> np.ndarray:
    """m configurations drawn uniformly, as a (m, n) uint8 matrix."""
    if m < 1:
        raise DomainError(f"need m >= 1, got {m}")
    return rng.integers(0, 2, size=(m, n), dtype=np.uint8)
