"""Stochastic simulation of the spin system and ensemble coverage estimates.

Reproducibility contract: replica i of seed ``seed`` always uses the
Philox stream ``SeedSequence(entropy=seed, spawn_key=(i,))``, regardless of
backend, thread count, or whether it runs alone or inside an ensemble.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ._kernels import core_for, resolve_backend
from .config_stats import Configuration
from .errors import DomainError
from .graph import Graph
from .rates import RateTable

__all__ = ["Trajectory", "EnsembleEstimate", "simulate", "ensemble_mcf", "replica_generator"]

# first event-buffer size: mean event count at the uniformization rate,
# padded; simulate() doubles and reruns on overflow
_BUFFER_SLACK = 1.5
_BUFFER_FLOOR = 1024


def replica_generator(seed: int, replica: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(replica,))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class Trajectory:
    """One realized path: flip times (strictly increasing) and flipped sites."""

    times: np.ndarray
    sites: np.ndarray
    initial: Configuration
    t_max: float
    t_end: float
    absorbed: bool

    @property
    def n_events(self) -> int:
        return int(self.times.shape[0])

    def replay(self) -> Iterator[tuple[float, int, int]]:
        """Yield (time, site, new_spin) in event order."""
        bits = self.initial.bits.copy()
        for i in range(self.n_events):
            x = int(self.sites[i])
            bits[x] ^= 1
            yield float(self.times[i]), x, int(bits[x])

    def final_configuration(self) -> Configuration:
        bits = self.initial.bits.copy()
        for x in self.sites:
            bits[x] ^= 1
        return Configuration(bits)

    def coverage_at(self, t_grid: np.ndarray) -> np.ndarray:
        """Coverage sampled right-continuously at each grid time."""
        t_grid = np.asarray(t_grid, dtype=np.float64)
        bits = self.initial.bits.copy()
        cov = int(self.initial.coverage)
        out = np.empty(t_grid.shape[0], dtype=np.float64)
        ev = 0
        order = np.argsort(t_grid, kind="stable")
        for gi in order:
            while ev < self.n_events and self.times[ev] <= t_grid[gi]:
                x = int(self.sites[ev])
                cov += 1 - 2 * int(bits[x])
                bits[x] ^= 1
                ev += 1
            out[gi] = cov
        return out


@dataclass(frozen=True)
class EnsembleEstimate:
    """Monte Carlo mean coverage on a time grid, with standard errors."""

    t_grid: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n_replicas: int
    n_absorbed: int


def _initial_bits(g: Graph, init: Configuration | float, rg: np.random.Generator) -> np.ndarray:
    if isinstance(init, Configuration):
        if init.n != g.n:
            raise DomainError(f"configuration has {init.n} sites, graph has {g.n}")
        return init.bits.copy()
    p = float(init)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"Bernoulli density must lie in [0, 1], got {p}")
    # one uniform per site, drawn before any event variates
    return (rg.random(g.n) < p).astype(np.uint8)


def _check_tables(g: Graph, r: RateTable) -> tuple[np.ndarray, np.ndarray]:
    if r.s != g.s:
        raise DomainError(f"rate table is for degree {r.s}, graph has degree {g.s}")
    return np.asarray(r.lam, dtype=np.float64), np.asarray(r.mu, dtype=np.float64)


def simulate(
    g: Graph,
    r: RateTable,
    init: Configuration | float,
    t_max: float,
    seed: int,
    replica: int = 0,
    backend: str | None = None,
) -> Trajectory:
    """Run one full-event-record trajectory on its replica stream."""
    if not t_max > 0.0 or not np.isfinite(t_max):
        raise DomainError(f"t_max must be positive and finite, got {t_max}")
    lam, mu = _check_tables(g, r)
    core = core_for(resolve_backend(backend))
    grid = np.empty(0, dtype=np.float64)
    cov_grid = np.empty(0, dtype=np.float64)
    cap = max(_BUFFER_FLOOR, int(_BUFFER_SLACK * g.n * r.max_rate * t_max))
    while True:
        rg = replica_generator(seed, replica)
        spins = _initial_bits(g, init, rg)
        initial = Configuration(spins.copy())
        ev_times = np.empty(cap, dtype=np.float64)
        ev_sites = np.empty(cap, dtype=np.int32)
        n_ev, status, t_end, _cov = core(
            g.neighbors, spins, lam, mu, float(t_max), grid, cov_grid, ev_times, ev_sites, True, rg
        )
        if status != 2:
            return Trajectory(
                times=ev_times[:n_ev].copy(),
                sites=ev_sites[:n_ev].copy(),
                initial=initial,
                t_max=float(t_max),
                t_end=float(t_end),
                absorbed=status == 1,
            )
        cap *= 2


def _resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("SNNSS_THREADS", "1"))
    if threads < 1:
        raise DomainError(f"thread count must be >= 1, got {threads}")
    return threads


def ensemble_mcf(
    g: Graph,
    r: RateTable,
    init: Configuration | float,
    t_grid: np.ndarray,
    n_replicas: int,
    seed: int,
    threads: int | None = None,
    backend: str | None = None,
) -> EnsembleEstimate:
    """Estimate the mean coverage function over independent replicas.

    init is either a fixed Configuration or a Bernoulli density p, sampled
    per replica. Results are independent of thread count: replica streams
    are keyed by index and rows are reduced in index order.
    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.ndim != 1 or t_grid.shape[0] == 0:
        raise DomainError("t_grid must be a non-empty 1-d array")
    if np.any(~np.isfinite(t_grid)) or np.any(t_grid < 0.0):
        raise DomainError("t_grid times must be finite and >= 0")
    if np.any(np.diff(t_grid) < 0.0):
        raise DomainError("t_grid must be non-decreasing")
    if n_replicas < 1:
        raise DomainError(f"n_replicas must be >= 1, got {n_replicas}")
    lam, mu = _check_tables(g, r)
    core = core_for(resolve_backend(backend))
    threads = _resolve_threads(threads)
    t_max = float(t_grid[-1]) if t_grid[-1] > 0.0 else np.nextafter(0.0, 1.0)

    ev_t = np.empty(1, dtype=np.float64)
    ev_s = np.empty(1, dtype=np.int32)
    rows = np.empty((n_replicas, t_grid.shape[0]), dtype=np.float64)
    absorbed = np.zeros(n_replicas, dtype=bool)

    def run(i: int) -> None:
        rg = replica_generator(seed, i)
        spins = _initial_bits(g, init, rg)
        cov_grid = np.empty(t_grid.shape[0], dtype=np.float64)
        _n, status, _t, _c = core(
            g.neighbors, spins, lam, mu, t_max, t_grid, cov_grid, ev_t, ev_s, False, rg
        )
        rows[i] = cov_grid
        absorbed[i] = status == 1

    if threads == 1:
        for i in range(n_replicas):
            run(i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(n_replicas)))

    mean = rows.mean(axis=0)
    if n_replicas > 1:
        stderr = rows.std(axis=0, ddof=1) / np.sqrt(n_replicas)
    else:
        stderr = np.zeros_like(mean)
    return EnsembleEstimate(
        t_grid=t_grid.copy(),
        mean=mean,
        stderr=stderr,
        n_replicas=n_replicas,
        n_absorbed=int(absorbed.sum()),
    )
