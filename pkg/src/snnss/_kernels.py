"""Event-loop kernel for the continuous-time simulation.

One source function, two compilations: the numba path wraps it in
njit(cache=True, nogil=True), the numpy path runs it as plain Python.
Both consume the same Generator draw sequence and the same IEEE operation
order, so trajectories are bit-identical across backends.

Backend selection: SNNSS_BACKEND = numba | numpy | auto (default auto,
numba when importable). The kernel releases the GIL under numba, which is
what makes thread-parallel replicas effective.

Sites are bucketed by (spin, occupied-neighbor count) into 2(s+1) rate
categories, so one event costs O(s): category scan, O(1) swap-remove
membership updates for the flipped site and its s neighbors.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import SnnssError

__all__ = ["gillespie_core", "resolve_backend", "core_for", "NUMBA_AVAILABLE"]


def _gillespie_core(nbrs, spins, lam, mu, t_max, grid, cov_grid, ev_times, ev_sites, record, rg):
    """Run one trajectory until t_max.

    spins is modified in place. Grid points receive the coverage held just
    before the first event past them (right-continuous sampling). Returns
    (n_events, status, t_end, coverage) with status 0 = reached t_max,
    1 = absorbed (total rate zero), 2 = event buffer full (record only).
    """
    n, s = nbrs.shape
    width = s + 1
    ncat = 2 * width

    kcnt = np.zeros(n, dtype=np.int32)
    for x in range(n):
        acc = 0
        for j in range(s):
            acc += spins[nbrs[x, j]]
        kcnt[x] = acc
    cat_rate = np.empty(ncat, dtype=np.float64)
    for k in range(width):
        cat_rate[k] = lam[k]
        cat_rate[width + k] = mu[k]
    cat_sites = np.empty((ncat, n), dtype=np.int32)
    cat_size = np.zeros(ncat, dtype=np.int32)
    pos_in = np.empty(n, dtype=np.int32)
    cat_of = np.empty(n, dtype=np.int32)
    coverage = 0
    for x in range(n):
        c = int(spins[x]) * width + kcnt[x]
        cat_of[x] = c
        pos_in[x] = cat_size[c]
        cat_sites[c, cat_size[c]] = x
        cat_size[c] += 1
        coverage += int(spins[x])

    t = 0.0
    comp = 0.0  # Kahan compensation for the event-time sum
    gi = 0
    ng = grid.shape[0]
    n_ev = 0
    cap = ev_times.shape[0]
    status = 0
    t_end = t_max

    while True:
        total = 0.0
        for c in range(ncat):
            total += cat_rate[c] * cat_size[c]
        if total <= 0.0:
            status = 1
            t_end = t
            break
        u = rg.random()
        while u == 0.0:
            u = rg.random()
        dt = -np.log(1.0 - u) / total
        y = dt - comp
        t_next = t + y
        if t_next <= t:
            # dt below one ulp of t; keep event times strictly increasing
            t_next = np.nextafter(t, np.inf)
            comp = 0.0
        else:
            comp = (t_next - t) - y
        t = t_next
        if t > t_max:
            status = 0
            t_end = t_max
            break
        while gi < ng and grid[gi] < t:
            cov_grid[gi] = coverage
            gi += 1

        target = rg.random() * total
        acc2 = 0.0
        chosen = 0
        for c in range(ncat):
            w = cat_rate[c] * cat_size[c]
            if w > 0.0:
                acc2 += w
                chosen = c
                if target < acc2:
                    break
        csz = cat_size[chosen]
        j = int(rg.random() * csz)
        if j >= csz:
            j = csz - 1
        x = cat_sites[chosen, j]

        if record:
            if n_ev >= cap:
                status = 2
                t_end = t
                break
            ev_times[n_ev] = t
            ev_sites[n_ev] = x
            n_ev += 1

        sig = int(spins[x])
        oc = cat_of[x]
        nc = (1 - sig) * width + kcnt[x]
        p = pos_in[x]
        lastp = cat_size[oc] - 1
        ls = cat_sites[oc, lastp]
        cat_sites[oc, p] = ls
        pos_in[ls] = p
        cat_size[oc] = lastp
        cat_sites[nc, cat_size[nc]] = x
        pos_in[x] = cat_size[nc]
        cat_size[nc] += 1
        cat_of[x] = nc
        spins[x] = 1 - sig
        if sig == 0:
            coverage += 1
            delta = 1
        else:
            coverage -= 1
            delta = -1
        for jn in range(s):
            yv = nbrs[x, jn]
            ocy = cat_of[yv]
            ncy = ocy + delta  # spin unchanged, neighbor count shifts
            kcnt[yv] += delta
            py = pos_in[yv]
            lp = cat_size[ocy] - 1
            lsy = cat_sites[ocy, lp]
            cat_sites[ocy, py] = lsy
            pos_in[lsy] = py
            cat_size[ocy] = lp
            cat_sites[ncy, cat_size[ncy]] = yv
            pos_in[yv] = cat_size[ncy]
            cat_size[ncy] += 1
            cat_of[yv] = ncy

    while gi < ng:
        cov_grid[gi] = coverage
        gi += 1
    return n_ev, status, t_end, coverage


gillespie_core = _gillespie_core

try:
    from numba import njit

    _gillespie_core_nb = njit(cache=True, nogil=True)(_gillespie_core)
    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    _gillespie_core_nb = None
    NUMBA_AVAILABLE = False


def resolve_backend(name: str | None = None) -> str:
    """'numba' or 'numpy' from the argument, SNNSS_BACKEND, or autodetect."""
    choice = name or os.environ.get("SNNSS_BACKEND", "auto")
    if choice == "auto":
        return "numba" if NUMBA_AVAILABLE else "numpy"
    if choice == "numba":
        if not NUMBA_AVAILABLE:
            raise SnnssError("SNNSS_BACKEND=numba but numba is not importable")
        return "numba"
    if choice == "numpy":
        return "numpy"
    raise SnnssError(f"unknown backend {choice!r}; use numba, numpy or auto")


def core_for(backend: str):
    return _gillespie_core_nb if backend == "numba" else _gillespie_core
