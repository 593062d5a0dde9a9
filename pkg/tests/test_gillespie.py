"""Stochastic simulation: determinism, backend equivalence, and agreement
with the exact and closed-form answers."""

import numpy as np
import pytest

from snnss import (
    Configuration,
    DomainError,
    RateTable,
    SnnssError,
    all_empty,
    all_occupied,
    build_cycle,
    ensemble_mcf,
    make_noisy_voter,
    make_threshold_voter,
    replica_generator,
    simulate,
    with_occupied,
)
from snnss._kernels import NUMBA_AVAILABLE, core_for, resolve_backend

needs_numba = pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba not importable")

GRID = np.array([0.0, 0.25, 0.5, 1.0, 2.0])


class TestDeterminism:
    def test_same_seed_same_trajectory(self, cycle8, nv_rates):
        a = simulate(cycle8, nv_rates, 0.5, t_max=3.0, seed=11)
        b = simulate(cycle8, nv_rates, 0.5, t_max=3.0, seed=11)
        assert np.array_equal(a.times, b.times)
        assert np.array_equal(a.sites, b.sites)
        assert a.initial == b.initial

    def test_replicas_differ(self, cycle8, nv_rates):
        a = simulate(cycle8, nv_rates, 0.5, t_max=3.0, seed=11, replica=0)
        b = simulate(cycle8, nv_rates, 0.5, t_max=3.0, seed=11, replica=1)
        assert not (
            a.n_events == b.n_events and np.array_equal(a.times, b.times)
        )

    def test_replica_generator_streams(self):
        a = replica_generator(5, 0).random(4)
        b = replica_generator(5, 0).random(4)
        c = replica_generator(5, 1).random(4)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_thread_count_invariance(self, cycle8, c3_rates):
        one = ensemble_mcf(cycle8, c3_rates, 0.5, GRID, n_replicas=40, seed=3, threads=1)
        four = ensemble_mcf(cycle8, c3_rates, 0.5, GRID, n_replicas=40, seed=3, threads=4)
        assert np.array_equal(one.mean, four.mean)
        assert np.array_equal(one.stderr, four.stderr)

    @needs_numba
    def test_backends_bit_identical(self, cycle8, c3_rates):
        a = simulate(cycle8, c3_rates, 0.5, t_max=4.0, seed=7, backend="numpy")
        b = simulate(cycle8, c3_rates, 0.5, t_max=4.0, seed=7, backend="numba")
        assert np.array_equal(a.times, b.times)
        assert np.array_equal(a.sites, b.sites)
        ea = ensemble_mcf(cycle8, c3_rates, 0.3, GRID, n_replicas=30, seed=9, backend="numpy")
        eb = ensemble_mcf(cycle8, c3_rates, 0.3, GRID, n_replicas=30, seed=9, backend="numba")
        assert np.array_equal(ea.mean, eb.mean)

    def test_backend_resolution(self, monkeypatch):
        assert resolve_backend("numpy") == "numpy"
        with pytest.raises(SnnssError):
            resolve_backend("fortran")
        monkeypatch.setenv("SNNSS_BACKEND", "numpy")
        assert resolve_backend(None) == "numpy"
        monkeypatch.setenv("SNNSS_BACKEND", "nonsense")
        with pytest.raises(SnnssError):
            resolve_backend(None)


class TestTrajectory:
    def test_times_strictly_increasing(self, cycle8, nv_rates):
        tr = simulate(cycle8, nv_rates, 0.5, t_max=5.0, seed=2)
        assert tr.n_events > 0
        assert np.all(np.diff(tr.times) > 0)
        assert tr.times[0] > 0
        assert tr.t_end >= tr.times[-1]

    def test_replay_matches_final_configuration(self, cycle8, c4_rates):
        tr = simulate(cycle8, c4_rates, 0.5, t_max=2.0, seed=13)
        bits = tr.initial.bits.copy()
        for t, x, new_spin in tr.replay():
            bits[x] ^= 1
            assert bits[x] == new_spin
        assert Configuration(bits) == tr.final_configuration()

    def test_coverage_at_right_continuous(self, cycle8, nv_rates):
        tr = simulate(cycle8, nv_rates, 0.5, t_max=2.0, seed=4)
        assert tr.n_events >= 2
        t0 = float(tr.times[0])
        before = tr.coverage_at(np.array([t0 * 0.5]))[0]
        at = tr.coverage_at(np.array([t0]))[0]
        assert before == tr.initial.coverage
        assert abs(at - before) == 1

    def test_coverage_at_accepts_unsorted_grid(self, cycle8, nv_rates):
        tr = simulate(cycle8, nv_rates, 0.5, t_max=2.0, seed=4)
        grid = np.array([1.5, 0.0, 0.7])
        vals = tr.coverage_at(grid)
        ref = [tr.coverage_at(np.array([t]))[0] for t in grid]
        assert vals.tolist() == ref

    def test_frozen_table_absorbs_immediately(self, cycle8):
        r = RateTable(2, (0.0,) * 3, (0.0,) * 3)
        tr = simulate(cycle8, r, with_occupied(8, [0, 3]), t_max=2.0, seed=1)
        assert tr.n_events == 0
        assert tr.absorbed
        assert tr.final_configuration() == with_occupied(8, [0, 3])

    def test_voter_consensus_absorbs(self):
        # pure voter on a small cycle reaches consensus quickly
        g = build_cycle(4)
        r = make_noisy_voter(2, 1.0, 0.0, 0.0)
        tr = simulate(g, r, 0.5, t_max=500.0, seed=21)
        assert tr.absorbed
        final = tr.final_configuration()
        assert final in (all_empty(4), all_occupied(4))

    def test_point_init_used_exactly(self, cycle8, c3_rates):
        c = with_occupied(8, [1, 2, 6])
        tr = simulate(cycle8, c3_rates, c, t_max=1.0, seed=5)
        assert tr.initial == c

    def test_init_validation(self, cycle8, c3_rates):
        with pytest.raises(DomainError):
            simulate(cycle8, c3_rates, 1.5, t_max=1.0, seed=0)
        with pytest.raises(DomainError):
            simulate(cycle8, c3_rates, all_empty(9), t_max=1.0, seed=0)
        with pytest.raises(DomainError):
            simulate(cycle8, c3_rates, 0.5, t_max=0.0, seed=0)


class TestKernel:
    def test_buffer_overflow_reported(self, cycle8, nv_rates):
        # a 4-slot event record cannot hold a busy trajectory; the core
        # reports rather than truncates silently
        core = core_for("numpy")
        rg = replica_generator(0, 0)
        spins = (rg.random(8) < 0.5).astype(np.uint8)
        lam = np.asarray(nv_rates.lam)
        mu = np.asarray(nv_rates.mu)
        empty = np.empty(0, dtype=np.float64)
        ev_t = np.empty(4, dtype=np.float64)
        ev_s = np.empty(4, dtype=np.int32)
        n_ev, status, t_end, _ = core(
            cycle8.neighbors, spins, lam, mu, 50.0, empty, empty.copy(), ev_t, ev_s, True, rg
        )
        assert status == 2
        assert n_ev == 4
        assert t_end < 50.0

    def test_simulate_retries_past_overflow(self, cycle8, nv_rates, monkeypatch):
        import snnss.gillespie as gil

        # reference under the stock buffer policy, then force retries by
        # starting from a 2-slot buffer; the rerun must not perturb the path
        ref = simulate(cycle8, nv_rates, 0.5, t_max=3.0, seed=8)
        monkeypatch.setattr(gil, "_BUFFER_FLOOR", 2)
        monkeypatch.setattr(gil, "_BUFFER_SLACK", 0.001)
        tr = simulate(cycle8, nv_rates, 0.5, t_max=3.0, seed=8)
        assert tr.n_events > 2
        assert np.array_equal(tr.times, ref.times)
        assert np.array_equal(tr.sites, ref.sites)


class TestEnsemble:
    def test_mean_at_zero_matches_density(self, cycle8, c3_rates):
        est = ensemble_mcf(cycle8, c3_rates, 0.5, np.array([0.0]), n_replicas=400, seed=6)
        assert est.n_replicas == 400
        assert est.stderr[0] > 0
        assert abs(est.mean[0] - 4.0) < 4.0 * est.stderr[0] + 1e-12

    def test_replica_zero_matches_simulate(self, cycle8, c3_rates):
        est = ensemble_mcf(cycle8, c3_rates, 0.5, GRID, n_replicas=1, seed=17)
        tr = simulate(cycle8, c3_rates, 0.5, t_max=float(GRID[-1]), seed=17, replica=0)
        assert np.array_equal(est.mean, tr.coverage_at(GRID))
        assert np.all(est.stderr == 0.0)

    def test_event_count_constant_total_rate(self, cycle8):
        # lambda = mu = 1 everywhere keeps the total rate pinned at n, so
        # the event count over [0, 1] is Poisson(n) per replica
        r = RateTable(2, (1.0,) * 3, (1.0,) * 3)
        total = 0
        reps = 300
        for i in range(reps):
            total += simulate(cycle8, r, 0.5, t_max=1.0, seed=42, replica=i).n_events
        mean = 8.0 * reps
        assert abs(total - mean) < 4.0 * np.sqrt(mean)

    def test_stderr_scales_with_replicas(self, cycle8, nv_rates):
        small = ensemble_mcf(cycle8, nv_rates, 0.5, np.array([1.0]), n_replicas=400, seed=23)
        large = ensemble_mcf(cycle8, nv_rates, 0.5, np.array([1.0]), n_replicas=1600, seed=23)
        ratio = large.stderr[0] / small.stderr[0]
        assert 0.4 < ratio < 0.65

    def test_absorbed_counted(self):
        g = build_cycle(4)
        r = make_noisy_voter(2, 1.0, 0.0, 0.0)
        est = ensemble_mcf(g, r, 0.5, np.array([0.0, 100.0]), n_replicas=30, seed=31)
        assert est.n_absorbed == 30

    def test_grid_validation(self, cycle8, c3_rates):
        with pytest.raises(DomainError):
            ensemble_mcf(cycle8, c3_rates, 0.5, np.array([]), n_replicas=2, seed=0)
        with pytest.raises(DomainError):
            ensemble_mcf(cycle8, c3_rates, 0.5, np.array([1.0, 0.5]), n_replicas=2, seed=0)
        with pytest.raises(DomainError):
            ensemble_mcf(cycle8, c3_rates, 0.5, np.array([-1.0]), n_replicas=2, seed=0)
        with pytest.raises(DomainError):
            ensemble_mcf(cycle8, c3_rates, 0.5, GRID, n_replicas=0, seed=0)

    def test_size_invariance_against_larger_cycle(self, c3_rates):
        # the closed-form density is size-free; two simulated sizes must
        # agree within combined monte carlo error
        grid = np.array([0.5, 1.5])
        a = ensemble_mcf(build_cycle(32), c3_rates, 0.5, grid, n_replicas=600, seed=12)
        b = ensemble_mcf(build_cycle(64), c3_rates, 0.5, grid, n_replicas=600, seed=13)
        dens_a, dens_b = a.mean / 32.0, b.mean / 64.0
        err = np.sqrt((a.stderr / 32.0) ** 2 + (b.stderr / 64.0) ** 2)
        assert np.all(np.abs(dens_a - dens_b) < 4.0 * err)


class TestAgainstExact:
    def test_mc_matches_uniformization(self, cycle8, nv_rates):
        from snnss import (
            bernoulli_distribution,
            build_full_generator,
            transient_mean_coverage,
        )

        grid = np.array([0.2, 0.5, 1.0])
        fg = build_full_generator(cycle8, nv_rates)
        exact = transient_mean_coverage(fg, bernoulli_distribution(8, 0.5), grid)
        est = ensemble_mcf(cycle8, nv_rates, 0.5, grid, n_replicas=2000, seed=77)
        z = np.abs(est.mean - exact.values) / est.stderr
        assert z.max() < 4.0
