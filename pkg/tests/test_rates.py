"""Rate tables, the family constructors, and membership classification."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snnss import (
    DomainError,
    RateTable,
    classify,
    flip_rate,
    make_generalized_threshold,
    make_noisy_voter,
    make_threshold_voter,
)

positive = st.floats(min_value=0.01, max_value=50.0, allow_nan=False)
nonneg = st.floats(min_value=0.0, max_value=50.0, allow_nan=False)


class TestConstruction:
    def test_explicit_table(self):
        r = RateTable(2, (1.0, 2.0, 4.0), (1.0, 1.0, 1.0))
        assert r.s == 2
        assert r.lam == (1.0, 2.0, 4.0)
        assert r.mu == (1.0, 1.0, 1.0)
        assert r.max_rate == 4.0

    def test_length_must_match_degree(self):
        with pytest.raises(DomainError):
            RateTable(2, (1.0, 2.0), (1.0, 1.0, 1.0))

    def test_negative_rate_rejected(self):
        with pytest.raises(DomainError):
            RateTable(2, (-0.1, 0.0, 0.0), (0.0, 0.0, 0.0))

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            RateTable(1, (float("nan"), 0.0), (0.0, 0.0))
        with pytest.raises(DomainError):
            RateTable(1, (float("inf"), 0.0), (0.0, 0.0))

    def test_flip_rate(self):
        r = RateTable(2, (1.0, 2.0, 4.0), (5.0, 6.0, 7.0))
        assert flip_rate(r, 0, 1) == 2.0
        assert flip_rate(r, 1, 2) == 7.0
        with pytest.raises(DomainError):
            flip_rate(r, 0, 3)
        with pytest.raises(DomainError):
            flip_rate(r, 2, 0)

    def test_json_round_trip(self):
        r = make_generalized_threshold(3, 3, 1.0, 0.25, 0.75)
        again = RateTable.from_json(r.to_json())
        assert again == r
        payload = json.loads(r.to_json())
        assert set(payload) == {"s", "lambda", "mu"}


class TestFamilyConstructors:
    def test_noisy_voter_tables(self):
        r = make_noisy_voter(2, 1.0, 0.0, 0.0)
        assert r.lam == (0.0, 1.0, 2.0)
        assert r.mu == (2.0, 1.0, 0.0)
        r = make_noisy_voter(2, 1.0, 1.0, 1.0)
        assert r.lam == (1.0, 2.0, 3.0)
        assert r.mu == (3.0, 2.0, 1.0)

    def test_noisy_voter_pure_noise(self):
        r = make_noisy_voter(3, 0.0, 2.0, 5.0)
        assert r.lam == (2.0,) * 4
        assert r.mu == (5.0,) * 4

    def test_noisy_voter_rejects_negative(self):
        with pytest.raises(DomainError):
            make_noisy_voter(2, -1.0, 0.0, 0.0)
        with pytest.raises(DomainError):
            make_noisy_voter(2, 1.0, -0.5, 0.0)

    def test_threshold_tables(self):
        r = make_threshold_voter(2, 2, 1.0, 1.0)
        assert r.lam == (1.0, 1.0, 2.0)
        assert r.mu == (2.0, 1.0, 1.0)
        r = make_threshold_voter(3, 3, 1.0, 0.5)
        assert r.lam == (1.0, 1.0, 1.0, 1.5)
        assert r.mu == (1.5, 1.0, 1.0, 1.0)
        r = make_threshold_voter(2, 2, 0.0, 1.0)
        assert r.lam == (0.0, 0.0, 1.0)
        assert r.mu == (1.0, 0.0, 0.0)

    def test_threshold_lower_cut(self):
        # q < s bumps every k >= q up and every k <= s - q down
        r = make_threshold_voter(3, 2, 1.0, 0.5)
        assert r.lam == (1.0, 1.0, 1.5, 1.5)
        assert r.mu == (1.5, 1.5, 1.0, 1.0)

    def test_threshold_validation(self):
        with pytest.raises(DomainError):
            make_threshold_voter(2, 0, 1.0, 1.0)
        with pytest.raises(DomainError):
            make_threshold_voter(2, 3, 1.0, 1.0)
        with pytest.raises(DomainError):
            make_threshold_voter(2, 2, 1.0, -1.5)

    def test_generalized_tables(self):
        r = make_generalized_threshold(2, 2, 1.0, 3.0, 1.5)
        assert r.lam == (1.0, 1.0, 4.0)
        assert r.mu == (2.5, 1.0, 1.0)
        r = make_generalized_threshold(2, 2, 0.0, 2.0, 0.0)
        assert r.lam == (0.0, 0.0, 2.0)
        assert r.mu == (0.0, 0.0, 0.0)

    def test_generalized_reduces_to_threshold(self):
        assert make_generalized_threshold(3, 3, 1.0, 0.5, 0.5) == make_threshold_voter(
            3, 3, 1.0, 0.5
        )


class TestClassification:
    def test_noisy_voter_round_trip(self):
        mc = classify(make_noisy_voter(2, 1.0, 0.5, 0.7))
        assert "C1" in mc
        assert mc.primary == "C1"
        p = mc.params["C1"]
        assert p["d"] == pytest.approx(1.0, abs=1e-12)
        assert p["h1"] == pytest.approx(0.5, abs=1e-12)
        assert p["h2"] == pytest.approx(0.7, abs=1e-12)

    def test_threshold_round_trip(self):
        mc = classify(make_threshold_voter(2, 2, 1.0, 1.0))
        assert mc.primary == "C3"
        p = mc.params["C3"]
        assert p["h"] == pytest.approx(1.0, abs=1e-12)
        assert p["a"] == pytest.approx(1.0, abs=1e-12)

    def test_threshold_s3(self):
        mc = classify(make_threshold_voter(3, 3, 1.0, 0.5))
        assert "C3" in mc
        assert mc.params["C3"]["a"] == pytest.approx(0.5, abs=1e-12)

    def test_generalized_round_trip(self, c4_rates):
        mc = classify(c4_rates)
        assert mc.primary == "C4"
        p = mc.params["C4"]
        assert (p["h"], p["a"], p["b"]) == (
            pytest.approx(1.0, abs=1e-12),
            pytest.approx(3.0, abs=1e-12),
            pytest.approx(1.5, abs=1e-12),
        )

    def test_c2_zero_noise(self):
        mc = classify(make_threshold_voter(2, 2, 0.0, 1.0))
        assert "C2" in mc

    def test_scale_invariance(self, nv_rates):
        scaled = RateTable(2, tuple(7.0 * v for v in nv_rates.lam), tuple(7.0 * v for v in nv_rates.mu))
        assert classify(scaled).labels == classify(nv_rates).labels

    def test_overlap_c3_c4(self):
        # a = b = 2h satisfies both the equal-increment and the
        # h(a + b) = ab constraints
        mc = classify(make_generalized_threshold(2, 2, 1.0, 2.0, 2.0))
        assert "C3" in mc and "C4" in mc
        assert mc.primary == "C3"

    def test_overlap_c2_c3(self):
        mc = classify(make_threshold_voter(2, 2, 0.0, 2.0))
        assert "C2" in mc and "C3" in mc

    def test_unclassifiable_table(self):
        mc = classify(RateTable(2, (1.0, 2.0, 4.0), (1.0, 1.0, 1.0)))
        assert mc.labels == frozenset()
        assert mc.primary is None

    def test_pure_noise_is_c1(self):
        mc = classify(RateTable(2, (2.0, 2.0, 2.0), (3.0, 3.0, 3.0)))
        assert "C1" in mc

    @given(d=nonneg, h1=nonneg, h2=nonneg)
    @settings(max_examples=40, deadline=None)
    def test_constructed_c1_always_classified(self, d, h1, h2):
        mc = classify(make_noisy_voter(3, d, h1, h2), tol=1e-9)
        assert "C1" in mc

    @given(h=positive, a=st.floats(min_value=-0.009, max_value=20.0, allow_nan=False))
    @settings(max_examples=40, deadline=None)
    def test_constructed_c3_always_classified(self, h, a):
        mc = classify(make_threshold_voter(2, 2, h, a), tol=1e-9)
        assert "C3" in mc
