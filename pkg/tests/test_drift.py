import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from driftstream.core import DataPoint, InputError
from driftstream.drift import (
    DistanceHistogram,
    detect_drift,
    histogram,
    kl_divergence,
    smooth_zero_bins,
    smoothing_points,
)
from driftstream.windows import DataWindow


def make_window(vectors, wid="w"):
    pts = [DataPoint(id=f"{wid}{i}", ts=i, text="", vec=np.asarray(v, dtype=float))
           for i, v in enumerate(vectors)]
    return DataWindow(pts, capacity=len(pts), window_id=wid)


def cluster(rng, center, n, noise=0.05):
    return center + noise * rng.standard_normal((n, len(center)))


class TestHistogram:
    def test_all_zero_distances(self):
        h = histogram([0.0, 0.0, 0.0], bins=4)
        np.testing.assert_allclose(h.bins, [1.0, 0.0, 0.0, 0.0])

    def test_symmetric_split(self):
        h = histogram([0.1, 0.9], bins=2)
        np.testing.assert_allclose(h.bins, [0.5, 0.5])

    def test_edge_rule_one_in_last_bin(self):
        h = histogram([0.0, 0.25, 0.5, 1.0], bins=4)
        np.testing.assert_allclose(h.bins, [0.25, 0.25, 0.25, 0.25])

    def test_out_of_range_rejected(self):
        with pytest.raises(InputError):
            histogram([0.5, 1.2], bins=4)
        with pytest.raises(InputError):
            histogram([-0.1], bins=4)

    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=100), st.randoms())
    @settings(max_examples=100, deadline=None)
    def test_permutation_invariance(self, distances, rnd):
        shuffled = list(distances)
        rnd.shuffle(shuffled)
        np.testing.assert_allclose(
            histogram(distances, 16).bins, histogram(shuffled, 16).bins, atol=1e-12
        )

    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=200))
    @settings(max_examples=100, deadline=None)
    def test_probabilities_sum_to_one(self, distances):
        h = histogram(distances, 8)
        assert float(h.bins.sum()) == pytest.approx(1.0, abs=1e-9)


class TestSmoothZeroBins:
    def test_no_zeros_unchanged(self):
        pa = histogram([0.1, 0.4, 0.6, 0.9], bins=2)
        pb = histogram([0.2, 0.8], bins=2)
        sa, sb = smooth_zero_bins(pa, pb)
        np.testing.assert_allclose(sa.bins, pa.bins)
        np.testing.assert_allclose(sb.bins, pb.bins)

    def test_worked_substitution(self):
        pa = DistanceHistogram(bins=np.array([0.5, 0.5, 0.0, 0.0]), count=4)
        pb = DistanceHistogram(bins=np.array([0.25, 0.25, 0.25, 0.25]), count=4)
        sa, sb = smooth_zero_bins(pa, pb)
        np.testing.assert_allclose(sa.bins, [1 / 3, 1 / 3, 1 / 6, 1 / 6])
        np.testing.assert_allclose(sb.bins, [0.25, 0.25, 0.25, 0.25])

    def test_identical_inputs_stay_identical(self):
        pa = DistanceHistogram(bins=np.array([0.7, 0.0, 0.3, 0.0]), count=10)
        sa, sb = smooth_zero_bins(pa, pa)
        np.testing.assert_allclose(sa.bins, sb.bins)

    def test_outputs_sum_to_one(self):
        pa = DistanceHistogram(bins=np.array([1.0, 0.0, 0.0]), count=5)
        pb = DistanceHistogram(bins=np.array([0.0, 0.5, 0.5]), count=5)
        sa, sb = smooth_zero_bins(pa, pb)
        assert float(sa.bins.sum()) == pytest.approx(1.0, abs=1e-9)
        assert float(sb.bins.sum()) == pytest.approx(1.0, abs=1e-9)


class TestKLDivergence:
    def test_identical_is_zero(self):
        h = histogram([0.1, 0.5, 0.9, 0.3], bins=8)
        assert kl_divergence(h, h) == pytest.approx(0.0, abs=1e-12)

    def test_worked_pair(self):
        pa = DistanceHistogram(bins=np.array([0.5, 0.5]), count=2)
        pb = DistanceHistogram(bins=np.array([0.9, 0.1]), count=2)
        expected = 0.5 * math.log(0.5 / 0.9) + 0.5 * math.log(0.5 / 0.1)
        assert expected == pytest.approx(0.51083, abs=1e-5)
        assert kl_divergence(pa, pb) == pytest.approx(expected, abs=1e-12)

    def test_asymmetry(self):
        pa = DistanceHistogram(bins=np.array([0.5, 0.5]), count=2)
        pb = DistanceHistogram(bins=np.array([0.9, 0.1]), count=2)
        expected = 0.9 * math.log(0.9 / 0.5) + 0.1 * math.log(0.1 / 0.5)
        assert expected == pytest.approx(0.36807, abs=1e-5)
        assert kl_divergence(pb, pa) == pytest.approx(expected, abs=1e-12)

    def test_one_sided_zero_is_contract_violation(self):
        pa = DistanceHistogram(bins=np.array([1.0, 0.0]), count=2)
        pb = DistanceHistogram(bins=np.array([0.5, 0.5]), count=2)
        with pytest.raises(InputError):
            kl_divergence(pa, pb)

    def test_shared_zero_bins_allowed(self):
        pa = DistanceHistogram(bins=np.array([0.6, 0.4, 0.0]), count=5)
        pb = DistanceHistogram(bins=np.array([0.2, 0.8, 0.0]), count=5)
        assert kl_divergence(pa, pb) > 0.0

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=200, deadline=None)
    def test_nonnegative_on_random_pairs(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.random(16) + 1e-6
        b = rng.random(16) + 1e-6
        pa = DistanceHistogram(bins=a / a.sum(), count=16)
        pb = DistanceHistogram(bins=b / b.sum(), count=16)
        assert kl_divergence(pa, pb) >= 0.0


class TestDetectDrift:
    def test_identical_windows_not_drifted(self):
        rng = np.random.default_rng(2)
        w = make_window(cluster(rng, np.array([1.0, 0.0, 0.0, 0.0]), 200))
        verdict = detect_drift(w, w, delta=0.6, threshold=0.05)
        assert verdict.kl == pytest.approx(0.0, abs=1e-12)
        assert not verdict.drifted

    def test_stationary_windows_not_drifted(self):
        center = np.zeros(8)
        center[0] = 1.0
        flags = []
        for seed in range(20):
            rng = np.random.default_rng(seed)
            prior = make_window(cluster(rng, center, 400, noise=0.2), wid="p")
            live = make_window(cluster(rng, center, 400, noise=0.2), wid="l")
            flags.append(detect_drift(prior, live, 0.6, 0.05).drifted)
        assert sum(flags) <= 1  # at most 5% of 20 trials

    def test_shifted_window_drifts(self):
        rng = np.random.default_rng(4)
        center = np.zeros(8)
        center[0] = 1.0
        prior = make_window(cluster(rng, center, 500, noise=0.1), wid="p")
        moved = np.zeros(8)
        moved[1] = 1.0
        mixed = np.vstack([
            cluster(rng, center, 250, noise=0.1),
            cluster(rng, moved, 250, noise=0.1),
        ])
        live = make_window(mixed, wid="l")
        verdict = detect_drift(prior, live, 0.6, 0.05)
        assert verdict.drifted and verdict.kl > 0.05

    def test_verdict_fields(self):
        rng = np.random.default_rng(6)
        w1 = make_window(cluster(rng, np.array([1.0, 0.0]), 50), wid="prior")
        w2 = make_window(cluster(rng, np.array([1.0, 0.0]), 50), wid="live")
        verdict = detect_drift(w1, w2, 0.6, 0.05)
        assert verdict.compared == ("prior", "live")
        assert verdict.drifted == (verdict.kl > verdict.threshold)
        record = verdict.record(ts=123)
        assert record["ts"] == 123 and record["prior_id"] == "prior"

    def test_smoothing_period_withholds_verdict(self):
        rng = np.random.default_rng(8)
        w1 = make_window(cluster(rng, np.array([1.0, 0.0]), 100), wid="p")
        w2 = make_window(cluster(rng, np.array([0.0, 1.0]), 100), wid="l")
        assert smoothing_points(w2.capacity) == 10
        assert detect_drift(w1, w2, 0.6, 0.05, since_rollover=9) is None
        assert detect_drift(w1, w2, 0.6, 0.05, since_rollover=10) is not None

    def test_deterministic(self):
        rng = np.random.default_rng(11)
        w1 = make_window(cluster(rng, np.array([1.0, 0.0, 0.0]), 120), wid="p")
        w2 = make_window(cluster(rng, np.array([0.8, 0.1, 0.0]), 120), wid="l")
        v1 = detect_drift(w1, w2, 0.6, 0.05)
        v2 = detect_drift(w1, w2, 0.6, 0.05)
        assert v1.kl == v2.kl and v1.drifted == v2.drifted

    def test_empty_window_rejected(self):
        rng = np.random.default_rng(1)
        w = make_window(cluster(rng, np.array([1.0, 0.0]), 10))
        with pytest.raises(InputError):
            detect_drift(w, DataWindow(capacity=5), 0.6, 0.05)
