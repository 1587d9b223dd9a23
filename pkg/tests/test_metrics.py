"""Mutual-information estimation and achievable-rate tests."""

import numpy as np
import pytest

from markersim.channel import ChannelParams, RngSeed
from markersim.fb import LatticeConfig
from markersim.marker import HALF, STANDARD, MarkerSpec
from markersim.metrics import (
    HistogramSpec,
    LabeledLlrSamples,
    achievable_rate,
    entropy_from_counts,
    estimate_mi,
    frame_sizes,
    histogram_entropy,
    mi_campaign,
    mi_from_counts,
)


def test_histogram_spec_validation():
    with pytest.raises(ValueError):
        HistogramSpec(bins=1)
    with pytest.raises(ValueError):
        HistogramSpec(llr_max=0.0)
    spec = HistogramSpec(bins=10, llr_max=5.0)
    assert spec.edges[0] == -5.0 and spec.edges[-1] == 5.0
    assert spec.edges.size == 11


def test_counts_clip_out_of_range_samples_into_end_bins():
    spec = HistogramSpec(bins=4, llr_max=2.0)
    counts = spec.counts([-100.0, -2.0, 0.1, 1.99, 100.0])
    np.testing.assert_array_equal(counts, [2, 0, 1, 2])


def test_entropy_degenerate_and_uniform():
    assert entropy_from_counts([0, 7, 0, 0]) == 0.0
    assert entropy_from_counts([3, 3, 3, 3]) == pytest.approx(2.0)
    assert histogram_entropy(np.zeros(50)) == 0.0
    with pytest.raises(ValueError):
        entropy_from_counts([0, 0])


def test_histogram_entropy_matches_gaussian_reference():
    # discrete entropy of a binned standard normal is the differential
    # entropy minus log2 of the bin width, up to O(width^2) terms
    spec = HistogramSpec(bins=200, llr_max=25.0)
    gen = np.random.default_rng(1234)
    samples = gen.normal(0.0, 1.0, 1_000_000)
    width = 50.0 / 200
    expect = 0.5 * np.log2(2 * np.pi * np.e) - np.log2(width)
    assert histogram_entropy(samples, spec) == pytest.approx(expect, abs=0.01)


def test_mi_zero_when_llrs_are_uninformative():
    samples = LabeledLlrSamples(np.zeros(1000), np.zeros(800))
    assert estimate_mi(samples) == 0.0


def test_mi_one_when_llrs_are_saturated():
    samples = LabeledLlrSamples(np.full(500, -25.0), np.full(500, 25.0))
    assert estimate_mi(samples) == pytest.approx(1.0)


def test_mi_matches_binary_channel_entropy_exactly_on_ideal_counts():
    # two-point LLR distribution of a binary symmetric channel: the bins
    # carry probabilities (0.9, 0.1) and (0.1, 0.9)
    spec = HistogramSpec(bins=200)
    llr = np.log(0.9 / 0.1)
    c0 = spec.counts(np.concatenate([np.full(9000, -llr), np.full(1000, llr)]))
    c1 = spec.counts(np.concatenate([np.full(1000, -llr), np.full(9000, llr)]))
    hb = -(0.9 * np.log2(0.9) + 0.1 * np.log2(0.1))
    assert mi_from_counts(c0, c1) == pytest.approx(1.0 - hb, abs=1e-12)


def test_mi_on_sampled_binary_channel_llrs():
    gen = np.random.default_rng(4321)
    llr = np.log(0.9 / 0.1)
    flips0 = gen.random(200_000) < 0.1
    flips1 = gen.random(200_000) < 0.1
    samples = LabeledLlrSamples(
        np.where(flips0, llr, -llr), np.where(flips1, -llr, llr)
    )
    assert estimate_mi(samples) == pytest.approx(0.531, abs=0.01)


def test_mi_label_symmetry():
    gen = np.random.default_rng(9)
    a0 = gen.normal(-2, 1.5, 20_000)
    a1 = gen.normal(2, 1.5, 20_000)
    direct = estimate_mi(LabeledLlrSamples(a0, a1))
    flipped = estimate_mi(LabeledLlrSamples(-a1, -a0))
    assert flipped == pytest.approx(direct, abs=1e-12)


def test_mi_stays_in_unit_interval():
    gen = np.random.default_rng(10)
    for _ in range(20):
        c0 = gen.integers(0, 50, 200)
        c1 = gen.integers(0, 50, 200)
        if c0.sum() == 0 or c1.sum() == 0:
            continue
        assert 0.0 <= mi_from_counts(c0, c1) <= 1.0
    with pytest.raises(ValueError):
        mi_from_counts(np.zeros(200), np.ones(200))


def test_mi_binning_stability():
    gen = np.random.default_rng(11)
    a0 = np.clip(gen.normal(-3, 2.5, 100_000), -25, 25)
    a1 = np.clip(gen.normal(3, 2.5, 100_000), -25, 25)
    samples = LabeledLlrSamples(a0, a1)
    coarse = estimate_mi(samples, HistogramSpec(bins=100))
    fine = estimate_mi(samples, HistogramSpec(bins=400))
    assert abs(coarse - fine) < 0.02


def test_achievable_rate_is_the_product():
    assert achievable_rate(0.8, 0.75) == pytest.approx(0.60)
    assert achievable_rate(0.8, 0.0) == 0.0


def test_frame_sizes_split_evenly():
    assert frame_sizes(10_000, 3000) == [2500, 2500, 2500, 2500]
    assert frame_sizes(10, 4) == [4, 4, 2]
    assert frame_sizes(10, None) == [10]
    assert frame_sizes(8, 100) == [8]
    assert frame_sizes(0, 100) == [0]
    with pytest.raises(ValueError):
        frame_sizes(9, 4)
    with pytest.raises(ValueError):
        frame_sizes(10, 1)


def test_noiseless_campaign_reaches_full_rate():
    spec = MarkerSpec((2,), 3, STANDARD)
    est = mi_campaign(spec, ChannelParams(), 60, 8, seed=1)
    assert est.mi_per_bit == pytest.approx(1.0)
    assert est.achievable == pytest.approx(2 / 3)
    assert est.marker_rate == pytest.approx(2 / 3)
    assert est.decode_failures == 0
    assert est.stderr == 0.0
    assert est.samples is None


def test_campaign_framing_is_transparent_when_noiseless():
    spec = MarkerSpec((2,), 4, HALF)
    est = mi_campaign(spec, ChannelParams(), 60, 4, seed=2, frame_bits=20)
    assert est.mi_per_bit == pytest.approx(1.0)


def test_campaign_collects_labeled_samples():
    spec = MarkerSpec((2,), 3, STANDARD)
    est = mi_campaign(
        spec, ChannelParams(p_del=0.05), 120, 6, seed=3, collect_samples=True
    )
    assert est.samples is not None
    assert est.samples.a0.size + est.samples.a1.size == 6 * 120
    assert est.iterations == 6


def test_campaign_counts_decode_failures():
    # an implausibly narrow drift window rejects most noisy blocks up front
    spec = MarkerSpec((2,), 3, STANDARD)
    est = mi_campaign(
        spec,
        ChannelParams(p_del=0.3),
        200,
        20,
        seed=4,
        config=LatticeConfig(window_scale=0.3),
    )
    assert est.decode_failures > 0
    assert 0.0 <= est.mi_per_bit <= 1.0


def test_campaign_is_seed_deterministic():
    spec = MarkerSpec((2,), 5, HALF)
    params = ChannelParams(p_del=0.05, p_sub=0.02)
    a = mi_campaign(spec, params, 200, 10, seed=RngSeed(7, 3))
    b = mi_campaign(spec, params, 200, 10, seed=RngSeed(7, 3))
    assert a.mi_per_bit == b.mi_per_bit and a.achievable == b.achievable
    c = mi_campaign(spec, params, 200, 10, seed=RngSeed(7, 4))
    assert c.mi_per_bit != a.mi_per_bit
