"""Channel event model tests."""

import numpy as np
import pytest

from markersim.channel import ChannelParams, RngSeed, deletion_pattern_enumerate, transmit


def test_params_validation():
    with pytest.raises(ValueError):
        ChannelParams(p_del=1.2)
    with pytest.raises(ValueError):
        ChannelParams(p_ins=-0.1)
    with pytest.raises(ValueError):
        ChannelParams(p_ins=0.5, p_del=0.4, p_sub=0.2)
    assert ChannelParams(0.01, 0.01, 0.02).mutation_rate == pytest.approx(0.04)


def test_noiseless_channel_is_identity():
    x = np.array([0, 1, 2, 3, 2, 1], dtype=np.int8)
    y = transmit(x, ChannelParams(), RngSeed(1))
    np.testing.assert_array_equal(y, x)


def test_certain_deletion_empties_the_output():
    x = np.array([1, 2, 3], dtype=np.int8)
    y = transmit(x, ChannelParams(p_del=1.0), RngSeed(1))
    assert y.size == 0


def test_empty_input_passes_through():
    y = transmit(np.array([], dtype=np.int8), ChannelParams(p_del=0.5), RngSeed(1))
    assert y.size == 0


def test_output_alphabet_and_length_bounds():
    rng = RngSeed(42).generator()
    x = rng.integers(0, 4, 500).astype(np.int8)
    y_del = transmit(x, ChannelParams(p_del=0.3, p_sub=0.1), rng)
    assert y_del.size <= x.size
    assert np.all((y_del >= 0) & (y_del < 4))
    y_ins = transmit(x, ChannelParams(p_ins=0.3, p_sub=0.1), rng)
    assert y_ins.size >= x.size
    assert np.all((y_ins >= 0) & (y_ins < 4))


def test_mean_output_length_matches_event_model():
    # E[len(y)] = (1 + p_ins - p_del) * len(x); check within 3 standard errors
    params = ChannelParams(p_ins=0.01, p_del=0.01)
    gen = RngSeed(7).generator()
    x = gen.integers(0, 4, 64).astype(np.int8)
    n_trials = 100_000
    lengths = np.array([transmit(x, params, gen).size for _ in range(n_trials)])
    # per-position length variance: E[L^2] - E[L]^2 with L in {0,1,2}
    e1 = 1.0 + params.p_ins - params.p_del
    var1 = (4 * params.p_ins + (1 - params.p_ins - params.p_del)) - e1**2
    se = np.sqrt(var1 * x.size / n_trials)
    assert abs(lengths.mean() - e1 * x.size) < 3 * se


def test_per_position_deletion_frequency():
    params = ChannelParams(p_del=0.05)
    gen = RngSeed(13).generator()
    x = np.zeros(1, dtype=np.int8)
    n_trials = 200_000
    deleted = sum(transmit(x, params, gen).size == 0 for _ in range(n_trials))
    se = np.sqrt(params.p_del * (1 - params.p_del) / n_trials)
    assert abs(deleted / n_trials - params.p_del) < 3 * se


def test_same_seed_and_stream_reproduce_the_output():
    x = np.arange(4, dtype=np.int8).repeat(10)
    params = ChannelParams(p_ins=0.05, p_del=0.1, p_sub=0.1)
    y1 = transmit(x, params, RngSeed(99, 5))
    y2 = transmit(x, params, RngSeed(99, 5))
    np.testing.assert_array_equal(y1, y2)
    y3 = transmit(x, params, RngSeed(99, 6))
    assert y3.size != y1.size or not np.array_equal(y3, y1)


def test_enumerate_single_symbol_deletion_only():
    dist = deletion_pattern_enumerate(np.array([0]), ChannelParams(p_del=0.1))
    assert dist == {(): pytest.approx(0.1), (0,): pytest.approx(0.9)}


def test_enumerate_single_symbol_with_substitution():
    dist = deletion_pattern_enumerate(np.array([0]), ChannelParams(p_del=0.1, p_sub=0.3))
    # substitution applies only to survivors: 0.9*0.7 clean, 0.9*0.1 per wrong value
    assert dist[()] == pytest.approx(0.1)
    assert dist[(0,)] == pytest.approx(0.63)
    for wrong in ((1,), (2,), (3,)):
        assert dist[wrong] == pytest.approx(0.09)


def test_enumerate_probabilities_sum_to_one():
    x = np.array([0, 1, 2, 3, 0, 1, 2, 3], dtype=np.int8)
    dist = deletion_pattern_enumerate(x, ChannelParams(p_del=0.2, p_sub=0.05))
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)
    dist = deletion_pattern_enumerate(x, ChannelParams(p_del=0.2))
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)


def test_enumerate_agrees_with_sampled_frequencies():
    x = np.array([2, 0, 1], dtype=np.int8)
    params = ChannelParams(p_del=0.2, p_sub=0.1)
    dist = deletion_pattern_enumerate(x, params)
    gen = RngSeed(5).generator()
    n_trials = 200_000
    hits = {}
    for _ in range(n_trials):
        out = tuple(int(v) for v in transmit(x, params, gen))
        hits[out] = hits.get(out, 0) + 1
    for out, p in dist.items():
        if p < 0.01:
            continue
        se = np.sqrt(p * (1 - p) / n_trials)
        assert abs(hits.get(out, 0) / n_trials - p) < 4 * se


def test_enumerate_guards():
    with pytest.raises(ValueError):
        deletion_pattern_enumerate(np.zeros(3, dtype=np.int8), ChannelParams(p_ins=0.1))
    with pytest.raises(ValueError):
        deletion_pattern_enumerate(np.zeros(30, dtype=np.int8), ChannelParams(p_del=0.1))
