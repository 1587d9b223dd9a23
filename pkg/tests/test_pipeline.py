"""Concatenated-decoder pipeline and error-rate accounting tests."""

import numpy as np
import pytest

from markersim.channel import ChannelParams, RngSeed
from markersim.fb import LatticeConfig
from markersim.ldpc import gallager_construct, ldpc_encode
from markersim.marker import HALF, STANDARD, MarkerSpec, build_layout
from markersim.pipeline import (
    ErrorRates,
    Schedule,
    TrialResult,
    estimate_error_rates,
    hard_symbols,
    parse_schedule,
    run_ber_point,
    run_concatenated_trial,
    run_ser_point,
    run_uncoded_trial,
    wilson_interval,
)


@pytest.fixture(scope="module")
def code60():
    return gallager_construct(60, 30, 3, 6, rng=12)


def test_schedule_parsing_and_accounting():
    sched = parse_schedule("5x4")
    assert sched == Schedule(5, 4)
    assert sched.total_bp_iters == 20
    assert str(sched) == "5x4"
    assert parse_schedule(" 1X20 ") == Schedule(1, 20)
    with pytest.raises(ValueError):
        parse_schedule("5*4")
    with pytest.raises(ValueError):
        parse_schedule("x4")
    with pytest.raises(ValueError):
        Schedule(0, 4)
    with pytest.raises(ValueError):
        Schedule(5, 0)


def test_trial_result_validates_counts():
    with pytest.raises(ValueError):
        TrialResult(bit_errors=11, bits=10, symbol_errors=0, symbols=5, failed=False, rounds=[])


def test_hard_decision_breaks_ties_toward_the_lowest_symbol():
    rho = np.array(
        [
            [0.3, 0.3, 0.2, 0.2],
            [0.2, 0.3, 0.3, 0.2],
            [0.1, 0.2, 0.3, 0.4],
        ]
    )
    np.testing.assert_array_equal(hard_symbols(rho), [0, 1, 3])


def test_noiseless_concatenated_trial_is_error_free(code60):
    spec = MarkerSpec((2,), 6, STANDARD)
    gen = RngSeed(1).generator()
    msg = gen.integers(0, 2, code60.k_eff).astype(np.uint8)
    res = run_concatenated_trial(msg, spec, code60, ChannelParams(), parse_schedule("5x4"), gen)
    assert res.bit_errors == 0 and res.symbol_errors == 0
    assert not res.failed
    assert res.bits == 60 and res.symbols == 30
    assert res.fb_passes == 5
    assert res.bp_iters_scheduled == 20
    assert res.bp_iters_executed <= 20  # early stop may cut rounds short


def test_single_round_schedule_runs_one_fb_pass(code60):
    spec = MarkerSpec((2,), 6, HALF)
    gen = RngSeed(2).generator()
    msg = gen.integers(0, 2, code60.k_eff).astype(np.uint8)
    res = run_concatenated_trial(
        msg, spec, code60, ChannelParams(p_del=0.03, p_sub=0.02), parse_schedule("1x20"), gen
    )
    assert res.fb_passes == 1
    assert res.bp_iters_scheduled == 20
    assert len(res.rounds) == 1


def test_concatenated_trial_counts_errors_against_the_codeword(code60):
    spec = MarkerSpec((2,), 6, STANDARD)
    params = ChannelParams(p_del=0.1, p_sub=0.05)
    errs = 0
    for t in range(10):
        gen = RngSeed(3, t).generator()
        msg = gen.integers(0, 2, code60.k_eff).astype(np.uint8)
        res = run_concatenated_trial(msg, spec, code60, params, parse_schedule("2x4"), gen)
        assert 0 <= res.bit_errors <= res.bits
        assert 0 <= res.symbol_errors <= res.symbols
        errs += res.bit_errors
    assert errs > 0  # this channel is harsh enough to leave residual errors


def test_concatenated_trial_rejects_mismatched_layout(code60):
    spec = MarkerSpec((2,), 6, STANDARD)
    layout = build_layout(spec, 120)
    with pytest.raises(ValueError):
        run_concatenated_trial(
            np.zeros(code60.k_eff, dtype=np.uint8),
            spec,
            code60,
            ChannelParams(),
            parse_schedule("1x4"),
            RngSeed(1).generator(),
            layout=layout,
        )


def test_noiseless_uncoded_trial_is_error_free():
    spec = MarkerSpec((1, 2), 8, HALF)
    gen = RngSeed(4).generator()
    u = gen.integers(0, 2, 360).astype(np.int8)
    res = run_uncoded_trial(u, spec, ChannelParams(), gen)
    assert res.bit_errors == 0 and res.symbol_errors == 0
    assert res.symbols == 180 and res.bits == 360


def test_failed_decode_counts_half_the_bits_as_errors():
    spec = MarkerSpec((2,), 5, STANDARD)
    params = ChannelParams(p_del=0.25)
    narrow = LatticeConfig(window_scale=0.2)
    seen_failure = False
    for t in range(30):
        gen = RngSeed(5, t).generator()
        u = gen.integers(0, 2, 80).astype(np.int8)
        res = run_uncoded_trial(u, spec, params, gen, config=narrow)
        if res.failed:
            seen_failure = True
            assert res.bit_errors == 40
            assert res.symbol_errors == 0.75 * 40
            break
    assert seen_failure


def test_wilson_interval_edges():
    lo, hi = wilson_interval(0, 1000)
    assert lo == pytest.approx(0.0, abs=1e-12)
    assert 0 < hi < 0.01
    lo, hi = wilson_interval(1000, 1000)
    assert hi == pytest.approx(1.0, abs=1e-12)
    lo, hi = wilson_interval(100, 1000)
    assert lo < 0.1 < hi
    with pytest.raises(ValueError):
        wilson_interval(1, 0)


def test_error_rate_aggregation():
    trials = [
        TrialResult(1, 10_000, 0, 5_000, False, []),
        TrialResult(0, 10_000, 2, 5_000, False, []),
        TrialResult(5_000, 10_000, 3_750, 5_000, True, []),
    ]
    rates = estimate_error_rates(trials)
    assert rates.ber == pytest.approx(5001 / 30_000)
    assert rates.ser == pytest.approx(3752 / 15_000)
    assert rates.ber_lo <= rates.ber <= rates.ber_hi
    assert rates.trials == 3 and rates.failures == 1
    with pytest.raises(ValueError):
        estimate_error_rates([])


def test_one_error_in_ten_thousand_bits():
    rates = estimate_error_rates([TrialResult(1, 10_000, 1, 5_000, False, [])])
    assert rates.ber == pytest.approx(1e-4)


def test_ber_point_is_reproducible(code60):
    spec = MarkerSpec((2,), 6, STANDARD)
    params = ChannelParams(p_del=0.05, p_sub=0.02)
    a = run_ber_point(spec, code60, params, parse_schedule("2x4"), 20, RngSeed(6))
    b = run_ber_point(spec, code60, params, parse_schedule("2x4"), 20, RngSeed(6))
    assert a == b
    c = run_ber_point(spec, code60, params, parse_schedule("2x4"), 20, RngSeed(6, 1000))
    assert a != c


def test_ser_point_is_reproducible():
    spec = MarkerSpec((1, 2), 8, STANDARD)
    params = ChannelParams(p_ins=0.01, p_del=0.01, p_sub=0.02)
    a = run_ser_point(spec, 120, params, 30, RngSeed(7))
    b = run_ser_point(spec, 120, params, 30, RngSeed(7))
    assert a == b
    assert isinstance(a, ErrorRates)
    assert 0.0 <= a.ser <= 1.0
