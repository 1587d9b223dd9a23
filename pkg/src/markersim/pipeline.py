"""End-to-end concatenated runs: marker code inside, LDPC outside.

A concatenated trial alternates forward-backward decoding of the inner
marker code with belief-propagation rounds on the outer LDPC code,
exchanging extrinsic LLRs in both directions.  Uncoded trials measure raw
symbol decisions after a single FB pass.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .alphabet import bits_to_symbols, symbols_to_bits
from .channel import ChannelParams, RngSeed, transmit
from .fb import (
    EXTRINSIC,
    DecodeFailure,
    LatticeConfig,
    fb_decode_full,
    posteriors_to_llrs,
    priors_from_layout,
)
from .ldpc import LdpcCode, bp_decode, ldpc_encode
from .marker import CodewordLayout, MarkerSpec, build_layout, encode


@dataclass(frozen=True)
class Schedule:
    """outer_rounds FB passes, each followed by ldpc_iters_per_round BP iterations."""

    outer_rounds: int
    ldpc_iters_per_round: int

    def __post_init__(self):
        if self.outer_rounds < 1 or self.ldpc_iters_per_round < 1:
            raise ValueError("schedule counts must be positive")

    @property
    def total_bp_iters(self) -> int:
        return self.outer_rounds * self.ldpc_iters_per_round

    def __str__(self) -> str:
        return f"{self.outer_rounds}x{self.ldpc_iters_per_round}"


def parse_schedule(text: str) -> Schedule:
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if not m:
        raise ValueError(f"schedule must look like '5x4', got {text!r}")
    return Schedule(int(m.group(1)), int(m.group(2)))


@dataclass
class RoundDiag:
    fb_failed: bool
    bp_iters_scheduled: int
    bp_iters_executed: int
    syndrome_ok: bool


@dataclass
class TrialResult:
    bit_errors: float
    bits: int
    symbol_errors: float
    symbols: int
    failed: bool
    rounds: List[RoundDiag] = field(default_factory=list)

    def __post_init__(self):
        if self.bit_errors > self.bits or self.symbol_errors > self.symbols:
            raise ValueError("more errors than transmitted units")

    @property
    def fb_passes(self) -> int:
        return len(self.rounds)

    @property
    def bp_iters_scheduled(self) -> int:
        return sum(r.bp_iters_scheduled for r in self.rounds)

    @property
    def bp_iters_executed(self) -> int:
        return sum(r.bp_iters_executed for r in self.rounds)


def _failed_trial(n_bits: int, n_syms: int, rounds: List[RoundDiag]) -> TrialResult:
    # a failed block conveys nothing; count errors at chance expectation
    return TrialResult(
        bit_errors=n_bits / 2.0,
        bits=n_bits,
        symbol_errors=0.75 * n_syms,
        symbols=n_syms,
        failed=True,
        rounds=rounds,
    )


def _count_errors(u: np.ndarray, u_hat: np.ndarray):
    bit_errors = float(np.count_nonzero(u != u_hat))
    s = bits_to_symbols(u)
    s_hat = bits_to_symbols(u_hat)
    return bit_errors, float(np.count_nonzero(s != s_hat)), s.size


def run_concatenated_trial(
    message,
    spec: MarkerSpec,
    code: LdpcCode,
    params: ChannelParams,
    sched: Schedule,
    rng: np.random.Generator,
    config: LatticeConfig = LatticeConfig(),
    layout: Optional[CodewordLayout] = None,
) -> TrialResult:
    """One LDPC-encoded block through the channel and the iterative decoder.

    Each round decodes the marker code with the current a priori LLRs, hands
    the FB extrinsic to a fresh BP run as channel LLRs, and feeds the BP
    extrinsic back as the next a priori.  The hard decision comes from the
    last BP posterior.
    """
    u = ldpc_encode(code, message)
    if layout is None:
        layout = build_layout(spec, code.n)
    elif layout.n_bits != code.n:
        raise ValueError("layout does not match the LDPC codeword length")
    x = encode(u, layout)
    y = transmit(x, params, rng)

    n = code.n
    apriori = np.zeros(n)
    rounds: List[RoundDiag] = []
    bp = None
    for _ in range(sched.outer_rounds):
        priors = priors_from_layout(layout, apriori)
        try:
            res = fb_decode_full(y, layout, priors, params, config)
        except DecodeFailure:
            rounds.append(RoundDiag(True, sched.ldpc_iters_per_round, 0, False))
            return _failed_trial(n, layout.n_syms, rounds)
        fb_ext = posteriors_to_llrs(res.symbol_posteriors, apriori, mode=EXTRINSIC)
        bp = bp_decode(code, fb_ext, sched.ldpc_iters_per_round)
        apriori = bp.extrinsic_llrs
        rounds.append(
            RoundDiag(False, sched.ldpc_iters_per_round, bp.iterations, bp.syndrome_ok)
        )

    u_hat = bp.hard
    bit_errors, symbol_errors, n_syms = _count_errors(u, u_hat)
    return TrialResult(bit_errors, n, symbol_errors, n_syms, False, rounds)


def hard_symbols(symbol_posteriors: np.ndarray) -> np.ndarray:
    """Most likely symbol per row; ties go to the lowest symbol value."""
    return np.argmax(symbol_posteriors, axis=1).astype(np.int64)


def run_uncoded_trial(
    u,
    spec: MarkerSpec,
    params: ChannelParams,
    rng: np.random.Generator,
    config: LatticeConfig = LatticeConfig(),
    layout: Optional[CodewordLayout] = None,
) -> TrialResult:
    """Marker code alone: one FB pass and a hard symbol decision."""
    u = np.asarray(u, dtype=np.int8)
    if layout is None:
        layout = build_layout(spec, u.size)
    x = encode(u, layout)
    y = transmit(x, params, rng)
    try:
        res = fb_decode_full(y, layout, priors_from_layout(layout), params, config)
    except DecodeFailure:
        return _failed_trial(u.size, layout.n_syms, [RoundDiag(True, 0, 0, False)])
    s_hat = hard_symbols(res.symbol_posteriors)
    s = bits_to_symbols(u)
    u_hat = symbols_to_bits(s_hat)
    return TrialResult(
        bit_errors=float(np.count_nonzero(u != u_hat)),
        bits=u.size,
        symbol_errors=float(np.count_nonzero(s != s_hat)),
        symbols=s.size,
        failed=False,
        rounds=[RoundDiag(False, 0, 0, False)],
    )


def wilson_interval(errors: float, total: float, z: float = 1.959963984540054):
    """95% Wilson score interval for an error proportion."""
    if total <= 0:
        raise ValueError("total must be positive")
    p = errors / total
    z2 = z * z
    denom = 1.0 + z2 / total
    center = (p + z2 / (2.0 * total)) / denom
    half = z * math.sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass
class ErrorRates:
    ber: float
    ber_lo: float
    ber_hi: float
    ser: float
    ser_lo: float
    ser_hi: float
    trials: int
    failures: int


def estimate_error_rates(trials: List[TrialResult]) -> ErrorRates:
    """Aggregate trial counts into BER/SER with Wilson 95% intervals."""
    if not trials:
        raise ValueError("need at least one trial")
    bit_err = sum(t.bit_errors for t in trials)
    bits = sum(t.bits for t in trials)
    sym_err = sum(t.symbol_errors for t in trials)
    syms = sum(t.symbols for t in trials)
    ber_lo, ber_hi = wilson_interval(bit_err, bits)
    ser_lo, ser_hi = wilson_interval(sym_err, syms)
    return ErrorRates(
        ber=bit_err / bits,
        ber_lo=ber_lo,
        ber_hi=ber_hi,
        ser=sym_err / syms,
        ser_lo=ser_lo,
        ser_hi=ser_hi,
        trials=len(trials),
        failures=sum(1 for t in trials if t.failed),
    )


def run_ber_point(
    spec: MarkerSpec,
    code: LdpcCode,
    params: ChannelParams,
    sched: Schedule,
    n_trials: int,
    seed: RngSeed,
) -> ErrorRates:
    """Monte Carlo BER for one concatenated configuration.

    Trial t draws its message and channel noise from stream seed.stream + t,
    so the estimate is independent of how trials are batched.
    """
    layout = build_layout(spec, code.n)
    results = []
    for t in range(n_trials):
        gen = RngSeed(seed.seed, seed.stream + t).generator()
        msg = gen.integers(0, 2, code.k_eff).astype(np.uint8)
        results.append(
            run_concatenated_trial(msg, spec, code, params, sched, gen, layout=layout)
        )
    return estimate_error_rates(results)


def run_ser_point(
    spec: MarkerSpec,
    n_bits: int,
    params: ChannelParams,
    n_trials: int,
    seed: RngSeed,
) -> ErrorRates:
    """Monte Carlo SER for one uncoded configuration."""
    layout = build_layout(spec, n_bits)
    results = []
    for t in range(n_trials):
        gen = RngSeed(seed.seed, seed.stream + t).generator()
        u = gen.integers(0, 2, n_bits).astype(np.int8)
        results.append(run_uncoded_trial(u, spec, params, gen, layout=layout))
    return estimate_error_rates(results)
