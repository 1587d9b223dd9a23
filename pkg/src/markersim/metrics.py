"""Mutual information between info bits and decoder LLRs, and the
achievable rate it implies.

I(u; L) is estimated from histograms of the LLR samples conditioned on the
bit value: I = H(L) - H(L|u), with H(L) taken from the equal-weight mixture
of the two conditional bin distributions and H(L|u) as the average of the
conditional entropies.  Entropies are in bits.  The achievable rate of a
marker code is its marker rate times the per-bit mutual information.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .channel import ChannelParams, RngSeed, transmit
from .fb import (
    APOSTERIORI,
    LLR_MAX,
    DecodeFailure,
    LatticeConfig,
    fb_decode_full,
    posteriors_to_llrs,
    priors_from_layout,
)
from .marker import MarkerSpec, build_layout, encode


@dataclass(frozen=True)
class HistogramSpec:
    """Binning for LLR histograms: `bins` equal cells over [-llr_max, llr_max]."""

    bins: int = 200
    llr_max: float = LLR_MAX

    def __post_init__(self):
        if self.bins < 2:
            raise ValueError("need at least 2 bins")
        if self.llr_max <= 0:
            raise ValueError("llr_max must be positive")

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(-self.llr_max, self.llr_max, self.bins + 1)

    def counts(self, samples) -> np.ndarray:
        samples = np.clip(np.asarray(samples, dtype=np.float64), -self.llr_max, self.llr_max)
        hist, _ = np.histogram(samples, bins=self.edges)
        return hist.astype(np.int64)


@dataclass
class LabeledLlrSamples:
    """LLR samples split by the true bit value."""

    a0: np.ndarray  # LLRs of positions where u = 0
    a1: np.ndarray  # LLRs of positions where u = 1


def entropy_from_counts(counts) -> float:
    """Shannon entropy in bits of the empirical bin distribution."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        raise ValueError("entropy of an empty histogram is undefined")
    q = counts[counts > 0] / total
    return float(-(q * np.log2(q)).sum())


def histogram_entropy(samples, spec: HistogramSpec = HistogramSpec()) -> float:
    return entropy_from_counts(spec.counts(samples))


def mi_from_counts(counts0, counts1) -> float:
    """I(u; L) in bits from the two conditional histograms, clamped to [0, 1].

    The bit is taken equiprobable, so the unconditional LLR distribution is
    the 50/50 mixture of the two conditional ones.
    """
    counts0 = np.asarray(counts0, dtype=np.float64)
    counts1 = np.asarray(counts1, dtype=np.float64)
    t0, t1 = counts0.sum(), counts1.sum()
    if t0 <= 0 or t1 <= 0:
        raise ValueError("both conditional histograms must be non-empty")
    q0 = counts0 / t0
    q1 = counts1 / t1
    h_mix = _entropy_bits(0.5 * q0 + 0.5 * q1)
    h_cond = 0.5 * _entropy_bits(q0) + 0.5 * _entropy_bits(q1)
    return float(min(1.0, max(0.0, h_mix - h_cond)))


def _entropy_bits(q: np.ndarray) -> float:
    q = q[q > 0]
    return float(-(q * np.log2(q)).sum())


def estimate_mi(samples: LabeledLlrSamples, spec: HistogramSpec = HistogramSpec()) -> float:
    return mi_from_counts(spec.counts(samples.a0), spec.counts(samples.a1))


def achievable_rate(marker_rate: Union[Fraction, float], mi_per_bit: float) -> float:
    return float(marker_rate) * mi_per_bit


@dataclass
class RateEstimate:
    """Monte Carlo achievable-rate estimate for one code and channel point."""

    marker_rate: float
    mi_per_bit: float
    achievable: float
    n_bits: int
    iterations: int
    stderr: float
    decode_failures: int = 0
    samples: Optional[LabeledLlrSamples] = None


#: default transmission frame, in info bits (see mi_campaign)
DEFAULT_FRAME_BITS = 3000


def frame_sizes(n_bits: int, frame_bits: Optional[int]) -> list:
    """Split an info word into near-equal even-length transmission frames.

    Frame count is ceil(n_bits / frame_bits); sizes differ by at most one
    symbol and sum to n_bits.
    """
    if n_bits % 2:
        raise ValueError("n_bits must be even")
    if frame_bits is None or n_bits <= frame_bits:
        return [n_bits]
    if frame_bits < 2:
        raise ValueError("frame_bits must be at least 2")
    n_syms = n_bits // 2
    n_frames = -(-n_bits // frame_bits)
    base, rem = divmod(n_syms, n_frames)
    return [2 * (base + (1 if i < rem else 0)) for i in range(n_frames)]


def mi_campaign(
    spec: MarkerSpec,
    params: ChannelParams,
    n_bits: int,
    iterations: int,
    seed: Union[int, RngSeed],
    hist: HistogramSpec = HistogramSpec(),
    config: LatticeConfig = LatticeConfig(),
    n_chunks: int = 16,
    collect_samples: bool = False,
    frame_bits: Optional[int] = DEFAULT_FRAME_BITS,
) -> RateEstimate:
    """Estimate I(u; L) and the achievable rate by repeated transmission.

    Each iteration draws a fresh info word and channel realization from its
    own random stream, decodes with uniform priors, and pools the resulting
    LLRs into the conditional histograms.  Info words longer than
    `frame_bits` are carved into near-equal frames, each encoded and sent as
    its own channel block, the way long payloads are stored as separate
    strands; this also bounds how much drift any single decode accumulates.
    The standard error comes from splitting the iterations into `n_chunks`
    equal groups and treating the per-chunk MI values as independent.
    Failed decodes are counted and skipped.
    """
    if isinstance(seed, RngSeed):
        base_seed, base_stream = seed.seed, seed.stream
    else:
        base_seed, base_stream = int(seed), 0
    sizes = frame_sizes(n_bits, frame_bits)
    by_size = {}
    for fs in sizes:
        if fs not in by_size:
            layout = build_layout(spec, fs)
            by_size[fs] = (layout, priors_from_layout(layout))
    bounds = np.concatenate(([0], np.cumsum(sizes)))
    n_chunks = max(1, min(n_chunks, iterations))

    counts = np.zeros((n_chunks, 2, hist.bins), dtype=np.int64)
    kept: list = [[], []] if collect_samples else None
    failures = 0
    for it in range(iterations):
        gen = RngSeed(base_seed, base_stream + it).generator()
        u = gen.integers(0, 2, n_bits).astype(np.int8)
        llr_parts = []
        try:
            for f, fs in enumerate(sizes):
                layout, priors = by_size[fs]
                x = encode(u[bounds[f] : bounds[f + 1]], layout)
                y = transmit(x, params, gen)
                res = fb_decode_full(y, layout, priors, params, config)
                llr_parts.append(posteriors_to_llrs(res.symbol_posteriors, mode=APOSTERIORI))
        except DecodeFailure:
            failures += 1
            continue
        llrs = np.concatenate(llr_parts)
        chunk = it * n_chunks // iterations
        zero = u == 0
        counts[chunk, 0] += hist.counts(llrs[zero])
        counts[chunk, 1] += hist.counts(llrs[~zero])
        if collect_samples:
            kept[0].append(llrs[zero])
            kept[1].append(llrs[~zero])

    total0 = counts[:, 0].sum(axis=0)
    total1 = counts[:, 1].sum(axis=0)
    mi = mi_from_counts(total0, total1)
    chunk_mis = [
        mi_from_counts(counts[c, 0], counts[c, 1])
        for c in range(n_chunks)
        if counts[c].sum() > 0
    ]
    if len(chunk_mis) > 1:
        stderr = float(np.std(chunk_mis, ddof=1) / np.sqrt(len(chunk_mis)))
    else:
        stderr = 0.0
    samples = None
    if collect_samples:
        samples = LabeledLlrSamples(
            np.concatenate(kept[0]) if kept[0] else np.empty(0),
            np.concatenate(kept[1]) if kept[1] else np.empty(0),
        )
    rate = float(spec.rate())
    return RateEstimate(
        marker_rate=rate,
        mi_per_bit=mi,
        achievable=achievable_rate(rate, mi),
        n_bits=n_bits,
        iterations=iterations,
        stderr=stderr,
        decode_failures=failures,
        samples=samples,
    )
