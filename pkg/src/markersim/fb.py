"""Symbol-level forward-backward decoding over the drift lattice.

State (j, d) means j input symbols processed with received/transmitted
length difference d.  Transitions follow the channel events: deletion moves
to (j+1, d-1) emitting nothing, transmission to (j+1, d) emitting one
symbol, insertion to (j+1, d+1) emitting a random symbol followed by the
true one.  Forward and backward coefficients are normalized per column to
keep the recursion in double-precision range; posteriors only ever combine
entries from a single column, so the factors cancel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .alphabet import ALPHABET_SIZE
from .channel import ChannelParams
from .marker import ROLE_DATA, ROLE_HALF, ROLE_MARKER, FIXED_LOW, CodewordLayout

LLR_MAX = 25.0

APOSTERIORI = "aposteriori"
EXTRINSIC = "extrinsic"


class DecodeFailure(Exception):
    """The received vector cannot be explained within the drift window."""


@dataclass(frozen=True)
class LatticeConfig:
    """Drift-window pruning control.

    With ``prune=True`` the lattice keeps drifts within
    ceil(window_scale * sigma) of the straight line from drift 0 to the
    observed final drift, where sigma = sqrt(len(x) * (p_del + p_ins)); a
    received length more than that far from its expectation is rejected up
    front.  With ``prune=False`` every reachable drift is kept, which is
    exact and only sensible for short inputs.
    """

    window_scale: float = 4.0
    prune: bool = True


def drift_halfwidth(n_in: int, params: ChannelParams, scale: float = 4.0) -> int:
    sigma = math.sqrt(n_in * (params.p_del + params.p_ins))
    return int(math.ceil(scale * sigma))


def llrs_to_bit_probs(llrs) -> np.ndarray:
    """P(bit = 1) from log(P1/P0), numerically stable for large values."""
    llrs = np.asarray(llrs, dtype=np.float64)
    out = np.empty_like(llrs)
    pos = llrs >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-llrs[pos]))
    e = np.exp(llrs[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def priors_from_layout(layout: CodewordLayout, apriori_llrs=None) -> np.ndarray:
    """Per-position symbol priors for a codeword layout.

    Marker positions get a one-hot row, half-marker positions spread the
    info-bit probability over the two values consistent with the fixed bit,
    and data positions take the product of their two bit marginals.  With no
    a priori LLRs all info bits are taken equiprobable.
    """
    if apriori_llrs is None:
        p1 = np.full(layout.n_bits, 0.5)
    else:
        apriori_llrs = np.asarray(apriori_llrs, dtype=np.float64)
        if apriori_llrs.shape != (layout.n_bits,):
            raise ValueError(
                f"expected {layout.n_bits} a priori LLRs, got {apriori_llrs.shape}"
            )
        p1 = llrs_to_bit_probs(apriori_llrs)

    pri = np.zeros((layout.length, ALPHABET_SIZE))

    m = layout.kind == ROLE_MARKER
    pri[np.nonzero(m)[0], layout.marker_value[m]] = 1.0

    h = np.nonzero(layout.kind == ROLE_HALF)[0]
    if h.size:
        fb = layout.fixed_bit[h].astype(np.int64)
        pb1 = p1[layout.info_bit[h]]
        low = layout.fixed_place[h] == FIXED_LOW
        # fixed bit low: value = 2*info + fb; fixed bit high: value = 2*fb + info
        v0 = np.where(low, fb, 2 * fb)
        v1 = np.where(low, 2 + fb, 2 * fb + 1)
        pri[h, v0] = 1.0 - pb1
        pri[h, v1] = pb1

    d = np.nonzero(layout.kind == ROLE_DATA)[0]
    if d.size:
        i = layout.info_sym[d]
        h1 = p1[2 * i]
        l1 = p1[2 * i + 1]
        pri[d, 0] = (1.0 - h1) * (1.0 - l1)
        pri[d, 1] = (1.0 - h1) * l1
        pri[d, 2] = h1 * (1.0 - l1)
        pri[d, 3] = h1 * l1
    return pri


def alignment_table(priors: np.ndarray, p_sub: float) -> np.ndarray:
    """Probability that position j is received as symbol a, given survival.

    Marginalizes the transmitted value against the prior row:
    (1 - p_sub) * prior[j, a] + (p_sub / 3) * (1 - prior[j, a]).
    """
    return (1.0 - 4.0 * p_sub / 3.0) * priors + p_sub / 3.0


@njit(cache=True)
def _forward(zt, pri, y, p_ins, p_del, lo, width, m_out):  # pragma: no cover
    n = zt.shape[0]
    alpha = np.zeros((n + 1, width))
    scale = np.ones(n + 1)
    alpha[0, -lo[0]] = 1.0
    p_tr = 1.0 - p_ins - p_del
    for j in range(1, n + 1):
        s = lo[j] - lo[j - 1]  # window recentering between steps
        tot = 0.0
        for c in range(width):
            consumed = j + c + lo[j]
            if consumed < 0 or consumed > m_out:
                continue
            a = 0.0
            cd = c + s + 1
            if 0 <= cd < width:
                a += p_del * alpha[j - 1, cd]
            if consumed >= 1:
                ct = c + s
                if 0 <= ct < width:
                    a += p_tr * zt[j - 1, y[consumed - 1]] * alpha[j - 1, ct]
                ci = c + s - 1
                if 0 <= ci < width and consumed >= 2:
                    a += p_ins * 0.25 * pri[j - 1, y[consumed - 1]] * alpha[j - 1, ci]
            alpha[j, c] = a
            tot += a
        if tot <= 0.0:
            return alpha, scale, False
        for c in range(width):
            alpha[j, c] /= tot
        scale[j] = tot
    return alpha, scale, True


@njit(cache=True)
def _backward(zt, pri, y, p_ins, p_del, lo, width, m_out):  # pragma: no cover
    n = zt.shape[0]
    beta = np.zeros((n + 1, width))
    scale = np.ones(n + 1)
    beta[n, (m_out - n) - lo[n]] = 1.0
    p_tr = 1.0 - p_ins - p_del
    for j in range(n, 0, -1):
        t = lo[j - 1] - lo[j]
        tot = 0.0
        for c in range(width):
            consumed = (j - 1) + c + lo[j - 1]
            if consumed < 0 or consumed > m_out:
                continue
            b = 0.0
            cd = c + t - 1
            if 0 <= cd < width:
                b += p_del * beta[j, cd]
            if consumed + 1 <= m_out:
                ct = c + t
                if 0 <= ct < width:
                    b += p_tr * zt[j - 1, y[consumed]] * beta[j, ct]
                ci = c + t + 1
                if 0 <= ci < width and consumed + 2 <= m_out:
                    b += p_ins * 0.25 * pri[j - 1, y[consumed + 1]] * beta[j, ci]
            beta[j - 1, c] = b
            tot += b
        if tot <= 0.0:
            return beta, scale, False
        for c in range(width):
            beta[j - 1, c] /= tot
        scale[j - 1] = tot
    return beta, scale, True


@njit(cache=True)
def _posteriors(alpha, beta, pri, y, p_ins, p_del, p_sub, lo, width, m_out):  # pragma: no cover
    n = pri.shape[0]
    post = np.zeros((n, 4))
    p_tr = 1.0 - p_ins - p_del
    third = p_sub / 3.0
    for j in range(n):
        r = lo[j] - lo[j + 1]
        for c in range(width):
            consumed = j + c + lo[j]
            if consumed < 0 or consumed > m_out:
                continue
            av = alpha[j, c]
            if av == 0.0:
                continue
            cd = c + r - 1
            if 0 <= cd < width:
                w = av * p_del * beta[j + 1, cd]
                if w > 0.0:
                    for a in range(4):
                        post[j, a] += w * pri[j, a]
            if consumed + 1 <= m_out:
                ct = c + r
                if 0 <= ct < width:
                    obs = y[consumed]
                    w = av * p_tr * beta[j + 1, ct]
                    if w > 0.0:
                        for a in range(4):
                            f = 1.0 - p_sub if a == obs else third
                            post[j, a] += w * pri[j, a] * f
                ci = c + r + 1
                if 0 <= ci < width and consumed + 2 <= m_out:
                    tru = y[consumed + 1]
                    w = av * p_ins * 0.25 * beta[j + 1, ci]
                    if w > 0.0:
                        post[j, tru] += w * pri[j, tru]
        tot = post[j, 0] + post[j, 1] + post[j, 2] + post[j, 3]
        if tot <= 0.0:
            return post, False
        for a in range(4):
            post[j, a] /= tot
    return post, True


@dataclass
class DriftLattice:
    """Forward/backward coefficients over the banded drift lattice.

    Row j of alpha/beta covers drifts offsets[j] .. offsets[j] + width - 1;
    the band follows the straight line from drift 0 to the final drift.
    """

    offsets: np.ndarray  # (len(x)+1,) lowest drift per row
    width: int
    alpha: np.ndarray
    beta: np.ndarray
    fwd_scale: np.ndarray
    bwd_scale: np.ndarray

    @property
    def d_min(self) -> int:
        return int(self.offsets.min())

    @property
    def d_max(self) -> int:
        return int(self.offsets.max()) + self.width - 1


@dataclass
class FbResult:
    position_posteriors: np.ndarray  # (len(x), 4), includes marker positions
    symbol_posteriors: np.ndarray  # (n/2, 4), info symbols only
    lattice: Optional[DriftLattice] = None


def lattice_posteriors(
    y,
    priors: np.ndarray,
    params: ChannelParams,
    config: LatticeConfig = LatticeConfig(),
    keep_lattice: bool = False,
):
    """Per-position symbol posteriors P(x_j = a | y) for arbitrary priors.

    Returns (posteriors (N, 4), DriftLattice or None).  Raises DecodeFailure
    when the received length cannot be explained or the lattice loses all
    probability mass.
    """
    y = np.ascontiguousarray(np.asarray(y, dtype=np.int64))
    priors = np.ascontiguousarray(np.asarray(priors, dtype=np.float64))
    if priors.ndim != 2 or priors.shape[1] != ALPHABET_SIZE:
        raise ValueError(f"priors must be (N, {ALPHABET_SIZE}), got {priors.shape}")
    n_in = priors.shape[0]
    m_out = y.size
    if n_in == 0:
        if m_out:
            raise DecodeFailure("received symbols for an empty input")
        return np.empty((0, ALPHABET_SIZE)), None
    drift = m_out - n_in
    zt = np.ascontiguousarray(alignment_table(priors, params.p_sub))

    if config.prune:
        b = drift_halfwidth(n_in, params, config.window_scale)
        if abs(drift - n_in * (params.p_ins - params.p_del)) > b:
            raise DecodeFailure(f"final drift {drift} outside +/-{b} of expectation")
        line = np.rint(np.arange(n_in + 1) * (drift / n_in)).astype(np.int64)
        lo = np.ascontiguousarray(line - b)
        width = 2 * b + 1
    else:
        lo = np.full(n_in + 1, -n_in, dtype=np.int64)
        width = n_in + m_out + 1
    alpha, fsc, ok = _forward(
        zt, priors, y, params.p_ins, params.p_del, lo, width, m_out
    )
    if not ok:
        raise DecodeFailure("forward recursion lost all mass")
    args = (priors, y, params.p_ins, params.p_del, lo, width, m_out)
    beta, bsc, ok = _backward(zt, *args)
    if not ok:
        raise DecodeFailure("backward recursion lost all mass")
    post, ok = _posteriors(
        alpha, beta, priors, y, params.p_ins, params.p_del, params.p_sub, lo, width, m_out
    )
    if not ok:
        raise DecodeFailure("zero posterior mass at some position")
    lattice = DriftLattice(lo, width, alpha, beta, fsc, bsc) if keep_lattice else None
    return post, lattice


def fb_decode_full(
    y,
    layout: CodewordLayout,
    priors: np.ndarray,
    params: ChannelParams,
    config: LatticeConfig = LatticeConfig(),
    keep_lattice: bool = False,
) -> FbResult:
    """Run the forward-backward pass and return posteriors at every level."""
    if priors.shape != (layout.length, ALPHABET_SIZE):
        raise ValueError(
            f"priors must be ({layout.length}, {ALPHABET_SIZE}), got {priors.shape}"
        )
    post, lattice = lattice_posteriors(y, priors, params, config, keep_lattice)
    return FbResult(post, _symbol_rows(layout, post), lattice)


def fb_decode(
    y,
    layout: CodewordLayout,
    priors: Optional[np.ndarray] = None,
    params: ChannelParams = ChannelParams(),
    config: LatticeConfig = LatticeConfig(),
) -> np.ndarray:
    """Posterior matrix (one row per info symbol) for a received vector."""
    if priors is None:
        priors = priors_from_layout(layout)
    return fb_decode_full(y, layout, priors, params, config).symbol_posteriors


def bit_posteriors(layout: CodewordLayout, position_posteriors: np.ndarray) -> np.ndarray:
    """P(u_b = 1 | y) for every info bit, from per-position posteriors.

    The high/low marginal sums are valid for half-marker carriers too, since
    the two values inconsistent with the fixed bit hold zero mass there.
    """
    rows = position_posteriors[layout.bit_pos]
    p_high = rows[:, 2] + rows[:, 3]
    p_low = rows[:, 1] + rows[:, 3]
    return np.where(layout.bit_is_high, p_high, p_low)


def _symbol_rows(layout: CodewordLayout, position_posteriors: np.ndarray) -> np.ndarray:
    """Assemble per-info-symbol posterior rows.

    Data-carried symbols copy their position row.  Symbols whose bits ride
    two half-marker positions get the product of the two bit marginals,
    which preserves both marginals.
    """
    n_syms = layout.n_syms
    rows = np.empty((n_syms, ALPHABET_SIZE))
    d = layout.kind == ROLE_DATA
    rows[layout.info_sym[d]] = position_posteriors[np.nonzero(d)[0]]

    carried = np.zeros(n_syms, dtype=bool)
    carried[layout.info_sym[d]] = True
    split = np.nonzero(~carried)[0]
    if split.size:
        p1 = bit_posteriors(layout, position_posteriors)
        h1 = p1[2 * split]
        l1 = p1[2 * split + 1]
        rows[split, 0] = (1.0 - h1) * (1.0 - l1)
        rows[split, 1] = (1.0 - h1) * l1
        rows[split, 2] = h1 * (1.0 - l1)
        rows[split, 3] = h1 * l1
    return rows


def posteriors_to_llrs(
    symbol_posteriors: np.ndarray,
    apriori_llrs=None,
    mode: str = APOSTERIORI,
    llr_max: float = LLR_MAX,
) -> np.ndarray:
    """Bit LLRs log(P1/P0) from a posterior matrix, clipped to +/-llr_max.

    In extrinsic mode the a priori LLRs are subtracted before clipping.
    """
    if mode not in (APOSTERIORI, EXTRINSIC):
        raise ValueError(f"unknown mode {mode!r}")
    rho = np.asarray(symbol_posteriors, dtype=np.float64)
    p1 = np.empty(2 * rho.shape[0])
    p0 = np.empty_like(p1)
    p1[0::2] = rho[:, 2] + rho[:, 3]
    p1[1::2] = rho[:, 1] + rho[:, 3]
    p0[0::2] = rho[:, 0] + rho[:, 1]
    p0[1::2] = rho[:, 0] + rho[:, 2]
    with np.errstate(divide="ignore"):
        llrs = np.log(p1) - np.log(p0)
    if mode == EXTRINSIC:
        if apriori_llrs is None:
            raise ValueError("extrinsic mode needs the a priori LLRs")
        llrs = llrs - np.asarray(apriori_llrs, dtype=np.float64)
    return np.clip(llrs, -llr_max, llr_max)
