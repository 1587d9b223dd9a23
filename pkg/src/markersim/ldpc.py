"""Regular Gallager LDPC codes: construction, encoding, sum-product decoding.

The parity-check matrix is built from w_c bands of (n-k)/w_c rows each; the
first band partitions the columns into consecutive blocks of w_r, the others
are column permutations of it.  Band matrices are rank-deficient by
construction (each band's rows sum to all-ones), so the encoder dimension is
n - rank(H) and the message rides the non-pivot columns of the reduced
matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from numba import njit

BP_LLR_MAX = 25.0
_TANH_CLAMP = 1.0 - 1e-12


def gf2_rref(mat: np.ndarray):
    """Reduced row echelon form over GF(2).

    Returns (rref, pivot column indices).  Input is not modified.
    """
    r = np.array(mat, dtype=np.uint8) & 1
    rows, cols = r.shape
    pivots = []
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        sub = np.nonzero(r[rank:, c])[0]
        if sub.size == 0:
            continue
        p = rank + sub[0]
        if p != rank:
            r[[rank, p]] = r[[p, rank]]
        hit = np.nonzero(r[:, c])[0]
        hit = hit[hit != rank]
        r[hit] ^= r[rank]
        pivots.append(c)
        rank += 1
    return r, np.array(pivots, dtype=np.int64)


@dataclass(frozen=True)
class LdpcCode:
    """An (n, k) regular code with its systematic encoder.

    `h` is the full (n-k) x n parity-check matrix used for decoding,
    dependent rows included.  The message occupies `free_cols`; pivot
    columns are filled as `enc @ message` (mod 2).
    """

    h: np.ndarray
    w_c: int
    w_r: int
    rank: int
    pivot_cols: np.ndarray
    free_cols: np.ndarray
    enc: np.ndarray

    @property
    def n(self) -> int:
        return self.h.shape[1]

    @property
    def m(self) -> int:
        return self.h.shape[0]

    @property
    def k_eff(self) -> int:
        return self.n - self.rank

    def __post_init__(self):
        object.__setattr__(self, "h", np.ascontiguousarray(self.h, dtype=np.uint8))
        self.h.setflags(write=False)


def _encoder_from_h(h: np.ndarray):
    rref, pivots = gf2_rref(h)
    rank = pivots.size
    free = np.setdiff1d(np.arange(h.shape[1]), pivots)
    enc = np.ascontiguousarray(rref[:rank][:, free])
    return rank, pivots, free, enc


def _count_four_cycles(h: np.ndarray) -> int:
    g = h.astype(np.int32) @ h.T.astype(np.int32)
    return int(np.count_nonzero(np.triu(g, 1) >= 2))


def _sample_banded(n: int, m: int, w_c: int, w_r: int, rng) -> np.ndarray:
    """One draw from the band-of-permutations ensemble (needs w_c | m)."""
    band_rows = m // w_c
    base = np.zeros((band_rows, n), dtype=np.uint8)
    for i in range(band_rows):
        base[i, i * w_r : (i + 1) * w_r] = 1
    h = np.empty((m, n), dtype=np.uint8)
    h[:band_rows] = base
    for b in range(1, w_c):
        h[b * band_rows : (b + 1) * band_rows] = base[:, rng.permutation(n)]
    return h


def _sample_matched(n: int, m: int, w_c: int, w_r: int, rng):
    """One draw by stub matching; None when a double edge lands somewhere."""
    v_stubs = rng.permutation(np.repeat(np.arange(n), w_c))
    c_stubs = np.repeat(np.arange(m), w_r)
    h = np.zeros((m, n), dtype=np.uint8)
    h[c_stubs, v_stubs] = 1
    if int(h.sum()) != n * w_c:
        return None
    return h


def gallager_construct(
    n: int,
    k: int,
    w_c: int,
    w_r: int,
    rng: Union[int, np.random.Generator],
    max_attempts: int = 200,
) -> LdpcCode:
    """Sample a regular Gallager parity-check matrix and build its encoder.

    Base rows split the columns into disjoint blocks of w_r; the remaining
    bands are column permutations of that base.  Parameter sets whose band
    shape does not divide evenly fall back to uniform stub matching, which
    samples the same (w_c, w_r)-regular ensemble without the band structure.
    Either way the draw is resampled up to `max_attempts` times, keeping the
    one with the fewest length-4 cycles (row pairs sharing two or more
    columns); zero such pairs stops the search early.
    """
    m = n - k
    if w_c < 2:
        raise ValueError("column weight must be at least 2")
    if m < 1 or n * w_c != m * w_r:
        raise ValueError(
            f"incompatible parameters: need n*w_c == (n-k)*w_r, "
            f"got ({n}, {k}, {w_c}, {w_r})"
        )
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    banded = m % w_c == 0 and n % w_r == 0

    best = None
    best_cycles = -1
    for _ in range(max_attempts):
        if banded:
            h = _sample_banded(n, m, w_c, w_r, rng)
        else:
            h = _sample_matched(n, m, w_c, w_r, rng)
            if h is None:
                continue
        cycles = _count_four_cycles(h)
        if best is None or cycles < best_cycles:
            best, best_cycles = h, cycles
        if best_cycles == 0:
            break
    if best is None:
        raise ValueError(
            f"no regular matrix found for ({n}, {k}, {w_c}, {w_r}) "
            f"in {max_attempts} attempts"
        )

    rank, pivots, free, enc = _encoder_from_h(best)
    return LdpcCode(best, w_c, w_r, rank, pivots, free, enc)


def ldpc_encode(code: LdpcCode, message) -> np.ndarray:
    """Codeword (length n) with the message on the free columns."""
    message = np.asarray(message, dtype=np.uint8) & 1
    if message.shape != (code.k_eff,):
        raise ValueError(f"message must have length {code.k_eff}, got {message.shape}")
    c = np.zeros(code.n, dtype=np.uint8)
    c[code.free_cols] = message
    c[code.pivot_cols] = (code.enc @ message) & 1
    return c


def extract_message(code: LdpcCode, codeword) -> np.ndarray:
    return np.asarray(codeword, dtype=np.uint8)[code.free_cols]


def syndrome(code: LdpcCode, word) -> np.ndarray:
    return (code.h @ (np.asarray(word, dtype=np.uint8) & 1)) & 1


@dataclass
class BpResult:
    posterior_llrs: np.ndarray
    extrinsic_llrs: np.ndarray
    hard: np.ndarray
    syndrome_ok: bool
    iterations: int


@njit(cache=True)
def _bp_kernel(lch, edge_col, row_ptr, n_vars, max_iters, early_stop):  # pragma: no cover
    n_edges = edge_col.size
    n_rows = row_ptr.size - 1
    m_cv = np.zeros(n_edges)
    m_vc = np.empty(n_edges)
    post = lch.copy()
    t = np.empty(n_edges)
    iters = 0
    ok = False
    for _ in range(max_iters):
        iters += 1
        # variable to check: total minus own incoming message
        for e in range(n_edges):
            m_vc[e] = post[edge_col[e]] - m_cv[e]
        # check to variable via the tanh rule, prefix/suffix products per row
        for e in range(n_edges):
            v = np.tanh(0.5 * m_vc[e])
            if v > _TANH_CLAMP:
                v = _TANH_CLAMP
            elif v < -_TANH_CLAMP:
                v = -_TANH_CLAMP
            t[e] = v
        for r in range(n_rows):
            s, q = row_ptr[r], row_ptr[r + 1]
            acc = 1.0
            for e in range(s, q):
                m_cv[e] = acc
                acc *= t[e]
            acc = 1.0
            for e in range(q - 1, s - 1, -1):
                m_cv[e] *= acc
                acc *= t[e]
        for e in range(n_edges):
            v = m_cv[e]
            if v > _TANH_CLAMP:
                v = _TANH_CLAMP
            elif v < -_TANH_CLAMP:
                v = -_TANH_CLAMP
            m_cv[e] = 2.0 * np.arctanh(v)
        # posterior and syndrome
        for v in range(n_vars):
            post[v] = lch[v]
        for e in range(n_edges):
            post[edge_col[e]] += m_cv[e]
        ok = True
        for r in range(n_rows):
            par = 0
            for e in range(row_ptr[r], row_ptr[r + 1]):
                if post[edge_col[e]] < 0.0:
                    par ^= 1
            if par:
                ok = False
                break
        if ok and early_stop:
            break
    return post, iters, ok


def _edge_arrays(h: np.ndarray):
    rows, cols = np.nonzero(h)
    order = np.lexsort((cols, rows))
    edge_col = np.ascontiguousarray(cols[order].astype(np.int64))
    row_ptr = np.zeros(h.shape[0] + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=h.shape[0]), out=row_ptr[1:])
    return edge_col, row_ptr


def bp_decode(
    code: LdpcCode,
    channel_llrs,
    max_iters: int = 20,
    early_stop: bool = True,
    llr_max: float = BP_LLR_MAX,
) -> BpResult:
    """Flooding sum-product decoding.

    Channel LLRs follow the log(P1/P0) convention used everywhere else in
    the package; the kernel works in log(P0/P1), so signs flip at entry and
    exit.  Extrinsic output is posterior minus channel, both clipped.
    """
    lch = np.asarray(channel_llrs, dtype=np.float64)
    if lch.shape != (code.n,):
        raise ValueError(f"need {code.n} channel LLRs, got {lch.shape}")
    if not np.all(np.isfinite(lch)):
        raise ValueError("channel LLRs must be finite")
    edge_col, row_ptr = _edge_arrays(code.h)
    post_neg, iters, ok = _bp_kernel(
        np.ascontiguousarray(-lch), edge_col, row_ptr, code.n, max_iters, early_stop
    )
    post = np.clip(-post_neg, -llr_max, llr_max)
    hard = (post > 0).astype(np.uint8)
    return BpResult(
        posterior_llrs=post,
        extrinsic_llrs=np.clip(post - lch, -llr_max, llr_max),
        hard=hard,
        syndrome_ok=not np.any(syndrome(code, hard)),
        iterations=iters,
    )


def save_code(code: LdpcCode, path) -> None:
    """Write H as text: header "n m w_c w_r", then column indices per row."""
    with open(path, "w") as fh:
        fh.write(f"{code.n} {code.m} {code.w_c} {code.w_r}\n")
        for r in range(code.m):
            fh.write(" ".join(str(c) for c in np.nonzero(code.h[r])[0]) + "\n")


def load_code(path) -> LdpcCode:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4:
            raise ValueError(f"malformed header in {path}")
        n, m, w_c, w_r = (int(v) for v in header)
        h = np.zeros((m, n), dtype=np.uint8)
        for r in range(m):
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: expected {m} rows, found {r}")
            cols = np.array(line.split(), dtype=np.int64)
            if cols.size != w_r or np.any(cols < 0) or np.any(cols >= n):
                raise ValueError(f"{path}: bad row {r}")
            h[r, cols] = 1
    if np.any(h.sum(axis=0) != w_c):
        raise ValueError(f"{path}: column weights do not match header")
    rank, pivots, free, enc = _encoder_from_h(h)
    return LdpcCode(h, w_c, w_r, rank, pivots, free, enc)
