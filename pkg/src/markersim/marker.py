"""Standard-marker and half-marker code layouts and encoding.

A (period, pattern) standard marker code prepends the fixed pattern of
marker symbols to every block of data symbols.  The half-marker variant
replaces each run of N_m marker symbols by 2*N_m half-marker symbols:
the high bit of each is a fixed synchronization bit (the pattern bits in
order) and the low bit carries one information bit, so every period still
moves period - N_m information symbols.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .alphabet import bits_to_symbols, symbol_high_bit, symbol_low_bit

STANDARD = "standard"
HALF = "half"

# per-position roles in a codeword layout
ROLE_MARKER = 0
ROLE_HALF = 1
ROLE_DATA = 2

# which bit of a half-marker symbol is the fixed one
FIXED_HIGH = 0
FIXED_LOW = 1


@dataclass(frozen=True)
class MarkerSpec:
    """A (period, pattern) marker code description.

    pattern: marker symbols (tuple of ints 0..3), length N_m.
    period:  symbols per period, N_p.
    mode:    STANDARD or HALF.
    """

    pattern: tuple
    period: int
    mode: str = STANDARD

    def __post_init__(self):
        object.__setattr__(self, "pattern", tuple(int(v) for v in self.pattern))
        if len(self.pattern) < 1:
            raise ValueError("marker pattern must contain at least one symbol")
        if any(v < 0 or v > 3 for v in self.pattern):
            raise ValueError("marker symbols must be in 0..3")
        if self.mode not in (STANDARD, HALF):
            raise ValueError(f"mode must be {STANDARD!r} or {HALF!r}")
        n_m = len(self.pattern)
        if self.mode == STANDARD and not self.period > n_m:
            raise ValueError(f"standard mode requires period > {n_m}")
        if self.mode == HALF and not self.period >= 2 * n_m:
            raise ValueError(f"half mode requires period >= {2 * n_m}")

    @property
    def marker_len(self) -> int:
        return len(self.pattern)

    @property
    def data_per_period(self) -> int:
        return self.period - self.marker_len

    @property
    def pattern_bits(self) -> tuple:
        """Pattern bits in order: (b1, b1', b2, b2', ...)."""
        out = []
        for sym in self.pattern:
            out.append(symbol_high_bit(sym))
            out.append(symbol_low_bit(sym))
        return tuple(out)

    def rate(self) -> Fraction:
        """Information symbols per codeword symbol (asymptotic per-period rate)."""
        return Fraction(self.data_per_period, self.period)


def rate(spec: MarkerSpec) -> Fraction:
    return spec.rate()


@dataclass
class CodewordLayout:
    """Per-position role map of one codeword.

    Arrays are indexed by codeword position.  Positions are one of:
    marker (both bits fixed), half-marker (one fixed bit + one info bit),
    or data (two info bits = one info symbol).
    """

    spec: MarkerSpec
    n_bits: int
    kind: np.ndarray          # int8, ROLE_* per position
    marker_value: np.ndarray  # int8, symbol value at marker positions, else -1
    fixed_bit: np.ndarray     # int8, fixed bit value at half positions, else -1
    fixed_place: np.ndarray   # int8, FIXED_HIGH/FIXED_LOW at half positions, else -1
    info_bit: np.ndarray      # int32, info bit index at half positions, else -1
    info_sym: np.ndarray      # int32, info symbol index at data positions, else -1
    full_periods: int
    tail_syms: int
    # per-bit carrier map: position holding bit b, and whether it sits in the
    # high half of that position's symbol
    bit_pos: np.ndarray = field(default=None, repr=False)
    bit_is_high: np.ndarray = field(default=None, repr=False)

    @property
    def length(self) -> int:
        return self.kind.size

    @property
    def n_syms(self) -> int:
        return self.n_bits // 2

    def __post_init__(self):
        self._build_bit_map()
        self._check_coverage()

    def _build_bit_map(self):
        pos = np.full(self.n_bits, -1, dtype=np.int32)
        high = np.zeros(self.n_bits, dtype=bool)
        for j in range(self.length):
            k = self.kind[j]
            if k == ROLE_DATA:
                i = self.info_sym[j]
                pos[2 * i] = j
                high[2 * i] = True
                pos[2 * i + 1] = j
                high[2 * i + 1] = False
            elif k == ROLE_HALF:
                b = self.info_bit[j]
                pos[b] = j
                high[b] = self.fixed_place[j] == FIXED_LOW
        self.bit_pos = pos
        self.bit_is_high = high

    def _check_coverage(self):
        if np.any(self.bit_pos < 0):
            raise ValueError("layout does not place every information bit exactly once")
        counts = np.zeros(self.length, dtype=np.int32)
        np.add.at(counts, self.bit_pos, 1)
        if np.any(counts[self.kind == ROLE_DATA] != 2) or np.any(counts[self.kind == ROLE_HALF] != 1):
            raise ValueError("layout places an information bit more than once")

    def extract_bits(self, x) -> np.ndarray:
        """Read the information bits back out of a codeword (inverse of encode)."""
        x = np.asarray(x, dtype=np.int8)
        if x.size != self.length:
            raise ValueError(f"codeword length {x.size} != layout length {self.length}")
        carriers = x[self.bit_pos]
        return np.where(self.bit_is_high, carriers >> 1, carriers & 1).astype(np.int8)


def build_layout(spec: MarkerSpec, n_bits: int) -> CodewordLayout:
    """Expand a marker spec into the role map for an n_bits-bit message.

    n_bits/2 = K * data_per_period + r with 0 <= r < data_per_period; each of
    the K periods has the full marker run followed by data symbols.  A
    nonzero tail carries the remaining r info symbols: standard mode appends
    (pattern, r data symbols); half mode packs them into 2r half-marker
    symbols when r <= N_m, else a full half-marker run plus r - N_m data
    symbols.
    """
    if n_bits < 0 or n_bits % 2 != 0:
        raise ValueError(f"information length must be even and nonnegative, got {n_bits}")
    n_syms = n_bits // 2
    n_m = spec.marker_len
    n_d = spec.data_per_period
    full, r = divmod(n_syms, n_d)

    kinds, markers, fixed, places, ibits, isyms = [], [], [], [], [], []

    def put(kind, marker=-1, fb=-1, place=-1, ib=-1, isym=-1):
        kinds.append(kind)
        markers.append(marker)
        fixed.append(fb)
        places.append(place)
        ibits.append(ib)
        isyms.append(isym)

    def put_marker_run():
        for sym in spec.pattern:
            put(ROLE_MARKER, marker=sym)

    def put_half_run(first_bit: int, n_half_syms: int):
        bits = spec.pattern_bits
        for t in range(n_half_syms):
            put(ROLE_HALF, fb=bits[t], place=FIXED_HIGH, ib=first_bit + t)

    def put_data(first_sym: int, count: int):
        for t in range(count):
            put(ROLE_DATA, isym=first_sym + t)

    for k in range(full):
        if spec.mode == STANDARD:
            put_marker_run()
            put_data(k * n_d, n_d)
        else:
            put_half_run(2 * k * n_d, 2 * n_m)
            put_data(k * n_d + n_m, n_d - n_m)

    if r:
        if spec.mode == STANDARD:
            put_marker_run()
            put_data(full * n_d, r)
        elif r <= n_m:
            put_half_run(2 * full * n_d, 2 * r)
        else:
            put_half_run(2 * full * n_d, 2 * n_m)
            put_data(full * n_d + n_m, r - n_m)

    return CodewordLayout(
        spec=spec,
        n_bits=n_bits,
        kind=np.array(kinds, dtype=np.int8),
        marker_value=np.array(markers, dtype=np.int8),
        fixed_bit=np.array(fixed, dtype=np.int8),
        fixed_place=np.array(places, dtype=np.int8),
        info_bit=np.array(ibits, dtype=np.int32),
        info_sym=np.array(isyms, dtype=np.int32),
        full_periods=full,
        tail_syms=r,
    )


def encode(u, layout: CodewordLayout) -> np.ndarray:
    """Fill a layout with the information bits of u, producing the codeword."""
    u = np.asarray(u, dtype=np.int8)
    if u.size != layout.n_bits:
        raise ValueError(f"message length {u.size} != layout message length {layout.n_bits}")
    x = np.empty(layout.length, dtype=np.int8)

    m = layout.kind == ROLE_MARKER
    x[m] = layout.marker_value[m]

    h = layout.kind == ROLE_HALF
    if np.any(h):
        info = u[layout.info_bit[h]]
        fb = layout.fixed_bit[h]
        hi = np.where(layout.fixed_place[h] == FIXED_HIGH, fb, info)
        lo = np.where(layout.fixed_place[h] == FIXED_HIGH, info, fb)
        x[h] = 2 * hi + lo

    d = layout.kind == ROLE_DATA
    if np.any(d):
        s = bits_to_symbols(u)
        x[d] = s[layout.info_sym[d]]
    return x
