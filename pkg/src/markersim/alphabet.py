"""4-ary alphabet, bit/symbol/base conversions.

Symbols are integers 0..3 encoding two bits: value = 2*high + low, so
0 = "00", 1 = "01", 2 = "10", 3 = "11".  Bit vectors and symbol vectors
are plain numpy integer arrays.
"""

from __future__ import annotations

import numpy as np

ALPHABET_SIZE = 4

#: default symbol -> DNA base assignment (00->A, 01->C, 10->G, 11->T)
DEFAULT_BASE_MAP = "ACGT"


def symbol_from_bits(high: int, low: int) -> int:
    return 2 * int(high) + int(low)


def symbol_high_bit(sym: int) -> int:
    return (int(sym) >> 1) & 1


def symbol_low_bit(sym: int) -> int:
    return int(sym) & 1


def symbol_str(sym: int) -> str:
    """Two-character bit string of a symbol, e.g. 2 -> "10"."""
    return f"{symbol_high_bit(sym)}{symbol_low_bit(sym)}"


def parse_symbols(pattern: str):
    """Parse a bit string of even length into a symbol array.

    "10" -> [2]; "0110" -> [1, 2].  Used for marker patterns in configs.
    """
    bits = pattern.strip()
    if len(bits) % 2 != 0 or any(c not in "01" for c in bits):
        raise ValueError(f"pattern must be an even-length bit string, got {pattern!r}")
    return np.array(
        [symbol_from_bits(int(bits[2 * i]), int(bits[2 * i + 1])) for i in range(len(bits) // 2)],
        dtype=np.int8,
    )


def bits_to_symbols(bits) -> np.ndarray:
    """Pack an even-length 0/1 vector into symbols, two bits per symbol.

    Bit 2i is the high bit of symbol i and bit 2i+1 the low bit.
    """
    u = np.asarray(bits, dtype=np.int8)
    if u.ndim != 1:
        raise ValueError("bits must be one-dimensional")
    if u.size % 2 != 0:
        raise ValueError(f"bit vector length must be even, got {u.size}")
    if u.size and not np.all((u == 0) | (u == 1)):
        raise ValueError("bits must be 0 or 1")
    return (2 * u[0::2] + u[1::2]).astype(np.int8)


def symbols_to_bits(symbols) -> np.ndarray:
    """Unpack symbols into a bit vector; inverse of :func:`bits_to_symbols`."""
    s = np.asarray(symbols, dtype=np.int8)
    if s.ndim != 1:
        raise ValueError("symbols must be one-dimensional")
    if s.size and not np.all((s >= 0) & (s < ALPHABET_SIZE)):
        raise ValueError("symbols must be in 0..3")
    out = np.empty(2 * s.size, dtype=np.int8)
    out[0::2] = s >> 1
    out[1::2] = s & 1
    return out


def symbols_to_bases(symbols, base_map: str = DEFAULT_BASE_MAP) -> str:
    """Map a symbol vector to a DNA base string through a 4-letter bijection."""
    if len(base_map) != 4 or len(set(base_map)) != 4:
        raise ValueError("base_map must assign four distinct bases")
    s = np.asarray(symbols, dtype=np.int8)
    return "".join(base_map[int(v)] for v in s)


def bases_to_symbols(strand: str, base_map: str = DEFAULT_BASE_MAP) -> np.ndarray:
    """Inverse of :func:`symbols_to_bases`."""
    if len(base_map) != 4 or len(set(base_map)) != 4:
        raise ValueError("base_map must assign four distinct bases")
    lookup = {b: i for i, b in enumerate(base_map)}
    try:
        return np.array([lookup[c] for c in strand], dtype=np.int8)
    except KeyError as exc:
        raise ValueError(f"unknown base {exc.args[0]!r}") from None
