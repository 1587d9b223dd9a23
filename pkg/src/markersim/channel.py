"""4-ary insertion/deletion/substitution channel.

Per transmitted symbol, one of four mutually exclusive events occurs:

* insertion (prob p_ins): one uniformly random symbol is emitted, then the
  true symbol, unmodified;
* deletion (prob p_del): nothing is emitted;
* otherwise the symbol is transmitted and either substituted (prob p_sub,
  uniform over the three wrong values) or received correctly.

Note the substitution probability is conditioned on the symbol surviving,
so P(substituted) = (1 - p_ins - p_del) * p_sub.  Events are independent
across positions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .alphabet import ALPHABET_SIZE


@dataclass(frozen=True)
class ChannelParams:
    """Insertion, deletion, and substitution probabilities."""

    p_ins: float = 0.0
    p_del: float = 0.0
    p_sub: float = 0.0

    def __post_init__(self):
        for name in ("p_ins", "p_del", "p_sub"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.p_ins + self.p_del + self.p_sub > 1.0 + 1e-12:
            raise ValueError("p_ins + p_del + p_sub must not exceed 1")

    @property
    def mutation_rate(self) -> float:
        """Nominal per-symbol mutation rate p_ins + p_del + p_sub."""
        return self.p_ins + self.p_del + self.p_sub


@dataclass(frozen=True)
class RngSeed:
    """A (seed, stream) pair addressing one counter-based random stream.

    Distinct streams under the same seed are statistically independent and
    reproducible: the pair is used directly as the 128-bit Philox key.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.Philox(key=np.array([self.seed, self.stream], dtype=np.uint64))
        )


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngSeed):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"rng must be RngSeed or numpy Generator, got {type(rng)!r}")


def transmit(x, params: ChannelParams, rng) -> np.ndarray:
    """Push a symbol vector through the channel, returning the received vector.

    Per position, a single uniform draw is partitioned into the event
    intervals (insertion, deletion, substitution, clean); inserted symbol
    values and substitution offsets are drawn afterwards, in position order.
    """
    x = np.asarray(x, dtype=np.int8)
    gen = _as_generator(rng)
    n = x.size
    if n == 0:
        return x.copy()

    u = gen.random(n)
    t_ins = params.p_ins
    t_del = t_ins + params.p_del
    t_sub = t_del + (1.0 - params.p_ins - params.p_del) * params.p_sub
    ins = u < t_ins
    dele = (u >= t_ins) & (u < t_del)
    sub = (u >= t_del) & (u < t_sub)

    out_len = np.where(ins, 2, np.where(dele, 0, 1))
    starts = np.concatenate(([0], np.cumsum(out_len)))
    y = np.empty(starts[-1], dtype=np.int8)

    emit = ~dele
    true_pos = starts[:-1][emit] + ins[emit].astype(np.int64)
    y[true_pos] = x[emit]

    n_ins = int(np.count_nonzero(ins))
    if n_ins:
        y[starts[:-1][ins]] = gen.integers(0, ALPHABET_SIZE, n_ins, dtype=np.int8)
    n_sub = int(np.count_nonzero(sub))
    if n_sub:
        offs = gen.integers(1, ALPHABET_SIZE, n_sub, dtype=np.int8)
        y[starts[:-1][sub]] = (x[sub] + offs) % ALPHABET_SIZE
    return y


# work guard for the exhaustive output-distribution enumeration
_ENUMERATE_MAX_TERMS = 8_000_000


def deletion_pattern_enumerate(x, params: ChannelParams) -> dict:
    """Exact output distribution of the deletion/substitution channel.

    Enumerates every subset of deleted positions and, for the survivors,
    every substitution assignment, accumulating probabilities per output
    string.  Insertion-free only (p_ins must be 0).  The total term count
    (5^len for p_sub > 0) is capped, which in practice limits len(x) to
    about 9 with substitutions and 14 without.

    Returns a dict mapping output tuples to probabilities summing to 1.
    """
    x = np.asarray(x, dtype=np.int8)
    if params.p_ins != 0.0:
        raise ValueError("enumeration requires p_ins = 0")
    n = x.size
    terms = 5**n if params.p_sub > 0 else 2**n
    if terms > _ENUMERATE_MAX_TERMS:
        raise ValueError(f"input too long to enumerate ({terms} terms)")

    pd, ps = params.p_del, params.p_sub
    keep = (1.0 - pd) * (1.0 - ps)
    swap = (1.0 - pd) * ps / 3.0
    wrong = [[a for a in range(ALPHABET_SIZE) if a != v] for v in range(ALPHABET_SIZE)]

    dist: dict = {}
    for mask in range(2**n):
        survivors = [j for j in range(n) if not (mask >> j) & 1]
        p_pattern = pd ** (n - len(survivors))
        if ps == 0.0:
            out = tuple(int(x[j]) for j in survivors)
            p = p_pattern * (1.0 - pd) ** len(survivors)
            dist[out] = dist.get(out, 0.0) + p
            continue
        choices = [[(int(x[j]), keep)] + [(w, swap) for w in wrong[x[j]]] for j in survivors]
        for combo in itertools.product(*choices):
            out = tuple(v for v, _ in combo)
            p = p_pattern
            for _, f in combo:
                p *= f
            dist[out] = dist.get(out, 0.0) + p
    return dist
