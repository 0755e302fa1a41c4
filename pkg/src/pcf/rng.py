"""Counter-based 64-bit PRNG with documented mixing, for bit-exact replay.

Every random quantity in a simulation run is a pure function of
(master_seed, star_level, iteration_index, draw_index), so records never
depend on execution order or worker count.  The construction, fixed for
all time:

  mix64(z)   the splitmix64 finalizer:
                 z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9   (mod 2**64)
                 z ^= z >> 27;  z *= 0x94D049BB133111EB   (mod 2**64)
                 z ^= z >> 31
  seed       iteration_seed(m, star, i) = mix64(m + star*TIER_SALT + i*GAMMA)
  word j     raw64(seed, j) = mix64(seed + (j+1)*GAMMA)        (j >= 0)
  uniforms   open:   ((word >> 11) + 1) * 2**-53   in (0, 1]
             closed: (word >> 11) * 2**-53         in [0, 1)
  normal k   Box-Muller from words 2k and 2k+1:
                 sqrt(-2*ln(open_k)) * cos(2*pi*closed_k)

All additions and multiplications are modulo 2**64.  The open-interval
uniform feeds the logarithm, so Box-Muller never sees zero.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15  # 2**64 / golden ratio, odd
TIER_SALT = 0xD1342543DE82EF95  # odd constant separating tier streams

_U64 = np.uint64
_TWO_NEG53 = 2.0 ** -53


def mix64(z: np.ndarray) -> np.ndarray:
    """Splitmix64 finalizer over a uint64 array."""
    z = z ^ (z >> _U64(30))
    z = z * _U64(0xBF58476D1CE4E5B9)
    z = z ^ (z >> _U64(27))
    z = z * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


def iteration_seeds(master_seed: int, star_level: int, indices: np.ndarray) -> np.ndarray:
    """Per-iteration stream seeds for a contiguous block of indices."""
    base = (master_seed + star_level * TIER_SALT) & MASK64
    pre = _U64(base) + indices.astype(np.uint64) * _U64(GAMMA)
    return mix64(pre)


def raw64(seeds: np.ndarray, draw: int) -> np.ndarray:
    """The draw-th 64-bit word of every stream in ``seeds``."""
    offset = ((draw + 1) * GAMMA) & MASK64
    return mix64(seeds + _U64(offset))


def uniform_open(words: np.ndarray) -> np.ndarray:
    """Map 64-bit words to (0, 1]."""
    return ((words >> _U64(11)).astype(np.float64) + 1.0) * _TWO_NEG53


def uniform_closed(words: np.ndarray) -> np.ndarray:
    """Map 64-bit words to [0, 1)."""
    return (words >> _U64(11)).astype(np.float64) * _TWO_NEG53


def normals(seeds: np.ndarray, draw: int) -> np.ndarray:
    """Standard normal draw number ``draw`` for every stream in ``seeds``."""
    u1 = uniform_open(raw64(seeds, 2 * draw))
    u2 = uniform_closed(raw64(seeds, 2 * draw + 1))
    return np.sqrt(-2.0 * np.log(u1)) * np.cos((2.0 * math.pi) * u2)


# --- scalar reference path (pure Python integers) ----------------------

def mix64_scalar(z: int) -> int:
    z &= MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def iteration_seed_scalar(master_seed: int, star_level: int, index: int) -> int:
    return mix64_scalar(master_seed + star_level * TIER_SALT + index * GAMMA)


def raw64_scalar(seed: int, draw: int) -> int:
    return mix64_scalar(seed + (draw + 1) * GAMMA)


def normal_scalar(seed: int, draw: int) -> float:
    u1 = ((raw64_scalar(seed, 2 * draw) >> 11) + 1) * _TWO_NEG53
    u2 = (raw64_scalar(seed, 2 * draw + 1) >> 11) * _TWO_NEG53
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def subsample_indices(n: int, size: int, seed: int) -> np.ndarray:
    """Deterministic subsample: the ``size`` indices with smallest keyed hash.

    key(i) = mix64(seed + (i+1)*GAMMA); ascending index order in the result.
    """
    if size >= n:
        return np.arange(n, dtype=np.int64)
    idx = np.arange(n, dtype=np.uint64)
    keys = mix64(_U64(seed & MASK64) + (idx + _U64(1)) * _U64(GAMMA))
    chosen = np.argpartition(keys, size)[:size]
    return np.sort(chosen).astype(np.int64)
