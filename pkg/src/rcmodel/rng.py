"""Counter-based random numbers keyed by (seed, stream, counter, lane).

Every variate is a pure function of its key, so any draw can be regenerated
on demand without storing a history. This is what coupling from the past
needs: the update used at time -m must be identical every time the chain is
restarted from further in the past.

The mixing function is the SplitMix64 finalizer applied once per key word.
All arithmetic is on uint64 arrays, where numpy wraps silently.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_STREAM_MULT = np.uint64(0xD1B54A32D192ED03)
_COUNTER_MULT = np.uint64(0x8CB92BA72F3D8DD7)
_LANE_MULT = np.uint64(0xAEF17502108EF2D9)
_MASK64 = (1 << 64) - 1


def _mix(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        x = x + _GOLDEN
        x = (x ^ (x >> np.uint64(30))) * _M1
        x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


def _as_u64(v) -> np.ndarray:
    a = np.asarray(v)
    if a.dtype.kind == "i" and np.any(a < 0):
        raise ValueError("keys must be non-negative")
    if a.dtype == object or a.dtype.kind not in "iu":
        a = np.asarray(np.vectorize(lambda t: int(t) & _MASK64, otypes=[np.uint64])(a))
    return a.astype(np.uint64)


def keyed_bits(seed: int, stream, counter, lane: int = 0) -> np.ndarray:
    """64 pseudo-random bits per key; broadcasts over ``stream`` and ``counter``."""
    s = np.asarray(np.uint64(int(seed) & _MASK64))
    with np.errstate(over="ignore"):
        x = _mix(s)
        x = _mix(x ^ (_as_u64(stream) * _STREAM_MULT))
        x = _mix(x ^ (_as_u64(counter) * _COUNTER_MULT))
        x = _mix(x ^ (np.uint64(lane) * _LANE_MULT))
    return x


def keyed_uniform(seed: int, stream, counter, lane: int = 0) -> np.ndarray:
    """Uniform doubles on [0, 1) with 53 bits of resolution."""
    bits = keyed_bits(seed, stream, counter, lane)
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def keyed_index(seed: int, stream, counter, n: int, lane: int = 1) -> np.ndarray:
    """Integers uniform on {0, ..., n-1} (multiply-shift, bias below 2**-53 * n)."""
    u = keyed_uniform(seed, stream, counter, lane)
    return np.minimum((u * n).astype(np.int64), n - 1)


def generator(seed: int, stream: int = 0) -> np.random.Generator:
    """A numpy Generator whose state is derived from ``(seed, stream)``.

    Used for the sequential samplers (Swendsen-Wang, Poisson graphs) where
    per-draw addressability is not needed.
    """
    w = keyed_bits(seed, stream, np.arange(2, dtype=np.uint64), lane=7)
    return np.random.Generator(np.random.Philox(key=(int(w[0]) << 64) | int(w[1])))
