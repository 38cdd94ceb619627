"""Deterministic random generation: "tsape-rng v1".

Every random decision the harness makes (stratified sampling, gaussian and
uniform replacement values, synthetic data) flows through the generator
defined here, so that runs are reproducible bit-for-bit across machines and
across reimplementations in other languages. The full algorithm:

Stream
    splitmix64 (Steele, Lea & Flood 2014). 64-bit state. Each draw adds the
    constant 0x9E3779B97F4A7C15 to the state and scrambles the result:

        z  = state
        z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9   (mod 2^64)
        z ^= z >> 27;  z *= 0x94D049BB133111EB   (mod 2^64)
        z ^= z >> 31

Uniform double in [0, 1)
    (next_u64() >> 11) * 2**-53

Uniform double in (0, 1]
    ((next_u64() >> 11) + 1) * 2**-53

Gaussian
    Box-Muller, cosine branch only; consumes exactly two 64-bit draws:
        u1 in (0,1], u2 in [0,1)
        z = sqrt(-2*ln(u1)) * cos(2*pi*u2)

Bounded integer in [0, n)
    Rejection sampling: draw 64-bit words until one falls below the largest
    multiple of n, then reduce modulo n. Unbiased.

Substream derivation
    A per-instance seed is the first splitmix64 output of a stream seeded
    with (global_seed XOR fnv1a64(utf8(instance_id))), where fnv1a64 is the
    64-bit FNV-1a hash (offset basis 0xCBF29CE484222325, prime
    0x100000001B3).

Any change to the above is a new generator version, not a revision of v1.
"""

from __future__ import annotations

import math

RNG_VERSION = "tsape-rng v1"

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_FNV_BASIS = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

_TWO_NEG53 = 2.0 ** -53


class SplitMix64:
    """The tsape-rng v1 stream. See module docstring for the algorithm."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def next_double(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * _TWO_NEG53

    def next_gauss(self) -> float:
        """Standard normal draw; consumes exactly two 64-bit words."""
        u1 = ((self.next_u64() >> 11) + 1) * _TWO_NEG53
        u2 = (self.next_u64() >> 11) * _TWO_NEG53
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def below(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError(f"below() requires n >= 1, got {n}")
        threshold = ((1 << 64) // n) * n
        while True:
            u = self.next_u64()
            if u < threshold:
                return u % n


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = _FNV_BASIS
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def derive_seed(global_seed: int, instance_id: object) -> int:
    """Per-instance substream seed; see module docstring.

    The instance id participates via its string form, so integer and string
    ids that print identically derive identical seeds.
    """
    mixed = (global_seed & _MASK64) ^ fnv1a64(str(instance_id).encode("utf-8"))
    return SplitMix64(mixed).next_u64()
