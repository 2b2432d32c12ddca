"""Secret-key extraction and the key-confirmation handshake.

Key extraction is a sign quantizer with a guard band: the 2N^2 real
samples of a channel estimate (real parts of the column-major entries,
then imaginary parts) are kept where their magnitude clears a threshold,
and each kept sample contributes one sign bit. Alice publishes which
indices she kept; Bob quantizes exactly those positions of his own
estimate, so matching keys certify that the two estimates agree sample by
sample up to noise.

The handshake then proves key equality without revealing the keys:

    Alice: r random, x = a XOR r            -> Bob
    Bob:   r' = x XOR b, y = h(r') XOR b    -> Alice
    Alice: pass iff h(r) == y XOR a

``h`` must be an invertible map with no fixed points whose XOR-difference
structure defeats accidental cancellation: the verdict passes for unequal
keys (difference d = a XOR b) only when h(r) XOR h(r XOR d) == d. The map
used here is a Galois-LFSR step (an invertible linear map L with L + I
also invertible, guaranteed by using the feedback polynomial
x^M + x + 1, which is nonzero at both 0 and 1) followed by a constant XOR
and a two-point swap that removes the single fixed point every affine map
has. The linear core makes h(v) XOR v almost a bijection, so false passes
exist only at the two swapped points: two (r, d) pairs out of
2^M (2^M - 1), versus a constant-fraction failure rate for arithmetic
maps such as v + 1 mod 2^M (whose top bit commutes with XOR and passes
for all r whenever d is the top bit alone).
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

from .channel import ChannelStatistics
from .errors import InsufficientEntropyError, ParameterError
from .rng import RngStream

__all__ = [
    "SecretKey",
    "KeyConfTranscript",
    "extract_key",
    "extract_key_at",
    "h_map",
    "h_map_inverse",
    "challenge",
    "respond",
    "verify",
    "key_confirmation_round",
]


@dataclass(frozen=True)
class SecretKey:
    """An M-bit key; bits[0] is the most significant bit."""

    bits: Tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) < 1:
            raise ParameterError("key must have at least one bit")
        if any(b not in (0, 1) for b in self.bits):
            raise ParameterError("key bits must be 0 or 1")

    @property
    def m(self) -> int:
        return len(self.bits)

    def to_int(self) -> int:
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value

    @classmethod
    def from_int(cls, value: int, m: int) -> "SecretKey":
        if not 0 <= value < (1 << m):
            raise ParameterError(f"value does not fit in {m} bits")
        return cls(tuple((value >> (m - 1 - i)) & 1 for i in range(m)))

    def to_hex(self) -> str:
        """Hex with the most significant nibble first, zero padded."""
        return _hex_bits(self.to_int(), self.m)


def _hex_bits(value: int, m: int) -> str:
    return format(value, f"0{(m + 3) // 4}x")


@dataclass(frozen=True)
class KeyConfTranscript:
    """All messages of one handshake round plus the verdict."""

    m: int
    r: int
    x: int
    y: int
    verdict: bool

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "r": _hex_bits(self.r, self.m),
            "x": _hex_bits(self.x, self.m),
            "y": _hex_bits(self.y, self.m),
            "verdict": "pass" if self.verdict else "fail",
        }


# ---------------------------------------------------------------------------
# Guard-band sign quantizer


def _real_samples(estimate) -> np.ndarray:
    est = np.asarray(estimate, dtype=complex)
    return np.concatenate([est.real.flatten(order="F"),
                           est.imag.flatten(order="F")])


def extract_key(estimate, stats: ChannelStatistics, delta: float,
                target_m: int, rng: Optional[RngStream] = None):
    """Quantize an estimate into a key and the kept-index disclosure.

    A sample v is kept iff |v| > delta * sqrt((sigma_h2 + gamma) / 2),
    i.e. the guard band is measured in per-component standard deviations
    of an honest estimate. Kept samples map to bit 1 when positive. The
    key is the first min(target_m, kept) bits, and the returned index
    list (the positions actually used) is what gets disclosed publicly.

    ``rng`` is accepted for interface uniformity with the other sampling
    operations; the quantizer itself is deterministic.
    """
    if delta < 0:
        raise ParameterError(f"delta must be >= 0, got {delta}")
    if target_m < 1:
        raise ParameterError(f"target_m must be >= 1, got {target_m}")
    samples = _real_samples(estimate)
    threshold = delta * np.sqrt((stats.sigma_h2 + stats.gamma) / 2.0)
    kept = np.flatnonzero(np.abs(samples) > threshold)
    if kept.size == 0:
        raise InsufficientEntropyError(
            f"no samples exceed the guard band (delta={delta})"
        )
    used = kept[: min(target_m, kept.size)]
    bits = tuple(int(samples[i] > 0) for i in used)
    return SecretKey(bits), [int(i) for i in used]


def extract_key_at(estimate, stats: ChannelStatistics,
                   indices: Sequence[int], target_m: int) -> SecretKey:
    """Sign-quantize exactly the disclosed sample positions (no guard)."""
    samples = _real_samples(estimate)
    if len(indices) < 1:
        raise ParameterError("indices must be non-empty")
    used = list(indices)[: min(target_m, len(indices))]
    for i in used:
        if not 0 <= i < samples.size:
            raise ParameterError(
                f"index {i} out of range for {samples.size} samples"
            )
    return SecretKey(tuple(int(samples[i] > 0) for i in used))


# ---------------------------------------------------------------------------
# The mapped-response function h


def _lfsr_step(v: int, m: int) -> int:
    """One Galois-LFSR step with feedback polynomial x^m + x + 1."""
    top = (v >> (m - 1)) & 1
    v = (v << 1) & ((1 << m) - 1)
    return v ^ (0b11 if top else 0)


def _lfsr_step_inverse(u: int, m: int) -> int:
    top = u & 1  # the feedback taps include bit 0, which the shift left zeroed
    if top:
        u ^= 0b11
    return (u >> 1) | (top << (m - 1))


@lru_cache(maxsize=None)
def _swap_points(m: int) -> Tuple[int, int]:
    """Fixed point v* of v -> step(v) ^ 1, and its swap partner v* ^ 1.

    Solves (L + I) v = 1 over GF(2) by Gaussian elimination on the m x m
    bit matrix of the map v -> step(v) ^ v.
    """
    cols = [(_lfsr_step(1 << j, m) ^ (1 << j)) for j in range(m)]
    rows = []
    for i in range(m):
        row = 0
        for j in range(m):
            row |= ((cols[j] >> i) & 1) << j
        rows.append(row)
    rhs = [1 if i == 0 else 0 for i in range(m)]  # constant term e = 1
    # Forward elimination with partial pivoting over GF(2).
    pivot_col_of_row = [-1] * m
    r = 0
    for c in range(m):
        pivot = next((i for i in range(r, m) if (rows[i] >> c) & 1), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        rhs[r], rhs[pivot] = rhs[pivot], rhs[r]
        for i in range(m):
            if i != r and (rows[i] >> c) & 1:
                rows[i] ^= rows[r]
                rhs[i] ^= rhs[r]
        pivot_col_of_row[r] = c
        r += 1
    v_star = 0
    for i in range(m):
        c = pivot_col_of_row[i]
        if c < 0:
            if rhs[i]:
                raise ParameterError(
                    f"no fixed point exists at m={m}; map construction broke"
                )
            continue
        v_star |= rhs[i] << c
    return v_star, v_star ^ 1


def h_map(v: int, m: int) -> int:
    """Invertible, fixed-point-free response map on m-bit values.

    For m >= 2: one LFSR step, XOR 1, then swap the two outputs at the
    affine map's unique fixed point and its neighbour, which removes the
    fixed point while perturbing the difference structure at only two
    inputs. For m == 1 the only fixed-point-free bijection is the bit flip.
    """
    if m < 1:
        raise ParameterError(f"m must be >= 1, got {m}")
    if not 0 <= v < (1 << m):
        raise ParameterError(f"value does not fit in {m} bits")
    if m == 1:
        return v ^ 1
    v_star, partner = _swap_points(m)
    if v == v_star:
        return _lfsr_step(partner, m) ^ 1
    if v == partner:
        return v_star
    return _lfsr_step(v, m) ^ 1


def h_map_inverse(u: int, m: int) -> int:
    """Inverse of :func:`h_map`."""
    if m < 1:
        raise ParameterError(f"m must be >= 1, got {m}")
    if not 0 <= u < (1 << m):
        raise ParameterError(f"value does not fit in {m} bits")
    if m == 1:
        return u ^ 1
    v_star, partner = _swap_points(m)
    if u == v_star:
        return partner
    if u == _lfsr_step(partner, m) ^ 1:
        return v_star
    return _lfsr_step_inverse(u ^ 1, m)


# ---------------------------------------------------------------------------
# Handshake


def challenge(a: SecretKey, rng: RngStream):
    """Alice's opening move: random r, one-time-pad ciphertext x."""
    gen = rng.generator()
    bits = gen.integers(0, 2, size=a.m)
    r = 0
    for b in bits:
        r = (r << 1) | int(b)
    x = a.to_int() ^ r
    return r, x


def respond(b: SecretKey, x: int) -> int:
    """Bob's reply: decrypt with his key, map, re-encrypt."""
    if not 0 <= x < (1 << b.m):
        raise ParameterError(f"x does not fit in {b.m} bits")
    r_prime = x ^ b.to_int()
    return h_map(r_prime, b.m) ^ b.to_int()


def verify(a: SecretKey, r: int, y: int) -> bool:
    """Alice's check: pass iff h(r) equals the decrypted response."""
    if not 0 <= y < (1 << a.m):
        raise ParameterError(f"y does not fit in {a.m} bits")
    if not 0 <= r < (1 << a.m):
        raise ParameterError(f"r does not fit in {a.m} bits")
    return h_map(r, a.m) == (y ^ a.to_int())


def key_confirmation_round(a: SecretKey, b: SecretKey,
                           rng: RngStream) -> KeyConfTranscript:
    """Run one full handshake and record every message."""
    if a.m != b.m:
        raise ParameterError(f"key lengths differ: {a.m} vs {b.m}")
    r, x = challenge(a, rng)
    y = respond(b, x)
    return KeyConfTranscript(m=a.m, r=r, x=x, y=y,
                             verdict=verify(a, r, y))
