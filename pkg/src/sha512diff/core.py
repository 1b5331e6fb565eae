"""Step-reduced SHA-512 compression function and message schedule.

Rounds are counted from zero: an ``n``-step computation applies rounds
``0 .. n-1`` with schedule words ``W_0 .. W_{n-1}`` and round constants
``K_0 .. K_{n-1}``. Padding, the feed-forward and the 512-bit output are those
of standard SHA-512; only the number of rounds changes.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Sequence, Tuple

MASK64 = 0xFFFFFFFFFFFFFFFF
MAX_STEPS = 80
BLOCK_WORDS = 16
BLOCK_BYTES = 128

# FIPS 180-4 round constants K_0..K_79.
K512: Tuple[int, ...] = (
    0x428A2F98D728AE22, 0x7137449123EF65CD, 0xB5C0FBCFEC4D3B2F, 0xE9B5DBA58189DBBC,
    0x3956C25BF348B538, 0x59F111F1B605D019, 0x923F82A4AF194F9B, 0xAB1C5ED5DA6D8118,
    0xD807AA98A3030242, 0x12835B0145706FBE, 0x243185BE4EE4B28C, 0x550C7DC3D5FFB4E2,
    0x72BE5D74F27B896F, 0x80DEB1FE3B1696B1, 0x9BDC06A725C71235, 0xC19BF174CF692694,
    0xE49B69C19EF14AD2, 0xEFBE4786384F25E3, 0x0FC19DC68B8CD5B5, 0x240CA1CC77AC9C65,
    0x2DE92C6F592B0275, 0x4A7484AA6EA6E483, 0x5CB0A9DCBD41FBD4, 0x76F988DA831153B5,
    0x983E5152EE66DFAB, 0xA831C66D2DB43210, 0xB00327C898FB213F, 0xBF597FC7BEEF0EE4,
    0xC6E00BF33DA88FC2, 0xD5A79147930AA725, 0x06CA6351E003826F, 0x142929670A0E6E70,
    0x27B70A8546D22FFC, 0x2E1B21385C26C926, 0x4D2C6DFC5AC42AED, 0x53380D139D95B3DF,
    0x650A73548BAF63DE, 0x766A0ABB3C77B2A8, 0x81C2C92E47EDAEE6, 0x92722C851482353B,
    0xA2BFE8A14CF10364, 0xA81A664BBC423001, 0xC24B8B70D0F89791, 0xC76C51A30654BE30,
    0xD192E819D6EF5218, 0xD69906245565A910, 0xF40E35855771202A, 0x106AA07032BBD1B8,
    0x19A4C116B8D2D0C8, 0x1E376C085141AB53, 0x2748774CDF8EEB99, 0x34B0BCB5E19B48A8,
    0x391C0CB3C5C95A63, 0x4ED8AA4AE3418ACB, 0x5B9CCA4F7763E373, 0x682E6FF3D6B2B8A3,
    0x748F82EE5DEFB2FC, 0x78A5636F43172F60, 0x84C87814A1F0AB72, 0x8CC702081A6439EC,
    0x90BEFFFA23631E28, 0xA4506CEBDE82BDE9, 0xBEF9A3F7B2C67915, 0xC67178F2E372532B,
    0xCA273ECEEA26619C, 0xD186B8C721C0C207, 0xEADA7DD6CDE0EB1E, 0xF57D4F7FEE6ED178,
    0x06F067AA72176FBA, 0x0A637DC5A2C898A6, 0x113F9804BEF90DAE, 0x1B710B35131C471B,
    0x28DB77F523047D84, 0x32CAAB7B40C72493, 0x3C9EBE0A15C9BEBC, 0x431D67C49C100D4C,
    0x4CC5D4BECB3E42B6, 0x597F299CFC657E2A, 0x5FCB6FAB3AD6FAEC, 0x6C44198C4A475817,
)

_IV_WORDS: Tuple[int, ...] = (
    0x6A09E667F3BCC908, 0xBB67AE8584CAA73B, 0x3C6EF372FE94F82B, 0xA54FF53A5F1D36F1,
    0x510E527FADE682D1, 0x9B05688C2B3E6C1F, 0x1F83D9ABFB41BD6B, 0x5BE0CD19137E2179,
)


class StepRangeError(ValueError):
    """Raised when a step count lies outside ``0 .. 80``."""


class RegisterState(NamedTuple):
    """The eight working registers at a step boundary."""

    a: int
    b: int
    c: int
    d: int
    e: int
    f: int
    g: int
    h: int

    def hex(self) -> str:
        return " ".join(f"{x:016x}" for x in self)


class Digest(NamedTuple):
    """Feed-forward output of the compression function (eight 64-bit words)."""

    h0: int
    h1: int
    h2: int
    h3: int
    h4: int
    h5: int
    h6: int
    h7: int

    def to_bytes(self) -> bytes:
        return struct.pack(">8Q", *self)

    def hex(self) -> str:
        return self.to_bytes().hex()


STANDARD_IV = RegisterState(*_IV_WORDS)


@dataclass(frozen=True)
class MessageBlock:
    """One 1024-bit block as sixteen big-endian 64-bit words."""

    words: Tuple[int, ...]

    def __post_init__(self) -> None:
        words = tuple(int(w) for w in self.words)
        if len(words) != BLOCK_WORDS:
            raise ValueError(f"a block has {BLOCK_WORDS} words, got {len(words)}")
        for i, w in enumerate(words):
            if not 0 <= w <= MASK64:
                raise ValueError(f"word {i} is not a 64-bit value: {w:#x}")
        object.__setattr__(self, "words", words)

    def __getitem__(self, i: int) -> int:
        return self.words[i]

    def __iter__(self):
        return iter(self.words)

    def __len__(self) -> int:
        return BLOCK_WORDS

    @classmethod
    def zero(cls) -> "MessageBlock":
        return cls((0,) * BLOCK_WORDS)

    @classmethod
    def from_bytes(cls, data: bytes) -> "MessageBlock":
        if len(data) != BLOCK_BYTES:
            raise ValueError(f"a block is {BLOCK_BYTES} bytes, got {len(data)}")
        return cls(struct.unpack(">16Q", data))

    def to_bytes(self) -> bytes:
        return struct.pack(">16Q", *self.words)


def check_steps(steps: int) -> int:
    if isinstance(steps, bool) or not isinstance(steps, int):
        raise StepRangeError(f"step count must be an integer, got {steps!r}")
    if not 0 <= steps <= MAX_STEPS:
        raise StepRangeError(f"step count must be in 0..{MAX_STEPS}, got {steps}")
    return steps


def rotr(x: int, n: int) -> int:
    return ((x >> n) | (x << (64 - n))) & MASK64


def big_sigma0(x: int) -> int:
    return rotr(x, 28) ^ rotr(x, 34) ^ rotr(x, 39)


def big_sigma1(x: int) -> int:
    return rotr(x, 14) ^ rotr(x, 18) ^ rotr(x, 41)


def small_sigma0(x: int) -> int:
    return rotr(x, 1) ^ rotr(x, 8) ^ (x >> 7)


def small_sigma1(x: int) -> int:
    return rotr(x, 19) ^ rotr(x, 61) ^ (x >> 6)


def ch(x: int, y: int, z: int) -> int:
    return (x & y) ^ (~x & z & MASK64)


def maj(x: int, y: int, z: int) -> int:
    return (x & y) ^ (x & z) ^ (y & z)


def schedule_word(w: Sequence[int], i: int) -> int:
    """``W_i`` for ``i >= 16`` given ``w[i-16 .. i-1]``."""
    return (small_sigma1(w[i - 2]) + w[i - 7] + small_sigma0(w[i - 15]) + w[i - 16]) & MASK64


def expand_words(words: Sequence[int], steps: int) -> List[int]:
    w = list(words)
    for i in range(BLOCK_WORDS, steps):
        w.append(schedule_word(w, i))
    return w[:steps]


def expand_schedule(block: MessageBlock, steps: int) -> List[int]:
    """Return the schedule words ``W_0 .. W_{steps-1}``."""
    check_steps(steps)
    return expand_words(block.words, steps)


def step_tuple(state: Sequence[int], w: int, k: int) -> Tuple[int, ...]:
    a, b, c, d, e, f, g, h = state
    t1 = (h + big_sigma1(e) + ((e & f) ^ (~e & g & MASK64)) + k + w) & MASK64
    t2 = (big_sigma0(a) + ((a & b) ^ (a & c) ^ (b & c))) & MASK64
    return ((t1 + t2) & MASK64, a, b, c, (d + t1) & MASK64, e, f, g)


def step(state: RegisterState, w: int, k: int) -> RegisterState:
    """Apply one SHA-512 round to ``state`` with schedule word ``w`` and constant ``k``."""
    return RegisterState(*step_tuple(state, w, k))


def run_steps(iv: Sequence[int], schedule: Sequence[int]) -> List[RegisterState]:
    """States before round 0 and after every round, ``len(schedule) + 1`` entries."""
    states = [RegisterState(*iv)]
    s = tuple(iv)
    for i, w in enumerate(schedule):
        s = step_tuple(s, w, K512[i])
        states.append(RegisterState(*s))
    return states


def feed_forward(iv: Sequence[int], state: Sequence[int]) -> Digest:
    return Digest(*((x + y) & MASK64 for x, y in zip(iv, state)))


def compress(iv: Sequence[int], block: MessageBlock, steps: int) -> Digest:
    """Step-reduced compression with Davies-Meyer feed-forward."""
    check_steps(steps)
    s = tuple(iv)
    for i, w in enumerate(expand_words(block.words, steps)):
        s = step_tuple(s, w, K512[i])
    return feed_forward(iv, s)


def pad_message(message: bytes) -> bytes:
    """Standard SHA-512 padding with a 128-bit length field."""
    bit_len = (len(message) * 8) & ((1 << 128) - 1)
    zeros = (BLOCK_BYTES - 17 - len(message)) % BLOCK_BYTES
    return message + b"\x80" + b"\x00" * zeros + bit_len.to_bytes(16, "big")


def iter_blocks(data: bytes) -> Iterable[MessageBlock]:
    for off in range(0, len(data), BLOCK_BYTES):
        yield MessageBlock.from_bytes(data[off:off + BLOCK_BYTES])


def digest_message(message: bytes, steps: int = MAX_STEPS,
                   iv: Sequence[int] = STANDARD_IV) -> Digest:
    """Hash ``message`` with every block compressed using ``steps`` rounds."""
    check_steps(steps)
    chaining: Sequence[int] = tuple(iv)
    for block in iter_blocks(pad_message(bytes(message))):
        chaining = compress(chaining, block, steps)
    return Digest(*chaining)


def _icbrt(n: int) -> int:
    x = 1 << ((n.bit_length() + 2) // 3)
    while True:
        y = (2 * x + n // (x * x)) // 3
        if y >= x:
            break
        x = y
    while x * x * x > n:
        x -= 1
    while (x + 1) ** 3 <= n:
        x += 1
    return x


def _first_primes(n: int) -> List[int]:
    primes: List[int] = []
    c = 2
    while len(primes) < n:
        if all(c % p for p in primes if p * p <= c):
            primes.append(c)
        c += 1
    return primes


def self_test() -> None:
    """Recompute the IV and round constants from primes and compare with the tables."""
    primes = _first_primes(MAX_STEPS)
    k = tuple(_icbrt(p << 192) & MASK64 for p in primes)
    iv = tuple(math.isqrt(p << 128) & MASK64 for p in primes[:8])
    if k != K512 or iv != _IV_WORDS:
        raise RuntimeError("embedded SHA-512 constants are corrupt")


self_test()
