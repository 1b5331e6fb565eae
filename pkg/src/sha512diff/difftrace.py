"""Lockstep differential traces over the step-reduced compression function."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, Mapping, Optional, Sequence, Tuple, Union

from .core import (
    BLOCK_WORDS,
    MASK64,
    Digest,
    MessageBlock,
    RegisterState,
    check_steps,
    expand_words,
    feed_forward,
    run_steps,
)

REGISTERS = "abcdefgh"


def signed(x: int) -> int:
    """Two's-complement reading of a 64-bit word, e.g. ``2**64 - 1 -> -1``."""
    return x - (1 << 64) if x >> 63 else x


def format_diff(x: int) -> str:
    """Raw hex plus signed shorthand when the word is negative."""
    if x >> 63:
        return f"{x:#x} ({signed(x)})"
    return f"{x:#x}"


@dataclass(frozen=True)
class DifferencePattern:
    """Sparse additive differences on message words, stored without zero entries."""

    entries: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        items = self.entries.items() if isinstance(self.entries, Mapping) else self.entries
        clean: Dict[int, int] = {}
        for index, value in items:
            index = int(index)
            if not 0 <= index < BLOCK_WORDS:
                raise ValueError(f"word index out of range: {index}")
            value = int(value) & MASK64
            if value:
                clean[index] = value
        object.__setattr__(self, "entries", tuple(sorted(clean.items())))

    @classmethod
    def of(cls, mapping: Mapping[int, int]) -> "DifferencePattern":
        return cls(tuple(mapping.items()))

    def __getitem__(self, index: int) -> int:
        return dict(self.entries).get(index, 0)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[int]:
        return (i for i, _ in self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def items(self) -> Tuple[Tuple[int, int], ...]:
        return self.entries

    def as_dict(self) -> Dict[int, int]:
        return dict(self.entries)

    def indices(self) -> Tuple[int, ...]:
        return tuple(i for i, _ in self.entries)


PatternLike = Union[DifferencePattern, Mapping[int, int]]


def as_pattern(p: PatternLike) -> DifferencePattern:
    return p if isinstance(p, DifferencePattern) else DifferencePattern.of(p)


@dataclass(frozen=True)
class StepRecord:
    """Paired state after ``index`` rounds; ``w_a``/``w_b`` are the words consumed to reach it."""

    index: int
    w_a: Optional[int]
    w_b: Optional[int]
    state_a: RegisterState
    state_b: RegisterState
    mod_diff: Tuple[int, ...]
    xor_diff: Tuple[int, ...]

    @property
    def zero(self) -> bool:
        return not any(self.mod_diff)


@dataclass(frozen=True)
class DifferentialTrace:
    steps: int
    records: Tuple[StepRecord, ...]
    digests: Tuple[Digest, Digest]
    collided: bool


def compute_difference(a: MessageBlock, b: MessageBlock) -> DifferencePattern:
    """Word-wise ``b - a`` modulo 2^64."""
    return DifferencePattern(tuple((i, (y - x) & MASK64) for i, (x, y) in enumerate(zip(a, b))))


def apply_difference(a: MessageBlock, p: PatternLike) -> MessageBlock:
    d = as_pattern(p).as_dict()
    return MessageBlock(tuple((w + d.get(i, 0)) & MASK64 for i, w in enumerate(a)))


def run_pair(iv: Sequence[int], a: MessageBlock, b: MessageBlock, steps: int) -> DifferentialTrace:
    """Run ``a`` and ``b`` side by side from the same chaining value."""
    check_steps(steps)
    iv = RegisterState(*iv)
    wa = expand_words(a.words, steps)
    wb = expand_words(b.words, steps)
    states_a = run_steps(iv, wa)
    states_b = run_steps(iv, wb)
    records = []
    for i, (sa, sb) in enumerate(zip(states_a, states_b)):
        records.append(StepRecord(
            index=i,
            w_a=wa[i - 1] if i else None,
            w_b=wb[i - 1] if i else None,
            state_a=sa,
            state_b=sb,
            mod_diff=tuple((y - x) & MASK64 for x, y in zip(sa, sb)),
            xor_diff=tuple(x ^ y for x, y in zip(sa, sb)),
        ))
    da = feed_forward(iv, states_a[-1])
    db = feed_forward(iv, states_b[-1])
    return DifferentialTrace(steps, tuple(records), (da, db), da == db)


def schedule_difference(a: MessageBlock, b: MessageBlock, steps: int) -> list:
    check_steps(steps)
    wa = expand_words(a.words, steps)
    wb = expand_words(b.words, steps)
    return [(y - x) & MASK64 for x, y in zip(wa, wb)]


def first_divergence(trace: DifferentialTrace) -> Optional[int]:
    """Index of the first round whose output registers differ, or ``None``.

    Round ``j`` produces record ``j + 1``, so a pair that first differs in
    ``W_8`` diverges at round 8.
    """
    for rec in trace.records:
        if not rec.zero:
            return rec.index - 1 if rec.index else 0
    return None


def last_divergence(trace: DifferentialTrace) -> Optional[int]:
    """Index of the last round whose output registers differ, or ``None``."""
    for rec in reversed(trace.records):
        if not rec.zero:
            return rec.index - 1 if rec.index else 0
    return None


def find_word(trace: DifferentialTrace, value: int) -> list:
    """Locate ``value`` among traced registers and schedule words.

    Returns ``(record index, location)`` pairs. Locations are ``"a.e"``
    (run, register), ``"diff.e"`` for a modular difference matching either
    sign, or ``"w_a"``/``"w_b"`` for the consumed schedule word.
    """
    hits = []
    for rec in trace.records:
        for run, state in (("a", rec.state_a), ("b", rec.state_b)):
            for reg, x in zip(REGISTERS, state):
                if x == value:
                    hits.append((rec.index, f"{run}.{reg}"))
        for reg, x in zip(REGISTERS, rec.mod_diff):
            if x == value or x == (-value) & MASK64:
                hits.append((rec.index, f"diff.{reg}"))
        for name, w in (("w_a", rec.w_a), ("w_b", rec.w_b)):
            if w == value:
                hits.append((rec.index, name))
    return hits

