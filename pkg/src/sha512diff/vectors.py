"""Builtin colliding pairs, their path constants, and the hex block format.

Block files hold sixteen hex words separated by whitespace. Each word has
1-16 hex digits and may carry a ``0x`` prefix. Serialization writes four
lowercase 16-digit words per line. Lines starting with ``#`` are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional

from .core import BLOCK_WORDS, MASK64, STANDARD_IV, MessageBlock, RegisterState
from .difftrace import compute_difference


class BlockParseError(ValueError):
    """Malformed block text. ``index`` is the offending token, or ``None`` for arity errors."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class PathConstants:
    target_steps: int
    delta2: int
    alpha: int
    lam: int
    mu: int
    gamma: int
    delta1: Optional[int] = None

    def items(self):
        out = [] if self.delta1 is None else [("delta1", self.delta1)]
        out += [("delta2", self.delta2), ("alpha", self.alpha), ("lambda", self.lam),
                ("mu", self.mu), ("gamma", self.gamma)]
        return out


@dataclass(frozen=True)
class BuiltinVector:
    name: str
    steps: int
    block_a: MessageBlock
    block_b: MessageBlock
    constants: PathConstants
    iv: RegisterState = STANDARD_IV


CONSTANTS_23 = PathConstants(
    target_steps=23,
    delta2=0x600000000237,
    alpha=0x7201B90F9F8DF85E,
    lam=0x3E000007FFDC9,
    mu=0x43FFFFF800001,
    gamma=0x1,
)

CONSTANTS_24 = PathConstants(
    target_steps=24,
    delta1=0x200000000008,
    delta2=0x600000000237,
    alpha=0x7201B90F9F8DF85E,
    lam=0x3E000007FFDC9,
    mu=0x45FFFFF800009,
    gamma=0x1,
)

_TABLE1_A = """
b9fa6fc4729ca55c 8718310e1b3590e1 1d3d530cb075b721 99166b30ecbdd705
27ed55b66c090b62 754b2163ff6feec5 6685f40fd8ab08f8 590c1c0522f6fdfd
b947bb4013b688c1 d9d72ca8ab1cac04 69d0e120220d4edc 30a2e93aeef24e3f
84e76299718478b9 f11ae711647763e5 d621d2687946e862 0ee57069123ecc8b
"""
_TABLE1_B = """
b9fa6fc4729ca55c 8718310e1b3590e1 1d3d530cb075b721 99166b30ecbdd705
27ed55b66c090b62 754b2163ff6feec5 6685f40fd8ab08f8 590c1c0522f6fdfd
b947bb4013b688c2 d9d72ca8ab1cac03 69d0e120220d4edc 30a3493aeef25076
84e76299718478b9 f11ae711647763e5 d621d2687946e862 0ee57069123ecc8b
"""
_TABLE2_A = """
dedb689cfc766965 c7b8e064ff720f7c c136883560348c9c 3747df7d0cf47678
855e17555cfedc5f 88566babccaa63e9 5dda9777938b73cd b17b00574a4e4216
86f3ff48fd12ea19 cd15c6f8d6da38ce 5e2c6b7b0411e70b 36ed67e93a794e66
1b65e96b02767821 04d0950089db6c68 5bc9b9673e38eff3 b05d879ad024d3fa
"""
_TABLE2_B = """
dedb689cfc766965 c7b8e064ff720f7c c136883560348c9c 3747df7d0cf47678
855e17555cfedc5f 88566babccaa63e9 5dda9777938b73cd b17b00574a4e4216
86f3ff48fd12ea19 cd15c6f8d6da38ce 5e2c6b7b0411e70c 36ed67e93a794e65
1b66096b02767829 04d0f50089db6e9f 5bc9b9673e38eff3 b05d879ad024d3fa
"""

_HEX_TOKEN = re.compile(r"(?:0[xX])?([0-9a-fA-F]{1,16})")


def parse_block(text: str) -> MessageBlock:
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    if len(tokens) != BLOCK_WORDS:
        raise BlockParseError(f"expected {BLOCK_WORDS} hex words, found {len(tokens)}")
    words = []
    for i, tok in enumerate(tokens):
        m = _HEX_TOKEN.fullmatch(tok)
        if m is None:
            raise BlockParseError(f"token {i} is not a 64-bit hex word: {tok!r}", i)
        words.append(int(m.group(1), 16))
    return MessageBlock(tuple(words))


def serialize_block(block: MessageBlock) -> str:
    lines = []
    for row in range(0, BLOCK_WORDS, 4):
        lines.append(" ".join(f"{w:016x}" for w in block.words[row:row + 4]))
    return "\n".join(lines) + "\n"


BUILTINS: Dict[str, BuiltinVector] = {
    "table1": BuiltinVector("table1", 23, parse_block(_TABLE1_A), parse_block(_TABLE1_B), CONSTANTS_23),
    "table2": BuiltinVector("table2", 24, parse_block(_TABLE2_A), parse_block(_TABLE2_B), CONSTANTS_24),
}


def builtin(name: str) -> BuiltinVector:
    try:
        return BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown builtin vector {name!r}; known: {', '.join(BUILTINS)}") from None


@dataclass(frozen=True)
class Check:
    name: str
    expected: int
    actual: int

    @property
    def passed(self) -> bool:
        return self.expected == self.actual


@dataclass(frozen=True)
class ConstantsReport:
    vector: str
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> List[str]:
        out = []
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            out.append(f"{mark} {self.vector} {c.name}: expected {c.expected:#x}, got {c.actual:#x}")
        return out


def check_constants(v: BuiltinVector) -> ConstantsReport:
    """Compare the message-word differences of ``v`` with its path constants.

    The perturbation word carries ``+gamma`` and the next word ``-gamma``.
    With ``delta1`` present (24 steps) the perturbation sits at word 10 and is
    followed by ``delta1`` at 12 and ``delta2`` at 13; otherwise it sits at
    word 8 and ``delta2`` lands at 11.
    """
    c = v.constants
    diff = compute_difference(v.block_a, v.block_b)
    neg_gamma = (-c.gamma) & MASK64
    if c.delta1 is None:
        expect = [("W8 = +gamma", 8, c.gamma), ("W9 = -gamma", 9, neg_gamma),
                  ("W11 = delta2", 11, c.delta2)]
    else:
        expect = [("W10 = +gamma", 10, c.gamma), ("W11 = -gamma", 11, neg_gamma),
                  ("W12 = delta1", 12, c.delta1), ("W13 = delta2", 13, c.delta2)]
    checks = tuple(Check(name, value, diff[i]) for name, i, value in expect)
    return ConstantsReport(v.name, checks)
