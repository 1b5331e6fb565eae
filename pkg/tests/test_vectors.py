import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sha512diff.core import MASK64, STANDARD_IV, MessageBlock
from sha512diff.difftrace import run_pair
from sha512diff.vectors import (
    BlockParseError,
    builtin,
    check_constants,
    parse_block,
    serialize_block,
)

blocks = st.lists(st.integers(0, MASK64), min_size=16, max_size=16).map(lambda w: MessageBlock(tuple(w)))


def test_builtin_words(table1, table2):
    assert table1.block_a[0] == 0xB9FA6FC4729CA55C
    assert table2.block_a[0] == 0xDEDB689CFC766965
    assert table1.block_a[8] == 0xB947BB4013B688C1
    assert table1.block_b[8] == 0xB947BB4013B688C2
    assert table2.block_b[12] == 0x1B66096B02767829
    assert (table1.steps, table2.steps) == (23, 24)
    assert table1.iv == STANDARD_IV == table2.iv


def test_builtin_constants(table1, table2):
    c = table1.constants
    assert c.delta1 is None
    assert (c.delta2, c.alpha, c.lam, c.mu, c.gamma) == (
        0x600000000237, 0x7201B90F9F8DF85E, 0x3E000007FFDC9, 0x43FFFFF800001, 1)
    c = table2.constants
    assert (c.delta1, c.delta2, c.alpha, c.lam, c.mu, c.gamma) == (
        0x200000000008, 0x600000000237, 0x7201B90F9F8DF85E, 0x3E000007FFDC9, 0x45FFFFF800009, 1)


def test_unknown_builtin():
    with pytest.raises(KeyError):
        builtin("table3")


@pytest.mark.parametrize("name", ["table1", "table2"])
def test_builtins_collide(name):
    v = builtin(name)
    assert run_pair(v.iv, v.block_a, v.block_b, v.steps).collided


def test_parse_zeros():
    assert parse_block(" ".join(["0"] * 16)) == MessageBlock.zero()


def test_parse_accepts_prefix_and_case():
    text = "0xAB " + " ".join(["0X1"] * 14) + " ffffffffffffffff"
    b = parse_block(text)
    assert b[0] == 0xAB and b[1] == 1 and b[15] == MASK64


def test_parse_arity():
    with pytest.raises(BlockParseError) as exc:
        parse_block(" ".join(["0"] * 15))
    assert exc.value.index is None


@pytest.mark.parametrize("bad,index", [("xyz", 3), ("1" * 17, 3), ("0x", 3), ("-1", 3)])
def test_parse_bad_token(bad, index):
    tokens = ["0"] * 16
    tokens[index] = bad
    with pytest.raises(BlockParseError) as exc:
        parse_block(" ".join(tokens))
    assert exc.value.index == index


def test_serialize_zero():
    text = serialize_block(MessageBlock.zero())
    assert text.split() == ["0000000000000000"] * 16
    assert len(text.splitlines()) == 4


def test_serialize_table2(table2):
    tokens = serialize_block(table2.block_b).split()
    assert tokens[12] == "1b66096b02767829"
    assert tokens[13] == "04d0f50089db6e9f"
    assert parse_block(serialize_block(table2.block_b)) == table2.block_b


def test_table1_round_trip(table1):
    assert parse_block(serialize_block(table1.block_a)) == table1.block_a


@given(blocks)
def test_serialize_parse_round_trip(b):
    assert parse_block(serialize_block(b)) == b


@pytest.mark.parametrize("name", ["table1", "table2"])
def test_check_constants_pass(name):
    report = check_constants(builtin(name))
    assert report.ok
    assert len(report.checks) == (3 if name == "table1" else 4)


def test_check_constants_fail_on_identical(table1, table2):
    for v in (table1, table2):
        bad = dataclasses.replace(v, block_b=v.block_a)
        report = check_constants(bad)
        assert not any(c.passed for c in report.checks)
        assert all(line.startswith("FAIL") for line in report.lines())
