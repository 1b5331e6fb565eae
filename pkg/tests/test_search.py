import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from sha512diff.core import MASK64, STANDARD_IV, MessageBlock, compress
from sha512diff.difftrace import DifferencePattern, compute_difference
from sha512diff.search import (
    CollisionCandidate,
    SearchConfig,
    SearchConfigError,
    estimate_throughput,
    parse_pattern,
    project_wall_time,
    run_search,
    sample_blocks,
    serialize_pattern,
    stats_records,
    verify_candidate,
)


def rerun_oracle(seed, worker, budget, steps, pattern, horizon, fixed=None):
    """Regenerate the sampled blocks straight from Philox and classify each attempt."""
    fixed = fixed or {}
    free = [i for i in range(16) if i not in fixed]
    raw = np.random.Philox(key=seed ^ worker).random_raw(budget * len(free)).tolist()
    hist, hits = {}, 0
    for n in range(budget):
        a = [fixed.get(i, 0) for i in range(16)]
        for j, i in enumerate(free):
            a[i] = raw[n * len(free) + j]
        b = [(w + pattern.get(i, 0)) % oracle.M for i, w in enumerate(a)]
        ra, rb = oracle.rounds(oracle.IV, a, steps), oracle.rounds(oracle.IV, b, steps)
        differs = [j for j in range(steps) if ra[j + 1] != rb[j + 1]]
        if ra[-1] == rb[-1]:
            hits += 1
            continue
        after = [j for j in differs if horizon is None or j > horizon]
        key = after[0]
        hist[key] = hist.get(key, 0) + 1
    return hist, hits


@pytest.fixture
def pattern1(table1):
    return compute_difference(table1.block_a, table1.block_b)


def test_trivial_window():
    cfg = SearchConfig(steps=8, pattern={8: 1}, budget=4, seed=3)
    cands, stats = run_search(cfg)
    assert stats.collisions_found == 4 == len(cands) == stats.attempts
    assert all(verify_candidate(c) for c in cands)


def test_rediscover_table1(table1, pattern1):
    cfg = SearchConfig(steps=23, pattern=pattern1, budget=1, fixed_words=dict(enumerate(table1.block_a)))
    cands, stats = run_search(cfg)
    assert len(cands) == 1
    assert cands[0].block_a == table1.block_a and cands[0].block_b == table1.block_b
    assert cands[0].digest == compress(STANDARD_IV, table1.block_a, 23)


@pytest.mark.parametrize("horizon,expected", [(None, {8: 1024}), (15, {16: 1024})])
def test_histogram_matches_rerun_oracle(pattern1, horizon, expected):
    cfg = SearchConfig(steps=23, pattern=pattern1, budget=1024, seed=1, abort_horizon=horizon)
    cands, stats = run_search(cfg)
    assert not cands
    hist, hits = rerun_oracle(1, 0, 1024, 23, pattern1.as_dict(), horizon)
    assert hits == 0
    assert stats.abort_histogram == hist == expected


@pytest.mark.parametrize("free,expected_hits", [(15, 64), (14, 0)])
def test_histogram_with_partial_fixing(table1, pattern1, free, expected_hits):
    # W15 is consumed after the state difference has collapsed into h, so it is free;
    # W14 feeds round 14 while the difference is still live.
    fixed = {i: w for i, w in enumerate(table1.block_a) if i != free}
    cfg = SearchConfig(steps=23, pattern=pattern1, budget=64, seed=9, fixed_words=fixed, abort_horizon=15)
    cands, stats = run_search(cfg)
    hist, hits = rerun_oracle(9, 0, 64, 23, pattern1.as_dict(), 15, fixed)
    assert stats.abort_histogram == hist
    assert stats.collisions_found == hits == expected_hits
    assert all(verify_candidate(c) for c in cands)


def test_reproducible(pattern1):
    cfg = SearchConfig(steps=12, pattern=pattern1, budget=300, seed=77, abort_horizon=9)
    a = run_search(cfg)
    b = run_search(cfg)
    assert a[0] == b[0]
    assert a[1].abort_histogram == b[1].abort_histogram
    assert stats_records(cfg, *a) == stats_records(cfg, *b)


def test_sample_blocks_follow_stream(pattern1):
    cfg = SearchConfig(steps=8, pattern=pattern1, budget=3, seed=5, fixed_words={0: 7})
    blocks = sample_blocks(cfg, 2, 3)
    raw = np.random.Philox(key=5 ^ 2).random_raw(45).tolist()
    assert all(b[0] == 7 for b in blocks)
    assert list(blocks[1])[1:] == raw[15:30]


def test_workers_partition_budget():
    cfg = SearchConfig(steps=8, pattern={9: 1}, budget=10, seed=4, workers=3)
    cands, stats = run_search(cfg)
    assert stats.attempts == 10 == stats.collisions_found
    per_worker = {}
    for c in cands:
        per_worker.setdefault(c.worker, []).append(c.block_a)
    assert {w: len(v) for w, v in per_worker.items()} == {0: 4, 1: 3, 2: 3}
    for w, got in per_worker.items():
        assert got == sample_blocks(cfg, w, len(got))
    again, _ = run_search(cfg)
    assert again == cands


def test_candidate_quota():
    cfg = SearchConfig(steps=8, pattern={12: 1}, budget=100, max_candidates=3)
    cands, stats = run_search(cfg)
    assert len(cands) == 3
    assert stats.attempts == 3


def test_cancellation():
    cancel = threading.Event()
    cancel.set()
    cands, stats = run_search(SearchConfig(steps=8, pattern={12: 1}, budget=100), cancel=cancel)
    assert stats.attempts == 0 and not cands


@pytest.mark.parametrize("kwargs", [
    dict(pattern={}, budget=1),
    dict(pattern={8: 1}, budget=0),
    dict(pattern={8: 1}, budget=1, workers=0),
    dict(pattern={8: 1}, budget=1, abort_horizon=23),
    dict(pattern={8: 1}, budget=1, fixed_words={16: 0}),
])
def test_config_errors(kwargs):
    with pytest.raises(SearchConfigError):
        SearchConfig(steps=23, **kwargs)


def test_verify_candidate(table1):
    d = compress(STANDARD_IV, table1.block_a, 23)
    assert verify_candidate(CollisionCandidate(table1.block_a, table1.block_b, 23, d))
    d24 = compress(STANDARD_IV, table1.block_a, 24)
    assert not verify_candidate(CollisionCandidate(table1.block_a, table1.block_b, 24, d24))
    same = CollisionCandidate(table1.block_a, table1.block_a, 23, d)
    assert verify_candidate(same) and same.trivial


def test_stats_accounting(pattern1):
    cfg = SearchConfig(steps=23, pattern=pattern1, budget=16, seed=2, abort_horizon=15)
    _, stats = run_search(cfg)
    assert stats.attempts_log2 == 4.0
    # rounds 0..7 are computed once per attempt, then both lanes run 8..16
    assert stats.step_evaluations == 16 * (8 + 2 * 9)
    assert stats.compression_calls == pytest.approx(16 * 26 / 23)


def test_project_wall_time_exact():
    assert project_wall_time(1024.0, 10) == 1.0
    assert project_wall_time(2.0, 16.5) == 2 ** 15.5
    assert project_wall_time(3.0, 34.5) == 2 ** 34.5 / 3.0
    with pytest.raises(ValueError):
        project_wall_time(0.0, 1)


def test_throughput():
    with pytest.raises(ValueError):
        estimate_throughput(23, 0)
    r23 = estimate_throughput(23, 0.2)
    r80 = estimate_throughput(80, 0.2)
    assert r23 > 0 and r80 < r23


def test_pattern_file_round_trip(pattern1):
    text = serialize_pattern(pattern1)
    assert text == "8 1\n9 ffffffffffffffff\n11 600000000237\n"
    assert parse_pattern(text) == pattern1
    assert parse_pattern("# c\n8 1\n9 -1\n\n11 0x600000000237\n") == pattern1
    for bad in ("8", "16 1", "8 zz", "8 1\n8 2", "1 10000000000000000"):
        with pytest.raises(ValueError):
            parse_pattern(bad)


small_patterns = st.dictionaries(st.integers(0, 15), st.integers(1, MASK64), min_size=1, max_size=3)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), small_patterns, st.integers(1, 6), st.integers(0, MASK64), st.data())
def test_early_abort_soundness(steps, pattern, budget, seed, data):
    horizon = data.draw(st.integers(0, steps - 1))
    base = dict(steps=steps, pattern=pattern, budget=budget, seed=seed)
    with_abort, s1 = run_search(SearchConfig(abort_horizon=horizon, **base))
    without, s2 = run_search(SearchConfig(**base))
    assert with_abort == without
    for s in (s1, s2):
        assert sum(s.abort_histogram.values()) + s.collisions_found == s.attempts == budget
