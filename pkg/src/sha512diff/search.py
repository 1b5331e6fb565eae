"""Instrumented fixed-difference collision search.

Each attempt samples the free message words, adds the difference pattern to
get the partner block, and runs both blocks in lockstep. One attempt is one
message-pair trial; ``step_evaluations`` counts the rounds actually computed,
so ``compression_calls`` expresses the same work in whole step-reduced
compressions.

Sampling uses one Philox stream per worker keyed by ``seed ^ worker``, so the
blocks a worker tries depend only on the seed, its index and its share of the
budget.
"""

from __future__ import annotations

import json
import math
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .core import (
    BLOCK_WORDS,
    K512,
    MASK64,
    STANDARD_IV,
    Digest,
    MessageBlock,
    check_steps,
    compress,
    expand_words,
    feed_forward,
    step_tuple,
)
from .difftrace import DifferencePattern, PatternLike, as_pattern, run_pair

_CHUNK = 512


class SearchConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    """Parameters of one search run.

    ``abort_horizon`` is the last round allowed to leave a register
    difference; an attempt aborts at the first later round whose output
    differs. With ``None`` every attempt runs to the end.
    """

    steps: int
    pattern: DifferencePattern
    budget: int
    fixed_words: Mapping[int, int] = field(default_factory=dict)
    seed: int = 0
    workers: int = 1
    abort_horizon: Optional[int] = None
    max_candidates: Optional[int] = None
    iv: Tuple[int, ...] = tuple(STANDARD_IV)

    def __post_init__(self) -> None:
        object.__setattr__(self, "pattern", as_pattern(self.pattern))
        object.__setattr__(self, "fixed_words", {int(i): int(w) for i, w in dict(self.fixed_words).items()})
        object.__setattr__(self, "iv", tuple(self.iv))
        self.validate()

    @property
    def free_indices(self) -> Tuple[int, ...]:
        return tuple(i for i in range(BLOCK_WORDS) if i not in self.fixed_words)

    def validate(self) -> None:
        try:
            check_steps(self.steps)
        except ValueError as exc:
            raise SearchConfigError(str(exc)) from None
        if not self.pattern:
            raise SearchConfigError("difference pattern is empty; only self-collisions would be found")
        if self.budget < 1:
            raise SearchConfigError("budget must be at least one attempt")
        if self.workers < 1:
            raise SearchConfigError("workers must be positive")
        if not 0 <= self.seed <= MASK64:
            raise SearchConfigError("seed must be a 64-bit unsigned value")
        for i, w in self.fixed_words.items():
            if not 0 <= i < BLOCK_WORDS:
                raise SearchConfigError(f"fixed word index out of range: {i}")
            if not 0 <= w <= MASK64:
                raise SearchConfigError(f"fixed word {i} is not a 64-bit value")
        if self.abort_horizon is not None and not 0 <= self.abort_horizon < max(self.steps, 1):
            raise SearchConfigError(f"abort horizon must lie in 0..{self.steps - 1}")
        if self.max_candidates is not None and self.max_candidates < 1:
            raise SearchConfigError("candidate quota must be positive")
        if len(self.iv) != 8:
            raise SearchConfigError("iv must have eight words")


@dataclass(frozen=True)
class CollisionCandidate:
    block_a: MessageBlock
    block_b: MessageBlock
    steps: int
    digest: Digest
    worker: int = 0
    attempt: int = 0

    @property
    def trivial(self) -> bool:
        return self.block_a == self.block_b


@dataclass
class SearchStats:
    attempts: int = 0
    collisions_found: int = 0
    abort_histogram: Dict[int, int] = field(default_factory=dict)
    elapsed: float = 0.0
    step_evaluations: int = 0
    steps: int = 0

    @property
    def attempts_log2(self) -> float:
        return math.log2(self.attempts) if self.attempts else float("-inf")

    @property
    def compression_calls(self) -> float:
        if self.steps == 0:
            return 2.0 * self.attempts
        return self.step_evaluations / self.steps

    @property
    def compression_calls_log2(self) -> float:
        c = self.compression_calls
        return math.log2(c) if c > 0 else float("-inf")

    def merge(self, other: "SearchStats") -> None:
        self.attempts += other.attempts
        self.collisions_found += other.collisions_found
        self.step_evaluations += other.step_evaluations
        for k, v in other.abort_histogram.items():
            self.abort_histogram[k] = self.abort_histogram.get(k, 0) + v


def verify_candidate(c: CollisionCandidate, iv: Sequence[int] = STANDARD_IV) -> bool:
    """Full non-aborting rerun of the pair, by default from the standard IV."""
    trace = run_pair(iv, c.block_a, c.block_b, c.steps)
    return trace.collided and trace.digests[0] == c.digest


def _share(budget: int, workers: int, index: int) -> int:
    return budget // workers + (1 if index < budget % workers else 0)


def _stream(seed: int, worker: int) -> np.random.Philox:
    return np.random.Philox(key=(seed ^ worker) & MASK64)


def sample_blocks(config: SearchConfig, worker: int, count: int) -> List[MessageBlock]:
    """The first ``count`` ``block_a`` values worker ``worker`` would try."""
    free = config.free_indices
    bg = _stream(config.seed, worker)
    raw = bg.random_raw(count * len(free)).tolist() if free else []
    out = []
    for n in range(count):
        words = [config.fixed_words.get(i, 0) for i in range(BLOCK_WORDS)]
        for j, i in enumerate(free):
            words[i] = raw[n * len(free) + j]
        out.append(MessageBlock(tuple(words)))
    return out


_STOP = None


def _init_worker(stop) -> None:
    global _STOP
    _STOP = stop


def _run_stream(config: SearchConfig, worker: int, budget: int,
                stop=None) -> Tuple[List[CollisionCandidate], SearchStats]:
    if stop is None:
        stop = _STOP
    steps = config.steps
    iv = config.iv
    free = config.free_indices
    nfree = len(free)
    horizon = config.abort_horizon
    delta = config.pattern.as_dict()
    base = [config.fixed_words.get(i, 0) for i in range(BLOCK_WORDS)]

    # Rounds before the first perturbed word are shared by both lanes.
    start = min(min(delta), steps)
    prefix_fixed = all(i in config.fixed_words for i in range(start))
    if prefix_fixed:
        shared = tuple(iv)
        for j in range(start):
            shared = step_tuple(shared, base[j], K512[j])

    bg = _stream(config.seed, worker)
    stats = SearchStats(steps=steps)
    hist = stats.abort_histogram
    found: List[CollisionCandidate] = []
    evals = 0
    attempt = 0
    while attempt < budget:
        if stop is not None and stop.is_set():
            break
        n = min(_CHUNK, budget - attempt)
        raw = bg.random_raw(n * nfree).tolist() if nfree else None
        for r in range(n):
            words_a = list(base)
            if nfree:
                off = r * nfree
                for j, i in enumerate(free):
                    words_a[i] = raw[off + j]
            words_b = list(words_a)
            for i, d in delta.items():
                words_b[i] = (words_b[i] + d) & MASK64
            wa = expand_words(words_a, steps)
            wb = expand_words(words_b, steps)

            if prefix_fixed:
                sa = shared
            else:
                sa = tuple(iv)
                for j in range(start):
                    sa = step_tuple(sa, wa[j], K512[j])
                evals += start
            sb = sa
            first = None
            aborted = None
            for j in range(start, steps):
                sa = step_tuple(sa, wa[j], K512[j])
                sb = step_tuple(sb, wb[j], K512[j])
                evals += 2
                if sa != sb:
                    if first is None:
                        first = j
                    if horizon is not None and j > horizon:
                        aborted = j
                        break
            idx = attempt + r
            if aborted is None and sa == sb:
                block_a = MessageBlock(tuple(words_a))
                cand = CollisionCandidate(block_a, MessageBlock(tuple(words_b)), steps,
                                          feed_forward(iv, sa), worker, idx)
                if not verify_candidate(cand, iv):
                    raise AssertionError(f"false positive at worker {worker} attempt {idx}")
                found.append(cand)
                stats.collisions_found += 1
            else:
                key = first if aborted is None else aborted
                hist[key] = hist.get(key, 0) + 1
            stats.attempts += 1
            if config.max_candidates is not None and len(found) >= config.max_candidates:
                if stop is not None:
                    stop.set()
                attempt = budget
                break
        else:
            attempt += n
    stats.step_evaluations = evals
    return found, stats


def run_search(config: SearchConfig,
               cancel: Optional[threading.Event] = None) -> Tuple[List[CollisionCandidate], SearchStats]:
    """Run the search; stops on budget, candidate quota or ``cancel``."""
    config.validate()
    t0 = time.perf_counter()
    total = SearchStats(steps=config.steps)
    found: List[CollisionCandidate] = []
    if config.workers == 1:
        stop = cancel if cancel is not None else threading.Event()
        cands, stats = _run_stream(config, 0, config.budget, stop)
        found.extend(cands)
        total.merge(stats)
    else:
        import multiprocessing as mp

        ctx = mp.get_context()
        stop = ctx.Event()
        done = threading.Event()

        def forward() -> None:
            while not done.wait(0.05):
                if cancel.is_set():
                    stop.set()
                    return

        if cancel is not None:
            threading.Thread(target=forward, daemon=True).start()
        shares = [_share(config.budget, config.workers, i) for i in range(config.workers)]
        try:
            with ProcessPoolExecutor(config.workers, mp_context=ctx,
                                     initializer=_init_worker, initargs=(stop,)) as pool:
                futures = [pool.submit(_run_stream, config, i, b) for i, b in enumerate(shares) if b]
                for fut in futures:
                    cands, stats = fut.result()
                    found.extend(cands)
                    total.merge(stats)
        finally:
            done.set()
    found.sort(key=lambda c: (c.worker, c.attempt))
    if config.max_candidates is not None:
        found = found[:config.max_candidates]
    total.elapsed = time.perf_counter() - t0
    return found, total


def estimate_throughput(steps: int, duration: float, block: Optional[MessageBlock] = None) -> float:
    """Measured step-reduced compressions per second over roughly ``duration`` seconds."""
    check_steps(steps)
    if not duration > 0:
        raise ValueError("duration must be positive")
    block = block if block is not None else MessageBlock(tuple(range(BLOCK_WORDS)))
    iv = tuple(STANDARD_IV)
    calls = 0
    batch = 64
    t0 = time.perf_counter()
    deadline = t0 + duration
    while True:
        for _ in range(batch):
            compress(iv, block, steps)
        calls += batch
        now = time.perf_counter()
        if now >= deadline:
            return calls / (now - t0)


def project_wall_time(rate: float, log2_calls: float) -> float:
    """Seconds needed for ``2**log2_calls`` calls at ``rate`` calls per second."""
    if not rate > 0:
        raise ValueError("rate must be positive")
    return 2.0 ** log2_calls / rate


def parse_pattern(text: str) -> DifferencePattern:
    """Read ``index hexvalue`` lines; a leading ``-`` negates modulo 2^64."""
    entries: Dict[int, int] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'index hexvalue'")
        try:
            index = int(parts[0])
            value = parts[1]
            neg = value.startswith("-")
            v = int(value.lstrip("-"), 16)
        except ValueError:
            raise ValueError(f"line {lineno}: cannot parse {line!r}") from None
        if not 0 <= index < BLOCK_WORDS:
            raise ValueError(f"line {lineno}: word index {index} out of range")
        if v > MASK64:
            raise ValueError(f"line {lineno}: value exceeds 64 bits")
        if index in entries:
            raise ValueError(f"line {lineno}: duplicate index {index}")
        entries[index] = (-v if neg else v) & MASK64
    return DifferencePattern.of(entries)


def serialize_pattern(p: PatternLike) -> str:
    return "".join(f"{i} {v:x}\n" for i, v in as_pattern(p).items())


def _log2_json(x: float) -> Optional[float]:
    return None if math.isinf(x) else round(x, 6)


def stats_records(config: SearchConfig, candidates: Sequence[CollisionCandidate],
                  stats: SearchStats) -> List[str]:
    """Machine-readable JSON lines; wall time is left out so reruns compare byte for byte."""
    recs = [{
        "record": "config", "steps": config.steps, "seed": config.seed, "workers": config.workers,
        "budget": config.budget, "abort_horizon": config.abort_horizon,
        "pattern": {str(i): f"{v:016x}" for i, v in config.pattern.items()},
        "fixed": {str(i): f"{w:016x}" for i, w in sorted(config.fixed_words.items())},
    }, {
        "record": "stats", "attempts": stats.attempts, "attempts_log2": _log2_json(stats.attempts_log2),
        "collisions_found": stats.collisions_found, "step_evaluations": stats.step_evaluations,
        "compression_calls": stats.compression_calls,
        "compression_calls_log2": _log2_json(stats.compression_calls_log2),
    }]
    for step_index in sorted(stats.abort_histogram):
        recs.append({"record": "abort", "step": step_index, "count": stats.abort_histogram[step_index]})
    for c in candidates:
        recs.append({
            "record": "candidate", "worker": c.worker, "attempt": c.attempt, "steps": c.steps,
            "trivial": c.trivial, "block_a": c.block_a.to_bytes().hex(),
            "block_b": c.block_b.to_bytes().hex(), "digest": c.digest.hex(),
        })
    return [json.dumps(r, sort_keys=True) for r in recs]


def human_summary(stats: SearchStats) -> str:
    lines = [
        f"attempts          {stats.attempts} (2^{stats.attempts_log2:.2f} pair trials)",
        f"compressions      {stats.compression_calls:.1f} (2^{stats.compression_calls_log2:.2f} "
        f"step-reduced calls, from {stats.step_evaluations} rounds)",
        f"collisions        {stats.collisions_found}",
        f"elapsed           {stats.elapsed:.3f} s",
    ]
    for k in sorted(stats.abort_histogram):
        lines.append(f"  diverged at {k:>2}  {stats.abort_histogram[k]}")
    return "\n".join(lines)
