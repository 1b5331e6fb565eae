"""Command-line front end.

Exit codes: 0 success (for ``verify``: the pair collides), 1 the pair does not
collide or a constants check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .core import MASK64, MAX_STEPS, STANDARD_IV, MessageBlock, RegisterState, expand_schedule
from .difftrace import (
    REGISTERS,
    compute_difference,
    first_divergence,
    format_diff,
    last_divergence,
    run_pair,
    schedule_difference,
    signed,
)
from .search import (
    SearchConfig,
    estimate_throughput,
    human_summary,
    parse_pattern,
    project_wall_time,
    run_search,
    stats_records,
)
from .vectors import BUILTINS, builtin, check_constants, parse_block, serialize_block

PROJECTED_LOG2_CALLS = (16.5, 34.5)


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_block(path: str) -> MessageBlock:
    try:
        return parse_block(_read(path))
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _parse_iv(text: str) -> RegisterState:
    if text == "standard":
        return STANDARD_IV
    tokens = text.replace(",", " ").split()
    if len(tokens) != 8:
        raise UsageError("--iv takes 'standard' or eight hex words")
    try:
        words = [int(t, 16) for t in tokens]
    except ValueError:
        raise UsageError(f"--iv: not hex: {text!r}") from None
    if any(w > MASK64 or w < 0 for w in words):
        raise UsageError("--iv words must fit in 64 bits")
    return RegisterState(*words)


def _pair(args) -> Tuple[MessageBlock, MessageBlock, Optional[int]]:
    if args.builtin:
        if args.block_a or args.block_b:
            raise UsageError("--builtin conflicts with --block-a/--block-b")
        try:
            v = builtin(args.builtin)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        return v.block_a, v.block_b, v.steps
    if not (args.block_a and args.block_b):
        raise UsageError("give --builtin NAME or both --block-a and --block-b")
    return _load_block(args.block_a), _load_block(args.block_b), None


def _steps(args, default: Optional[int]) -> int:
    steps = args.steps if args.steps is not None else default
    if steps is None:
        raise UsageError("--steps is required")
    if not 0 <= steps <= MAX_STEPS:
        raise UsageError(f"--steps must be in 0..{MAX_STEPS}, got {steps}")
    return steps


def _add_pair_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--steps", type=int)
    p.add_argument("--builtin", choices=sorted(BUILTINS))
    p.add_argument("--block-a", metavar="FILE")
    p.add_argument("--block-b", metavar="FILE")
    p.add_argument("--iv", default="standard", help="'standard' or eight hex words")


def cmd_verify(args, out) -> int:
    a, b, default = _pair(args)
    steps = _steps(args, default)
    iv = _parse_iv(args.iv)
    trace = run_pair(iv, a, b, steps)
    pattern = compute_difference(a, b)
    print(f"steps       {steps}", file=out)
    print(f"digest a    {trace.digests[0].hex()}", file=out)
    print(f"digest b    {trace.digests[1].hex()}", file=out)
    if pattern:
        diffs = ", ".join(f"W{i}: {format_diff(v)}" for i, v in pattern.items())
    else:
        diffs = "none (identical blocks, trivial)"
    print(f"difference  {diffs}", file=out)
    first = first_divergence(trace)
    last = last_divergence(trace)
    print(f"diverges    {'never' if first is None else f'at step {first}'}", file=out)
    if trace.collided:
        closing = "no difference" if last is None else f"state difference cancelled at step {last + 1}"
        print(f"result      COLLISION ({closing})", file=out)
        return 0
    print("result      no collision", file=out)
    return 1


def _short(x: int) -> str:
    s = signed(x)
    return str(s) if abs(s) < 1 << 16 else f"{x:x}"


def cmd_trace(args, out) -> int:
    a, b, default = _pair(args)
    steps = _steps(args, default)
    trace = run_pair(_parse_iv(args.iv), a, b, steps)
    if args.format == "records":
        for rec in trace.records:
            w = ["-", "-"] if rec.w_a is None else [f"{rec.w_a:016x}", f"{rec.w_b:016x}"]
            fields = [str(rec.index), *w]
            for group in (rec.state_a, rec.state_b, rec.mod_diff, rec.xor_diff):
                fields.extend(f"{x:016x}" for x in group)
            print(" ".join(fields), file=out)
        return 0
    print(f"{'rec':>3} {'dW':>18}  " + " ".join(f"{'d' + r:>17}" for r in REGISTERS), file=out)
    for rec in trace.records:
        dw = "" if rec.w_a is None else _short((rec.w_b - rec.w_a) & MASK64)
        print(f"{rec.index:>3} {dw:>18}  " + " ".join(f"{_short(x):>17}" for x in rec.mod_diff), file=out)
    print(f"collided: {'yes' if trace.collided else 'no'}", file=out)
    return 0


def cmd_expand(args, out) -> int:
    if args.block and args.builtin:
        raise UsageError("--block conflicts with --builtin")
    if args.block:
        block = _load_block(args.block)
    elif args.builtin:
        v = builtin(args.builtin)
        block = v.block_a if args.which == "a" else v.block_b
    else:
        raise UsageError("give --block FILE or --builtin NAME")
    steps = _steps(args, None)
    for i, w in enumerate(expand_schedule(block, steps)):
        print(f"W{i:<2} {w:016x}", file=out)
    return 0


def _parse_fix(items: Sequence[str]) -> dict:
    fixed = {}
    for item in items:
        try:
            index, value = item.split("=", 1)
            i, w = int(index), int(value, 16)
        except ValueError:
            raise UsageError(f"--fix expects index=hex, got {item!r}") from None
        fixed[i] = w
    return fixed


def cmd_search(args, out) -> int:
    if bool(args.pattern) == bool(args.builtin_pattern):
        raise UsageError("give exactly one of --pattern FILE or --builtin-pattern NAME")
    if args.pattern:
        try:
            pattern = parse_pattern(_read(args.pattern))
        except ValueError as exc:
            raise UsageError(f"{args.pattern}: {exc}") from None
    else:
        v = builtin(args.builtin_pattern)
        pattern = compute_difference(v.block_a, v.block_b)
    steps = _steps(args, None)
    if not 0 <= args.budget <= 62:
        raise UsageError("--budget is log2 of the attempt count, 0..62")
    try:
        config = SearchConfig(
            steps=steps, pattern=pattern, budget=int(math.floor(2 ** args.budget)),
            fixed_words=_parse_fix(args.fix), seed=args.seed, workers=args.workers,
            abort_horizon=args.horizon, max_candidates=args.max_candidates,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    candidates, stats = run_search(config)
    for line in stats_records(config, candidates, stats):
        print(line, file=out)
    print(human_summary(stats), file=sys.stderr)
    return 0


def cmd_bench(args, out) -> int:
    steps = _steps(args, None)
    if not args.seconds > 0:
        raise UsageError("--seconds must be positive")
    rate = estimate_throughput(steps, args.seconds)
    print(f"steps       {steps}", file=out)
    print(f"rate        {rate:.1f} compressions/s", file=out)
    for x in PROJECTED_LOG2_CALLS:
        t = project_wall_time(rate, x)
        print(f"2^{x:<5} calls  {t:.6g} s ({t / 3600:.4g} h)", file=out)
    return 0


def cmd_vectors(args, out) -> int:
    if args.list:
        for name, v in BUILTINS.items():
            print(f"{name}  {v.steps} steps", file=out)
        return 0
    if args.show:
        v = builtin(args.show)
        print(f"# {v.name}: colliding pair for {v.steps} steps, standard IV", file=out)
        print("# block a", file=out)
        out.write(serialize_block(v.block_a))
        print("# block b", file=out)
        out.write(serialize_block(v.block_b))
        for name, value in v.constants.items():
            print(f"# {name} = {value:#x}", file=out)
        return 0
    ok = True
    for name in BUILTINS:
        report = check_constants(builtin(name))
        for line in report.lines():
            print(line, file=out)
        ok &= report.ok
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sha512diff", description="Step-reduced SHA-512 workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check whether two blocks collide")
    _add_pair_options(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trace", help="per-step differences of two blocks")
    _add_pair_options(p)
    p.add_argument("--format", choices=["human", "records"], default="human")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("expand", help="print the expanded message schedule")
    p.add_argument("--steps", type=int)
    p.add_argument("--block", metavar="FILE")
    p.add_argument("--builtin", choices=sorted(BUILTINS))
    p.add_argument("--which", choices=["a", "b"], default="a")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("search", help="fixed-difference collision search")
    p.add_argument("--steps", type=int)
    p.add_argument("--pattern", metavar="FILE")
    p.add_argument("--builtin-pattern", choices=sorted(BUILTINS))
    p.add_argument("--budget", type=float, default=16.0, help="log2 of the attempt budget")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--fix", action="append", default=[], metavar="INDEX=HEX")
    p.add_argument("--horizon", type=int, default=None, help="abort on differences after this step")
    p.add_argument("--max-candidates", type=int, default=None)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("bench", help="measure compressions per second")
    p.add_argument("--steps", type=int)
    p.add_argument("--seconds", type=float, default=1.0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("vectors", help="builtin colliding pairs")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--list", action="store_true")
    g.add_argument("--show", choices=sorted(BUILTINS))
    g.add_argument("--check-constants", action="store_true")
    p.set_defaults(func=cmd_vectors)
    return parser


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"sha512diff {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
