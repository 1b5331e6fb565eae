# %% [markdown]
# # The collision-search harness
#
# The harness samples free message words, adds a fixed difference, and counts
# how attempts fail. Statistics are reported per pair trial and per
# step-reduced compression.

# %%
from sha512diff import SearchConfig, builtin, compute_difference, estimate_throughput, project_wall_time, run_search
from sha512diff.search import human_summary

v = builtin("table1")
pattern = compute_difference(v.block_a, v.block_b)

# %% [markdown]
# With only 8 rounds, words 8..15 never enter the computation, so every
# attempt collides.

# %%
cands, stats = run_search(SearchConfig(steps=8, pattern=pattern, budget=4))
print(human_summary(stats))

# %% [markdown]
# Pinning every word to the published block rediscovers the pair in one try.
# Leaving W15 free still collides every time: it is consumed after the state
# difference has moved into h and is cancelled by W16 regardless.

# %%
fixed = dict(enumerate(v.block_a))
print(len(run_search(SearchConfig(steps=23, pattern=pattern, budget=1, fixed_words=fixed))[0]))
del fixed[15]
print(run_search(SearchConfig(steps=23, pattern=pattern, budget=256, seed=3, fixed_words=fixed))[1].collisions_found)

# %% [markdown]
# Random sampling with an abort horizon: attempts die right after the local
# collision should have closed.

# %%
cands, stats = run_search(SearchConfig(steps=23, pattern=pattern, budget=2 ** 12, seed=1, abort_horizon=15))
print(human_summary(stats))

# %% [markdown]
# Projected wall time for the published attack budgets on this machine.

# %%
rate = estimate_throughput(23, 1.0)
for log2_calls in (16.5, 34.5):
    print(f"2^{log2_calls}: {project_wall_time(rate, log2_calls):.1f} s at {rate:.0f} calls/s")
