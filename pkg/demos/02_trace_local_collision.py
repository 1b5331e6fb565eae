# %% [markdown]
# # Following the difference through the rounds
#
# A lockstep trace records both register states after every round. The +1 in
# W8 enters a and e together, shifts down the register file, and is cancelled
# by the -1 that the expanded word W16 inherits from W9.

# %%
from sha512diff import builtin, first_divergence, run_pair, schedule_difference
from sha512diff.difftrace import find_word, last_divergence, signed

v = builtin("table1")
trace = run_pair(v.iv, v.block_a, v.block_b, v.steps)
print("first divergence at round", first_divergence(trace))
print("last nonzero difference after round", last_divergence(trace))
for rec in trace.records[7:19]:
    print(f"{rec.index:>3}", " ".join(f"{signed(x):>4}" if abs(signed(x)) < 1000 else " big" for x in rec.mod_diff))

# %% [markdown]
# Expanded-word differences beyond W15:

# %%
print([signed(d) for d in schedule_difference(v.block_a, v.block_b, v.steps)[16:]])

# %% [markdown]
# The remaining constants have no stated role here. Searching the trace for
# them shows where they turn up as register values.

# %%
for name in ("table1", "table2"):
    v = builtin(name)
    trace = run_pair(v.iv, v.block_a, v.block_b, v.steps)
    for label, value in v.constants.items():
        if label in ("alpha", "lambda", "mu"):
            hits = [h for h in find_word(trace, value) if h[1].startswith("a.")]
            print(f"{name} {label:<6} {value:#x}: {hits[:4]}")
