# %% [markdown]
# # Verifying the builtin colliding pairs
#
# Both builtin pairs share their first eight (resp. ten) words and differ in a
# handful of later words. Running them through step-reduced SHA-512 from the
# standard IV gives identical 512-bit outputs.

# %%
from sha512diff import STANDARD_IV, builtin, check_constants, compress, compute_difference, digest_message
from sha512diff.difftrace import format_diff

for name in ("table1", "table2"):
    v = builtin(name)
    da = compress(STANDARD_IV, v.block_a, v.steps)
    db = compress(STANDARD_IV, v.block_b, v.steps)
    print(f"{name}: {v.steps} steps, collide={da == db}")
    print("  digest", da.hex())
    for i, d in compute_difference(v.block_a, v.block_b).items():
        print(f"  W{i:<2} differs by {format_diff(d)}")

# %% [markdown]
# Round counting starts at zero: an n-step run applies rounds 0..n-1. Sweeping
# the step count shows where each pair collides.

# %%
for name in ("table1", "table2"):
    v = builtin(name)
    hits = [s for s in range(81) if compress(STANDARD_IV, v.block_a, s) == compress(STANDARD_IV, v.block_b, s)]
    print(name, "collides for step counts", hits)

# %% [markdown]
# Both pairs are complete 1024-bit blocks, so they also collide as 128-byte
# messages: the padding block is the same and the chaining values already agree.

# %%
v = builtin("table1")
print(digest_message(v.block_a.to_bytes(), 23) == digest_message(v.block_b.to_bytes(), 23))

# %% [markdown]
# The word differences carry the published constants.

# %%
for name in ("table1", "table2"):
    for line in check_constants(builtin(name)).lines():
        print(line)
