# %% [markdown]
# # How much does Charlie protect the exchange?
#
# Suppose Alice and Bob try to finish without Charlie by guessing the channel.
# The more qubits Charlie holds, the more channels his outcome could point to,
# and the smaller their chance of guessing right.

# %%
import numpy as np

from sqie import BypassStrategy, build_security_variant, insecurity_bound, security_sweep
from sqie.security import bypass_success_exact

for l in range(6):
    print(l, build_security_variant(l).assignment.channels[:8])

# %% [markdown]
# Exact success probability next to a 100000-trial Monte Carlo estimate.

# %%
report = security_sweep(1, 1, range(6), trials=100_000, seed=0)
for row in report.rows:
    print(f"l={row.l} exact={row.exact:.4f} mc={row.mc:.4f}+-{row.mc_stderr:.4f} bound={row.bound:.4f}")

# %% [markdown]
# At five Charlie qubits every channel appears twice, so there is no gain
# over four.

# %%
v5 = build_security_variant(5)
print(sorted(v5.assignment.channels) == sorted(build_security_variant(4).assignment.channels * 2))
print(bypass_success_exact(v5, BypassStrategy((2, 3))), insecurity_bound(5, 1, 1))

# %% [markdown]
# The best guess does no better than any other: the sum over all guesses is 1
# and each gets the same share.

# %%
v3 = build_security_variant(3)
shares = {g: bypass_success_exact(v3, BypassStrategy(g)) for g in np.ndindex(4, 4)}
print(sum(shares.values()), max(shares.values()))
