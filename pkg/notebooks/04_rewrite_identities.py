# %% [markdown]
# # Why the corrections work
#
# A message |psi> next to one half of the generalized Bell state E^(i) can be
# rewritten in the Bell basis of the first two registers:
#
#     |psi>|E^(i)> = 2^-k sum_r |E^(r)> U^(i) U^(r) |psi>
#
# so after measuring r, undoing U^(i) U^(r) recovers |psi>.

# %%
import numpy as np

from sqie import random_state
from sqie.pauli import PauliString, compose, pauli_product, product_table_mismatches
from sqie.protocol import compute_corrections, verify_rewrite_identity

# %% [markdown]
# The single-qubit product table, checked against matrix multiplication.

# %%
names = ["I", "Z", "X", "XZ"]
for a in range(4):
    print(names[a], [f"{'-' if s < 0 else '+'}{names[d]}" for d, s in (pauli_product(a, b) for b in range(4))])
print("mismatches:", product_table_mismatches())

# %% [markdown]
# Largest amplitude deviation of the rewrite over random states.

# %%
rng = np.random.default_rng(0)
worst = max(
    verify_rewrite_identity(side, k, i, random_state(k, rng))
    for k in (1, 2)
    for i in range(4**k)
    for side in ("alice", "bob")
)
worst

# %% [markdown]
# Corrections for channel (1, 3) after measurement results r=2, s=1.

# %%
alice, bob = compute_corrections(1, 3, 2, 1, 1, 1)
print("Bob applies", bob, "Alice applies", alice)
# undoes U^(1) U^(2): the product is the identity up to sign
undo = bob.matrix() @ compose(PauliString((1,)), PauliString((2,))).matrix()
print(np.round(undo, 12))
