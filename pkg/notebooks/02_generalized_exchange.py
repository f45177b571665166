# %% [markdown]
# # Messages of different sizes
#
# With m qubits for Alice and n for Bob, the resource pairs two generalized
# Bell states with 2*max(m, n) Charlie qubits. Charlie's outcome c selects the
# channel (c mod 4^m, c mod 4^n).

# %%
import numpy as np

from sqie import ResourceSpec, build_resource, channel_of, random_state, run_exchange
from sqie.pauli import PauliString, build_gbs

# %% [markdown]
# Generalized Bell states come from Pauli strings acting on the second half of
# a maximally entangled pair. Index 6 on two qubits is digits (1, 2).

# %%
print(PauliString.from_index(6, 2))
np.round(build_gbs(2, 6).amplitudes * 2, 12)

# %%
spec = ResourceSpec(2, 1)
print(spec.total_qubits, "qubits,", 2**spec.l, "Charlie outcomes")
print([channel_of(spec, c) for c in range(8)])

# %% [markdown]
# Sampled runs for several sizes. The largest, m=3 and n=1, uses 18 qubits.

# %%
rng = np.random.default_rng(7)
for m, n in [(2, 1), (1, 2), (2, 2), (3, 1)]:
    spec = ResourceSpec(m, n)
    worst = 1.0
    for _ in range(5):
        t = run_exchange(spec, random_state(m, rng), random_state(n, rng), rng=rng)
        worst = min(worst, t.fidelity_at_bob, t.fidelity_at_alice)
    print(f"m={m} n={n} qubits={spec.total_qubits} worst fidelity={worst:.15f}")

# %% [markdown]
# Messages only carry Pauli indices. The sign of each correction is a global
# phase and drops out of the fidelity.

# %%
t = run_exchange(ResourceSpec(2, 2), random_state(2, rng), random_state(2, rng), seed=1)
print(t.bob_correction, t.alice_correction)
print([(m.kind, m.payload, m.bits) for m in t.messages])
