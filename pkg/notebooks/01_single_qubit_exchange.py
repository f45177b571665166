# %% [markdown]
# # Swapping two single-qubit messages
#
# Alice holds one qubit, Bob holds one qubit, and Charlie holds two qubits of a
# six-qubit entangled resource. After two Bell measurements and Charlie's
# computational-basis measurement, each party can rebuild the other's message.

# %%
import numpy as np

from sqie import ResourceSpec, build_sse, enumerate_branches, random_state, run_exchange
from sqie.qstate import reduced_density

rng = np.random.default_rng(3)
xi = random_state(1, rng)
eta = random_state(1, rng)
xi.amplitudes, eta.amplitudes

# %% [markdown]
# The shared resource. Registers follow the order A', B', B'', A'', C.

# %%
sse = build_sse()
print(sse.registers)
print(np.round(sse.amplitudes.real.reshape(16, 4) * 4).astype(int))

# %% [markdown]
# Charlie alone sees a maximally mixed state, so his qubits tell him nothing.

# %%
np.round(reduced_density(sse, sse.registers["C"]), 12)

# %% [markdown]
# One sampled run. The transcript lists every classical message in order.

# %%
t = run_exchange(ResourceSpec(1, 1), xi, eta, seed=42)
for msg in t.messages:
    print(msg)
print("channel", t.channel, "corrections", t.alice_correction, t.bob_correction)
print("fidelities", t.fidelity_at_bob, t.fidelity_at_alice)

# %% [markdown]
# Every one of the 64 outcome branches (r, s, c) occurs with probability 1/64
# and ends in a perfect swap.

# %%
branches = enumerate_branches(None, xi, eta)
probs = np.array([b.probability for b in branches])
fids = np.array([[b.transcript.fidelity_at_bob, b.transcript.fidelity_at_alice] for b in branches])
print(len(branches), probs.min(), probs.max(), probs.sum())
print("worst fidelity", fids.min())
