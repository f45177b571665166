"""How likely are Alice and Bob to finish the exchange while cutting Charlie out?

The colluders trade BSM results directly and correct for one fixed guess of
the channel pair.  They succeed exactly on the Charlie outcomes whose channel
matches the guess.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .protocol import enumerate_branches, stream
from .qstate import QuantumState, computational_probabilities, make_state
from .resource import ResourceSpec, SharedResource, build_security_variant, standard_resource

SUCCESS_THRESHOLD = 1 - 1e-9


@dataclass(frozen=True)
class BypassStrategy:
    guess: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class SecurityRow:
    l: int
    exact: float
    mc: float
    mc_stderr: float
    bound: float


@dataclass
class SecurityReport:
    m: int
    n: int
    trials: int
    seed: int
    rows: list[SecurityRow] = field(default_factory=list)


def probe_inputs(m: int, n: int) -> tuple[QuantumState, QuantumState]:
    """Fixed message states for which every wrong Pauli correction costs fidelity.

    For a single qubit the Bloch vector points along (1, 1, 1)/sqrt(3), so any
    residual non-identity Pauli leaves fidelity 1/3.  Larger messages use
    the tensor power.
    """
    theta = np.arccos(1 / np.sqrt(3))
    one = np.array([np.cos(theta / 2), np.exp(1j * np.pi / 4) * np.sin(theta / 2)])

    def power(k):
        vec = np.ones(1, dtype=np.complex128)
        for _ in range(k):
            vec = np.kron(vec, one)
        return make_state(vec)

    return power(m), power(n)


def bypass_success_exact(variant: SharedResource, strategy: BypassStrategy) -> float:
    """``sum_c p(c) [channel(c) == guess]`` over Charlie's unreported outcomes."""
    state, assignment = variant
    c_qubits = state.registers.get("C", ())
    probs = computational_probabilities(state, c_qubits) if c_qubits else np.ones(1)
    guess = tuple(strategy.guess)
    return float(sum(p for c, p in enumerate(probs) if assignment[c] == guess))


def bypass_success_mc(
    variant: SharedResource,
    strategy: BypassStrategy,
    trials: int,
    seed: int,
    inputs: tuple[QuantumState, QuantumState] | None = None,
) -> tuple[float, float]:
    """Monte Carlo estimate and standard error of the bypass success rate.

    Each trial draws a full branch ``(r, s, c)`` by the Born rule and scores
    the colluders' run on it as a success when both fidelities exceed
    ``1 - 1e-9``.  A branch is deterministic once drawn, so every reachable
    branch is run once up front and trials index into that table.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    state, assignment = variant
    xi, eta = inputs if inputs is not None else probe_inputs(assignment.m, assignment.n)
    branches = enumerate_branches(None, xi, eta, resource=variant, bypass=tuple(strategy.guess))
    probs = np.array([b.probability for b in branches])
    wins = np.array([b.transcript.fidelity_at_bob > SUCCESS_THRESHOLD
                     and b.transcript.fidelity_at_alice > SUCCESS_THRESHOLD for b in branches])
    rng = stream(seed, assignment.l)
    draws = rng.choice(len(branches), size=trials, p=probs / probs.sum())
    hits = wins[draws].astype(float)
    estimate = float(hits.mean())
    stderr = float(hits.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return estimate, stderr


def insecurity_bound(l: int, m: int, n: int) -> float:
    return 2.0 ** -min(l, 2 * (m + n))


def variant_for(m: int, n: int, l: int) -> SharedResource:
    """The resource analyzed at Charlie size ``l``."""
    if (m, n) == (1, 1) and 0 <= l <= 5:
        return build_security_variant(l)
    if l == 2 * max(m, n):
        return standard_resource(ResourceSpec(m, n))
    raise ValueError(f"no resource construction for m={m}, n={n}, l={l}")


def security_sweep(
    m: int,
    n: int,
    l_range: Iterable[int],
    trials: int,
    seed: int,
    strategy: BypassStrategy | None = None,
) -> SecurityReport:
    strategy = strategy or BypassStrategy()
    report = SecurityReport(m, n, trials, seed)
    for l in l_range:
        variant = variant_for(m, n, l)
        mc, err = bypass_success_mc(variant, strategy, trials, seed)
        report.rows.append(
            SecurityRow(l, bypass_success_exact(variant, strategy), mc, err, insecurity_bound(l, m, n))
        )
    return report
