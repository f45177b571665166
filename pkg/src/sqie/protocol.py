"""Controlled two-way exchange between Alice, Bob and Charlie.

Alice holds ``A`` (her m-qubit message), ``A'`` and ``A''``; Bob holds ``B``,
``B'`` and ``B''``; Charlie holds ``C``.  Each party only touches its own
registers.  Classical traffic goes through a :class:`ClassicalChannel`, an
ordered in-memory log.

Per-run random streams are derived from a master seed with
``numpy.random.SeedSequence([seed, index])`` (see :func:`stream`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .pauli import PauliString, build_gbs, compose, dagger, gbs_basis, gbs_measure
from .qstate import (
    ZERO_BRANCH_TOL,
    QuantumState,
    apply_string,
    computational_probabilities,
    make_state,
    marginal_fidelity,
    measure_computational,
    reduced_density,
    reorder,
    tensor_all,
)
from .resource import ResourceSpec, SharedResource, standard_resource

EXCHANGE_ORDER = ("A", "A'", "B'", "B''", "A''", "B", "C")
MAX_ENUMERATION_QUBITS = 16

ALICE_BSM = "alice_bsm"
BOB_BSM = "bob_bsm"
CHARLIE_TO_ALICE = "charlie_to_alice"
CHARLIE_TO_BOB = "charlie_to_bob"
_MESSAGE_ORDER = (ALICE_BSM, BOB_BSM, CHARLIE_TO_ALICE, CHARLIE_TO_BOB)


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Independent generator for run ``index`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


@dataclass(frozen=True)
class ClassicalMessage:
    kind: str
    payload: int
    bits: int

    def __post_init__(self):
        if self.kind not in _MESSAGE_ORDER:
            raise ValueError(f"unknown message kind {self.kind!r}")
        if not 0 <= self.payload < 2**self.bits:
            raise ValueError(f"{self.kind} payload {self.payload} does not fit in {self.bits} bits")


class ClassicalChannel:
    """Ordered message log; corrections may only be sent once both BSM results are in."""

    def __init__(self):
        self.log: list[ClassicalMessage] = []

    def send(self, msg: ClassicalMessage) -> None:
        kinds = {m.kind for m in self.log}
        if msg.kind in kinds:
            raise RuntimeError(f"{msg.kind} sent twice")
        if msg.kind in (CHARLIE_TO_ALICE, CHARLIE_TO_BOB) and not {ALICE_BSM, BOB_BSM} <= kinds:
            raise RuntimeError(f"{msg.kind} sent before both BSM results")
        self.log.append(msg)

    def receive(self, kind: str) -> int:
        for msg in self.log:
            if msg.kind == kind:
                return msg.payload
        raise LookupError(f"no {kind} message on the channel")


@dataclass(frozen=True)
class ExchangeTranscript:
    m: int
    n: int
    l: int
    input_xi: tuple[complex, ...]
    input_eta: tuple[complex, ...]
    r: int
    s: int
    charlie_outcome: int
    channel: tuple[int, int]
    messages: tuple[ClassicalMessage, ...]
    alice_correction: PauliString
    bob_correction: PauliString
    fidelity_at_bob: float
    fidelity_at_alice: float
    branch_probability: float
    bypass_guess: tuple[int, int] | None = None

    @property
    def succeeded(self) -> bool:
        return min(self.fidelity_at_bob, self.fidelity_at_alice) > 1 - 1e-9


def compute_corrections(
    i_prime: int, i_dprime: int, r: int, s: int, m: int, n: int
) -> tuple[PauliString, PauliString]:
    """Alice's n-qubit and Bob's m-qubit corrections for channel ``(i', i'')`` and BSM results ``r, s``."""
    bob = dagger(compose(PauliString.from_index(i_prime, m), PauliString.from_index(r, m)))
    alice = dagger(compose(PauliString.from_index(i_dprime, n), PauliString.from_index(s, n)))
    return alice, bob


def prepare(xi: QuantumState, eta: QuantumState, resource: SharedResource) -> QuantumState:
    """Global initial state ``xi_A (x) resource (x) eta_B`` in the fixed register order."""
    xi = QuantumState(xi.amplitudes, {"A": tuple(range(xi.num_qubits))})
    eta = QuantumState(eta.amplitudes, {"B": tuple(range(eta.num_qubits))})
    return reorder(tensor_all(xi, resource.state, eta), EXCHANGE_ORDER)


class _Exchange:
    """One exchange in progress.  Steps must run in protocol order."""

    def __init__(self, spec, xi, eta, resource, bypass):
        self.m, self.n = xi.num_qubits, eta.num_qubits
        if resource.assignment.m != self.m or resource.assignment.n != self.n:
            raise ValueError(
                f"resource is for m={resource.assignment.m}, n={resource.assignment.n}; "
                f"inputs have {self.m} and {self.n} qubits"
            )
        self.spec = spec
        self.xi, self.eta = xi, eta
        self.assignment = resource.assignment
        self.bypass = bypass
        self.state = prepare(xi, eta, resource)
        self.channel = ClassicalChannel()
        self.probability = 1.0

    # Alice
    def alice_bsm(self, outcome=None, rng=None) -> int:
        rec = gbs_measure(self.state, self.state.registers["A"], self.state.registers["A'"], outcome, rng)
        self._advance(rec)
        self.channel.send(ClassicalMessage(ALICE_BSM, rec.outcome, 2 * self.m))
        return rec.outcome

    # Bob
    def bob_bsm(self, outcome=None, rng=None) -> int:
        rec = gbs_measure(self.state, self.state.registers["B"], self.state.registers["B''"], outcome, rng)
        self._advance(rec)
        self.channel.send(ClassicalMessage(BOB_BSM, rec.outcome, 2 * self.n))
        return rec.outcome

    # Charlie
    def charlie_measure(self, outcome=None, rng=None) -> int:
        c_qubits = self.state.registers["C"]
        if not c_qubits:
            if outcome not in (None, 0):
                raise ValueError(f"Charlie holds no qubits; outcome {outcome} is impossible")
            self.c = 0
            return 0
        rec = measure_computational(self.state, c_qubits, outcome, rng)
        self._advance(rec)
        self.c = rec.outcome
        return rec.outcome

    def dispatch(self) -> None:
        """Charlie's correction messages, or the colluders' guessed ones under bypass."""
        r = self.channel.receive(ALICE_BSM)
        s = self.channel.receive(BOB_BSM)
        i1, i2 = self.bypass if self.bypass is not None else self.assignment[self.c]
        alice, bob = compute_corrections(i1, i2, r, s, self.m, self.n)
        self.channel.send(ClassicalMessage(CHARLIE_TO_ALICE, alice.index, 2 * self.n))
        self.channel.send(ClassicalMessage(CHARLIE_TO_BOB, bob.index, 2 * self.m))

    def correct(self) -> tuple[PauliString, PauliString]:
        # only the digits cross the channel; the sign is a global phase
        a = PauliString.from_index(self.channel.receive(CHARLIE_TO_ALICE), self.n)
        b = PauliString.from_index(self.channel.receive(CHARLIE_TO_BOB), self.m)
        self.state = apply_string(self.state, a, self.state.registers["A''"])
        self.state = apply_string(self.state, b, self.state.registers["B'"])
        return a, b

    def _advance(self, rec) -> None:
        self.state = rec.post_state
        self.probability *= rec.probability

    def finish(self) -> ExchangeTranscript:
        self.dispatch()
        a, b = self.correct()
        regs = self.state.registers
        return ExchangeTranscript(
            m=self.m,
            n=self.n,
            l=len(regs["C"]),
            input_xi=tuple(complex(x) for x in self.xi.amplitudes),
            input_eta=tuple(complex(x) for x in self.eta.amplitudes),
            r=self.channel.receive(ALICE_BSM),
            s=self.channel.receive(BOB_BSM),
            charlie_outcome=self.c,
            channel=self.assignment[self.c],
            messages=tuple(self.channel.log),
            alice_correction=a,
            bob_correction=b,
            fidelity_at_bob=marginal_fidelity(self.state, regs["B'"], self.xi),
            fidelity_at_alice=marginal_fidelity(self.state, regs["A''"], self.eta),
            branch_probability=self.probability,
            bypass_guess=self.bypass,
        )


def _resolve(spec, xi, eta, resource):
    if resource is None:
        if spec is None:
            spec = ResourceSpec(xi.num_qubits, eta.num_qubits)
        if (spec.m, spec.n) != (xi.num_qubits, eta.num_qubits):
            raise ValueError(
                f"spec is for m={spec.m}, n={spec.n}; inputs have "
                f"{xi.num_qubits} and {eta.num_qubits} qubits"
            )
        resource = standard_resource(spec)
    return spec, resource


def run_exchange(
    spec: ResourceSpec | None,
    xi: QuantumState,
    eta: QuantumState,
    *,
    outcomes: tuple[int, int, int] | None = None,
    seed: int | None = None,
    rng: np.random.Generator | None = None,
    resource: SharedResource | None = None,
    bypass: tuple[int, int] | None = None,
) -> ExchangeTranscript:
    """Run one exchange of ``xi`` (Alice to Bob) and ``eta`` (Bob to Alice).

    Either force the branch with ``outcomes=(r, s, c)`` or sample it from
    ``seed``/``rng``.  ``resource`` overrides the standard resource built
    from ``spec``.  With ``bypass=(g', g'')`` Alice and Bob skip Charlie and
    correct for the guessed channel pair.
    """
    spec, resource = _resolve(spec, xi, eta, resource)
    ex = _Exchange(spec, xi, eta, resource, bypass)
    if outcomes is None:
        if rng is None:
            rng = stream(0 if seed is None else seed)
        ex.alice_bsm(rng=rng)
        ex.bob_bsm(rng=rng)
        ex.charlie_measure(rng=rng)
    else:
        r, s, c = outcomes
        ex.alice_bsm(r)
        ex.bob_bsm(s)
        ex.charlie_measure(c)
    return ex.finish()


@dataclass(frozen=True)
class Branch:
    r: int
    s: int
    c: int
    probability: float
    transcript: ExchangeTranscript = field(repr=False)


def _nonzero(probs: np.ndarray) -> Iterator[int]:
    return (int(k) for k in np.flatnonzero(probs >= ZERO_BRANCH_TOL))


def iter_branches(
    spec: ResourceSpec | None,
    xi: QuantumState,
    eta: QuantumState,
    *,
    resource: SharedResource | None = None,
    bypass: tuple[int, int] | None = None,
) -> Iterator[Branch]:
    spec, resource = _resolve(spec, xi, eta, resource)
    root = _Exchange(spec, xi, eta, resource, bypass)
    if root.state.num_qubits > MAX_ENUMERATION_QUBITS:
        raise ValueError(
            f"branch enumeration is limited to {MAX_ENUMERATION_QUBITS} qubits, "
            f"got {root.state.num_qubits}"
        )
    regs = root.state.registers

    def probs_for(state, half1, half2):
        return _gbs_probabilities(state, list(half1) + list(half2), gbs_basis(len(half1)))

    for r in _nonzero(probs_for(root.state, regs["A"], regs["A'"])):
        ex_r = _fork(root)
        ex_r.alice_bsm(r)
        for s in _nonzero(probs_for(ex_r.state, regs["B"], regs["B''"])):
            ex_s = _fork(ex_r)
            ex_s.bob_bsm(s)
            c_probs = computational_probabilities(ex_s.state, regs["C"]) if regs["C"] else np.ones(1)
            for c in _nonzero(c_probs):
                ex_c = _fork(ex_s)
                ex_c.charlie_measure(c)
                t = ex_c.finish()
                yield Branch(r, s, c, t.branch_probability, t)


def _fork(ex: _Exchange) -> _Exchange:
    new = _Exchange.__new__(_Exchange)
    new.__dict__.update(ex.__dict__)
    new.channel = ClassicalChannel()
    new.channel.log = list(ex.channel.log)
    return new


def _gbs_probabilities(state: QuantumState, qubits: Sequence[int], basis: np.ndarray) -> np.ndarray:
    n = state.num_qubits
    rest = [q for q in range(n) if q not in qubits]
    mat = state.amplitudes.reshape((2,) * n).transpose(list(qubits) + rest).reshape(len(basis), -1)
    coeffs = basis.conj() @ mat
    return np.einsum("ij,ij->i", coeffs, coeffs.conj()).real


def enumerate_branches(
    spec: ResourceSpec | None,
    xi: QuantumState,
    eta: QuantumState,
    *,
    resource: SharedResource | None = None,
    bypass: tuple[int, int] | None = None,
) -> list[Branch]:
    """Every measurement branch ``(r, s, c)`` with nonzero probability, each run to completion."""
    return list(iter_branches(spec, xi, eta, resource=resource, bypass=bypass))


def verify_rewrite_identity(side: str, k: int, i: int, psi: QuantumState) -> float:
    """Max amplitude deviation between ``|psi> (x) |E^(i)>`` and its GBS-basis rewrite.

    The right-hand side is ``2^{-k} sum_r |E^(r)> (x) U^(i) U^(r) |psi>``,
    built from the string algebra (signs included).  ``side`` picks the
    register labels: ``"alice"`` rewrites ``A, A', B'``; ``"bob"`` rewrites
    ``B, B'', A''``.
    """
    if side not in ("alice", "bob"):
        raise ValueError("side must be 'alice' or 'bob'")
    if psi.num_qubits != k:
        raise ValueError(f"psi has {psi.num_qubits} qubits, expected {k}")
    own, near, far = ("A", "A'", "B'") if side == "alice" else ("B", "B''", "A''")
    msg = QuantumState(psi.amplitudes, {own: tuple(range(k))})
    lhs = tensor_all(msg, build_gbs(k, i, (near, far)))

    rhs = np.zeros(2 ** (3 * k), dtype=np.complex128)
    u_i = PauliString.from_index(i, k)
    for r in range(4**k):
        moved = make_state(psi.amplitudes, {far: range(k)})
        moved = apply_string(moved, compose(u_i, PauliString.from_index(r, k)), range(k))
        rhs += np.kron(build_gbs(k, r, (own, near)).amplitudes, moved.amplitudes)
    rhs /= 2**k
    return float(np.max(np.abs(lhs.amplitudes - rhs)))


def bob_marginal_before_dispatch(
    spec: ResourceSpec | None, xi: QuantumState, eta: QuantumState, r: int, s: int
) -> np.ndarray:
    """Bob's state on ``B'`` after both BSMs, before any word from Charlie."""
    spec, resource = _resolve(spec, xi, eta, None)
    ex = _Exchange(spec, xi, eta, resource, None)
    ex.alice_bsm(r)
    ex.bob_bsm(s)
    return reduced_density(ex.state, ex.state.registers["B'"])
