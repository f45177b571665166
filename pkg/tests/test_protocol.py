import itertools

import numpy as np
import pytest

from sqie.pauli import PauliString, build_gbs
from sqie.protocol import (
    ALICE_BSM,
    BOB_BSM,
    CHARLIE_TO_ALICE,
    CHARLIE_TO_BOB,
    ClassicalChannel,
    ClassicalMessage,
    bob_marginal_before_dispatch,
    compute_corrections,
    enumerate_branches,
    run_exchange,
    verify_rewrite_identity,
)
from sqie.qstate import SIGMA, ZeroProbabilityBranch, basis_state, random_state, tensor_all, trace_distance
from sqie.resource import ChannelAssignment, Permutation, ResourceSpec, SharedResource, build_security_variant

BELL = np.array([[1, 0, 0, 1], [1, 0, 0, -1], [0, 1, 1, 0], [0, 1, -1, 0]]) / np.sqrt(2)


def brute_force_outputs(xi, eta, r, s, c):
    """Single-qubit exchange by explicit 256x256 operators on (A, A1, B1, B2, A2, B, C1, C2).

    Returns (probability, Bob's output vector on B1, Alice's output vector on A2)
    after Charlie's prescribed corrections for channel pair (c, c).
    """
    sse = sum(np.kron(np.kron(BELL[i], BELL[i]), np.eye(4)[i]) for i in range(4)) / 2
    # qubit order A | A1 B1 B2 A2 C1 C2 | B -> move B before C
    full = np.kron(np.kron(xi, sse), eta).reshape([2] * 8).transpose(0, 1, 2, 3, 4, 7, 5, 6).reshape(-1)
    # order now A A1 B1 B2 A2 B C1 C2
    proj_a = np.outer(BELL[r], BELL[r])  # on (A, A1)
    proj_b = np.outer(BELL[s], BELL[s])  # on (B, B2)
    t = full.reshape([2] * 8)
    # apply projectors by contracting (A,A1) and (B,B2)
    t = np.einsum("abij,ijklmnop->abklmnop", proj_a.reshape(2, 2, 2, 2), t)
    t = np.einsum("xyln,ijklmnop->ijkxmyop", proj_b.reshape(2, 2, 2, 2), t)
    t = t[..., c >> 1, c & 1]
    prob = float(np.sum(np.abs(t) ** 2))
    t = t / np.sqrt(prob)
    bob_fix = (SIGMA[c] @ SIGMA[r]).T  # inverse of a real orthogonal matrix
    alice_fix = (SIGMA[c] @ SIGMA[s]).T
    t = np.einsum("kK,ijKlmn->ijklmn", bob_fix, t)
    t = np.einsum("mM,ijklMn->ijklmn", alice_fix, t)
    bob_out = t.transpose(2, 0, 1, 3, 4, 5).reshape(2, -1)
    alice_out = t.transpose(4, 0, 1, 2, 3, 5).reshape(2, -1)
    # both outputs are product factors; pick the column with the largest weight
    col_b = bob_out[:, np.argmax(np.linalg.norm(bob_out, axis=0))]
    col_a = alice_out[:, np.argmax(np.linalg.norm(alice_out, axis=0))]
    return prob, col_b / np.linalg.norm(col_b), col_a / np.linalg.norm(col_a)


def test_compute_corrections_examples():
    alice, bob = compute_corrections(0, 0, 0, 0, 1, 1)
    assert alice == PauliString.identity(1) and bob == PauliString.identity(1)
    alice, bob = compute_corrections(0, 0, 0, 3, 1, 1)
    assert alice == PauliString((3,), -1)  # dagger of sigma_x sigma_z
    # sigma_z sigma_x = -sigma_x sigma_z, and its transpose is +sigma_x sigma_z
    _, bob = compute_corrections(1, 0, 2, 0, 1, 1)
    assert bob == PauliString((3,), 1)
    np.testing.assert_array_equal(bob.matrix(), (SIGMA[1] @ SIGMA[2]).T)


@pytest.mark.parametrize("i1, i2, r, s", list(itertools.product(range(4), repeat=4))[::7])
def test_corrections_invert_channel_frame(i1, i2, r, s):
    alice, bob = compute_corrections(i1, i2, r, s, 1, 1)
    frame_b = SIGMA[i1] @ SIGMA[r]
    frame_a = SIGMA[i2] @ SIGMA[s]
    np.testing.assert_array_equal(bob.matrix() @ frame_b, np.eye(2))
    np.testing.assert_array_equal(alice.matrix() @ frame_a, np.eye(2))


def test_trivial_branch_needs_no_correction():
    zero = basis_state(0, 1)
    t = run_exchange(None, zero, zero, outcomes=(0, 0, 0))
    assert t.alice_correction == PauliString.identity(1)
    assert t.bob_correction == PauliString.identity(1)
    assert t.fidelity_at_bob == pytest.approx(1, abs=1e-15)
    assert t.fidelity_at_alice == pytest.approx(1, abs=1e-15)


def test_single_qubit_all_branches_match_brute_force(random_pair):
    xi, eta = random_pair(1, 1)
    branches = enumerate_branches(None, xi, eta)
    assert len(branches) == 64
    for b in branches:
        prob, bob_out, alice_out = brute_force_outputs(xi.amplitudes, eta.amplitudes, b.r, b.s, b.c)
        assert b.probability == pytest.approx(prob, abs=1e-12)
        assert abs(np.vdot(bob_out, xi.amplitudes)) ** 2 == pytest.approx(1, abs=1e-10)
        assert abs(np.vdot(alice_out, eta.amplitudes)) ** 2 == pytest.approx(1, abs=1e-10)
        assert b.transcript.fidelity_at_bob == pytest.approx(1, abs=1e-10)
        assert b.transcript.fidelity_at_alice == pytest.approx(1, abs=1e-10)


def test_enumeration_uniform_single_qubit(random_pair):
    xi, eta = random_pair(1, 1)
    branches = enumerate_branches(None, xi, eta)
    np.testing.assert_allclose([b.probability for b in branches], 1 / 64, atol=1e-12)
    assert sum(b.probability for b in branches) == pytest.approx(1, abs=1e-9)
    assert {(b.r, b.s, b.c) for b in branches} == set(itertools.product(range(4), repeat=3))


@pytest.mark.parametrize("m, n", [(2, 1), (1, 2)])
def test_enumeration_general_perfect_and_uniform(random_pair, m, n):
    xi, eta = random_pair(m, n)
    branches = enumerate_branches(None, xi, eta)
    assert sum(b.probability for b in branches) == pytest.approx(1, abs=1e-9)
    for b in branches:
        assert b.transcript.fidelity_at_bob == pytest.approx(1, abs=1e-10)
        assert b.transcript.fidelity_at_alice == pytest.approx(1, abs=1e-10)
    rs = {}
    for b in branches:
        rs[(b.r, b.s)] = rs.get((b.r, b.s), 0) + b.probability
    assert len(rs) == 4**m * 4**n
    np.testing.assert_allclose(list(rs.values()), 4.0**-m * 4.0**-n, atol=1e-9)


def test_enumeration_with_permuted_phi(random_pair):
    xi, eta = random_pair(1, 1)
    spec = ResourceSpec(1, 1, phi=Permutation((2, 3, 1, 0)))
    branches = enumerate_branches(spec, xi, eta)
    assert len(branches) == 64
    assert min(min(b.transcript.fidelity_at_bob, b.transcript.fidelity_at_alice) for b in branches) > 1 - 1e-10


def test_enumeration_size_limit(random_pair):
    xi, eta = random_pair(3, 1)
    with pytest.raises(ValueError):
        enumerate_branches(None, xi, eta)


def test_sampled_run_m2_n1(random_pair):
    xi, eta = random_pair(2, 1)
    t = run_exchange(None, xi, eta, seed=42)
    assert t.fidelity_at_bob == pytest.approx(1, abs=1e-10)
    assert t.fidelity_at_alice == pytest.approx(1, abs=1e-10)
    assert t.branch_probability > 0


def test_sampled_run_is_deterministic(random_pair):
    xi, eta = random_pair(1, 2)
    a = run_exchange(None, xi, eta, seed=5)
    b = run_exchange(None, xi, eta, seed=5)
    assert (a.r, a.s, a.charlie_outcome) == (b.r, b.s, b.charlie_outcome)
    assert a == b


def test_forced_zero_branch_raises():
    # Charlie's qubits pinned to |00>: outcome 1 can never occur
    state = tensor_all(
        build_gbs(1, 0, ("A'", "B'")), build_gbs(1, 0, ("B''", "A''")), basis_state(0, 2, {"C": [0, 1]})
    )
    pinned = SharedResource(state, ChannelAssignment(1, 1, ((0, 0),) * 4))
    zero = basis_state(0, 1)
    assert run_exchange(None, zero, zero, outcomes=(0, 0, 0), resource=pinned).succeeded
    with pytest.raises(ZeroProbabilityBranch):
        run_exchange(None, zero, zero, outcomes=(0, 0, 1), resource=pinned)


def test_forced_outcome_without_charlie_qubits():
    zero = basis_state(0, 1)
    with pytest.raises(ValueError):
        run_exchange(None, zero, zero, outcomes=(0, 0, 1), resource=build_security_variant(0))


def test_dimension_mismatch(random_pair):
    xi, eta = random_pair(2, 1)
    with pytest.raises(ValueError):
        run_exchange(ResourceSpec(1, 1), xi, eta, seed=0)


def test_message_order_and_widths(random_pair):
    xi, eta = random_pair(2, 1)
    t = run_exchange(None, xi, eta, seed=3)
    assert [m.kind for m in t.messages] == [ALICE_BSM, BOB_BSM, CHARLIE_TO_ALICE, CHARLIE_TO_BOB]
    assert [m.bits for m in t.messages] == [4, 2, 2, 4]
    assert t.messages[0].payload == t.r and t.messages[1].payload == t.s


def test_channel_refuses_early_dispatch():
    ch = ClassicalChannel()
    ch.send(ClassicalMessage(ALICE_BSM, 1, 2))
    with pytest.raises(RuntimeError):
        ch.send(ClassicalMessage(CHARLIE_TO_ALICE, 0, 2))
    ch.send(ClassicalMessage(BOB_BSM, 2, 2))
    ch.send(ClassicalMessage(CHARLIE_TO_ALICE, 0, 2))
    with pytest.raises(RuntimeError):
        ch.send(ClassicalMessage(CHARLIE_TO_ALICE, 0, 2))


def test_message_payload_width():
    with pytest.raises(ValueError):
        ClassicalMessage(ALICE_BSM, 4, 2)


@pytest.mark.parametrize("m, n", [(1, 1), (2, 1)])
def test_no_signaling_before_charlie(rng, m, n):
    eta = random_state(n, rng)
    xi1, xi2 = random_state(m, rng), random_state(m, rng)
    rho1 = bob_marginal_before_dispatch(None, xi1, eta, r=1, s=0)
    rho2 = bob_marginal_before_dispatch(None, xi2, eta, r=1, s=0)
    assert trace_distance(rho1, rho2) < 1e-10
    assert trace_distance(rho1, np.eye(2**m) / 2**m) < 1e-10


def test_charlie_outcome_independent_of_bsm(random_pair):
    xi, eta = random_pair(1, 1)
    branches = enumerate_branches(None, xi, eta)
    for r, s in itertools.product(range(4), repeat=2):
        cond = [b.probability for b in branches if (b.r, b.s) == (r, s)]
        np.testing.assert_allclose(np.array(cond) / sum(cond), 0.25, atol=1e-12)


def rewrite_oracle(k, i, psi):
    """Independent expansion with explicit matrices: coefficient of |E^(r)> is <E^(r)|(x)I applied to lhs."""
    dim = 2**k
    base = np.zeros(dim * dim)
    base[np.arange(dim) * dim + np.arange(dim)] = dim**-0.5
    gbs = [np.kron(np.eye(dim), PauliString.from_index(j, k).matrix()) @ base for j in range(4**k)]
    lhs = np.kron(psi, gbs[i])
    rhs = np.zeros_like(lhs)
    for r in range(4**k):
        bra = np.kron(gbs[r].conj(), np.eye(dim))  # <E^(r)| on the first 2k qubits
        coeff = bra @ lhs
        expected = PauliString.from_index(i, k).matrix() @ PauliString.from_index(r, k).matrix() @ psi / 2**k
        np.testing.assert_allclose(coeff, expected, atol=1e-12)
        rhs += np.kron(gbs[r], coeff)
    return float(np.max(np.abs(lhs - rhs)))


def test_rewrite_identity_trivial():
    assert verify_rewrite_identity("alice", 1, 0, basis_state(0, 1)) < 1e-12


@pytest.mark.parametrize("side", ["alice", "bob"])
def test_rewrite_identity_k1(rng, side):
    worst = max(verify_rewrite_identity(side, 1, i, random_state(1, rng)) for i in range(4) for _ in range(100))
    assert worst < 1e-10


def test_rewrite_identity_k2(rng):
    for i in range(16):
        psi = random_state(2, rng)
        assert verify_rewrite_identity("alice", 2, i, psi) < 1e-10
        assert verify_rewrite_identity("bob", 2, i, psi) < 1e-10


@pytest.mark.parametrize("k", [1, 2])
def test_rewrite_identity_matrix_oracle(rng, k):
    for i in range(4**k):
        psi = random_state(k, rng)
        assert rewrite_oracle(k, i, psi.amplitudes) < 1e-12


def test_rewrite_identity_detects_wrong_state(rng):
    with pytest.raises(ValueError):
        verify_rewrite_identity("alice", 2, 0, random_state(1, rng))
    with pytest.raises(ValueError):
        verify_rewrite_identity("charlie", 1, 0, random_state(1, rng))
