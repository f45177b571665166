"""Dense statevector engine.

Basis indices are big-endian: the first qubit in register order is the most
significant bit, so ``|j1 j2 ... jk>`` reads left to right.  States are
immutable; every operation returns a new :class:`QuantumState`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

MAX_QUBITS = 18
NORM_TOL = 1e-9
ZERO_BRANCH_TOL = 1e-14

# Single-qubit operators indexed 0..3: I, sigma_z, sigma_x, sigma_x sigma_z.
SIGMA = (
    np.array([[1, 0], [0, 1]], dtype=float),
    np.array([[1, 0], [0, -1]], dtype=float),
    np.array([[0, 1], [1, 0]], dtype=float),
    np.array([[0, -1], [1, 0]], dtype=float),
)


class ZeroProbabilityBranch(ValueError):
    """A forced measurement outcome has (numerically) zero probability."""


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure state of ``num_qubits`` qubits with named registers.

    ``registers`` maps a mode name (``"A"``, ``"A'"``, ``"C"``, ...) to the
    ordered global positions of its qubits.
    """

    amplitudes: np.ndarray
    registers: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    @property
    def num_qubits(self) -> int:
        return int(self.amplitudes.size).bit_length() - 1

    def qubits(self, *names: str) -> list[int]:
        """Global positions of the named registers, concatenated in order."""
        out: list[int] = []
        for name in names:
            out.extend(self.registers[name])
        return out

    def __repr__(self) -> str:
        regs = ", ".join(f"{k}={list(v)}" for k, v in self.registers.items())
        return f"QuantumState(num_qubits={self.num_qubits}, {regs})"


def _check_registers(registers: Mapping[str, Sequence[int]], num_qubits: int) -> dict[str, tuple[int, ...]]:
    regs = {name: tuple(int(q) for q in qs) for name, qs in registers.items()}
    seen = sorted(q for qs in regs.values() for q in qs)
    if seen != list(range(num_qubits)):
        raise ValueError(
            f"registers must partition qubits 0..{num_qubits - 1}, got {regs}"
        )
    return regs


def _freeze(vec: np.ndarray) -> np.ndarray:
    vec = np.ascontiguousarray(vec, dtype=np.complex128)
    vec.flags.writeable = False
    return vec


def _new(vec: np.ndarray, registers: Mapping[str, tuple[int, ...]]) -> QuantumState:
    return QuantumState(_freeze(vec), dict(registers))


def make_state(
    amplitudes: Iterable[complex],
    registers: Mapping[str, Sequence[int]] | None = None,
) -> QuantumState:
    """Build a normalized state from an amplitude list.

    The input norm must be within ``1e-9`` of one; it is then renormalized
    unless it is already one to rounding.
    Without ``registers`` all qubits go into a single register ``"q"``.
    """
    vec = np.array(list(amplitudes), dtype=np.complex128).ravel()
    size = vec.size
    if size == 0 or size & (size - 1):
        raise ValueError(f"amplitude count must be a power of two, got {size}")
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ValueError("zero vector is not a state")
    if abs(norm - 1) > NORM_TOL:
        raise ValueError(f"state is not normalized (norm={norm!r})")
    n = size.bit_length() - 1
    if registers is None:
        registers = {"q": range(n)}
    if abs(norm - 1) > 1e-15:
        vec = vec / norm
    return _new(vec, _check_registers(registers, n))


def basis_state(index: int, num_qubits: int, registers: Mapping[str, Sequence[int]] | None = None) -> QuantumState:
    vec = np.zeros(2**num_qubits, dtype=np.complex128)
    vec[index] = 1
    return make_state(vec, registers)


def random_state(num_qubits: int, rng: np.random.Generator, registers=None) -> QuantumState:
    """Haar-random pure state."""
    dim = 2**num_qubits
    vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return make_state(vec / np.linalg.norm(vec), registers)


def relabel(state: QuantumState, mapping: Mapping[str, str]) -> QuantumState:
    regs = {mapping.get(k, k): v for k, v in state.registers.items()}
    if len(regs) != len(state.registers):
        raise ValueError("relabel would merge registers")
    return QuantumState(state.amplitudes, regs)


def tensor(a: QuantumState, b: QuantumState) -> QuantumState:
    """Kronecker product; ``b``'s qubits follow ``a``'s."""
    clash = set(a.registers) & set(b.registers)
    if clash:
        raise ValueError(f"register name collision: {sorted(clash)}")
    shift = a.num_qubits
    regs = dict(a.registers)
    regs.update({k: tuple(q + shift for q in v) for k, v in b.registers.items()})
    return _new(np.kron(a.amplitudes, b.amplitudes), regs)


def tensor_all(*states: QuantumState) -> QuantumState:
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def _to_front(vec: np.ndarray, n: int, qubits: Sequence[int]) -> tuple[np.ndarray, list[int]]:
    """View with ``qubits`` as the leading (big-endian) axis group."""
    rest = [q for q in range(n) if q not in qubits]
    perm = list(qubits) + rest
    return vec.reshape((2,) * n).transpose(perm).reshape(2 ** len(qubits), -1), perm


def _from_front(mat: np.ndarray, n: int, perm: list[int]) -> np.ndarray:
    return mat.reshape((2,) * n).transpose(np.argsort(perm)).reshape(-1)


def _check_positions(state: QuantumState, qubits: Sequence[int]) -> list[int]:
    qubits = [int(q) for q in qubits]
    n = state.num_qubits
    if any(q < 0 or q >= n for q in qubits):
        raise IndexError(f"qubit position out of range for {n} qubits: {qubits}")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"qubit positions must be distinct: {qubits}")
    return qubits


def reorder(state: QuantumState, names: Sequence[str]) -> QuantumState:
    """Permute qubits so the named registers appear in ``names`` order."""
    if sorted(names) != sorted(state.registers):
        raise ValueError("reorder needs every register name exactly once")
    order = state.qubits(*names)
    n = state.num_qubits
    vec = state.amplitudes.reshape((2,) * n).transpose(order).reshape(-1)
    regs, pos = {}, 0
    for name in names:
        width = len(state.registers[name])
        regs[name] = tuple(range(pos, pos + width))
        pos += width
    return _new(vec, regs)


def _pauli_inplace(psi: np.ndarray, index: int) -> np.ndarray:
    # psi has shape (left, 2, right); returns a new array
    if index == 0:
        return psi.copy()
    out = np.empty_like(psi)
    if index == 1:
        out[:, 0] = psi[:, 0]
        out[:, 1] = -psi[:, 1]
    elif index == 2:
        out[:, 0] = psi[:, 1]
        out[:, 1] = psi[:, 0]
    elif index == 3:
        out[:, 0] = -psi[:, 1]
        out[:, 1] = psi[:, 0]
    else:
        raise ValueError(f"Pauli index must be in 0..3, got {index}")
    return out


def _apply_pauli_vec(vec: np.ndarray, n: int, index: int, qubit: int) -> np.ndarray:
    psi = vec.reshape(2**qubit, 2, 2 ** (n - qubit - 1))
    return _pauli_inplace(psi, index).reshape(-1)


def apply_pauli(state: QuantumState, pauli_index: int, qubit: int) -> QuantumState:
    """Apply ``sigma^(pauli_index)`` (I, Z, X, XZ) to one qubit."""
    (qubit,) = _check_positions(state, [qubit])
    if pauli_index not in (0, 1, 2, 3):
        raise ValueError(f"Pauli index must be in 0..3, got {pauli_index}")
    return _new(_apply_pauli_vec(state.amplitudes, state.num_qubits, pauli_index, qubit), state.registers)


def apply_string(state: QuantumState, s, qubits: Sequence[int]) -> QuantumState:
    """Apply a Pauli string: digit ``k`` acts on ``qubits[k]``; the sign multiplies the state."""
    digits = tuple(s.digits)
    if len(digits) != len(qubits):
        raise ValueError(f"string of length {len(digits)} applied to {len(qubits)} qubits")
    qubits = _check_positions(state, qubits)
    n = state.num_qubits
    vec = state.amplitudes
    for d, q in zip(digits, qubits):
        if d:
            vec = _apply_pauli_vec(vec, n, d, q)
    if s.sign == -1:
        vec = -vec
    return _new(vec, state.registers)


@dataclass(frozen=True)
class MeasurementRecord:
    outcome: int
    probability: float
    post_state: QuantumState


def _choose(probs: np.ndarray, outcome: int | None, rng: np.random.Generator | None) -> int:
    if outcome is None:
        if rng is None:
            raise ValueError("sampled measurement needs an rng")
        p = np.clip(probs, 0, None)
        return int(rng.choice(p.size, p=p / p.sum()))
    if not 0 <= outcome < probs.size:
        raise ValueError(f"forced outcome {outcome} out of range 0..{probs.size - 1}")
    if probs[outcome] < ZERO_BRANCH_TOL:
        raise ZeroProbabilityBranch(
            f"outcome {outcome} has probability {probs[outcome]:.3e}"
        )
    return int(outcome)


def computational_probabilities(state: QuantumState, qubits: Sequence[int]) -> np.ndarray:
    qubits = _check_positions(state, qubits)
    mat, _ = _to_front(state.amplitudes, state.num_qubits, qubits)
    return np.einsum("ij,ij->i", mat, mat.conj()).real


def measure_computational(
    state: QuantumState,
    qubits: Sequence[int],
    outcome: int | None = None,
    rng: np.random.Generator | None = None,
) -> MeasurementRecord:
    """Projective measurement in the computational basis.

    Pass ``outcome`` to force a branch, or ``rng`` to sample by the Born rule.
    The measured qubits stay in the post-measurement state, projected.
    """
    qubits = _check_positions(state, qubits)
    n = state.num_qubits
    mat, perm = _to_front(state.amplitudes, n, qubits)
    probs = np.einsum("ij,ij->i", mat, mat.conj()).real
    k = _choose(probs, outcome, rng)
    post = np.zeros_like(mat)
    post[k] = mat[k] / np.sqrt(probs[k])
    return MeasurementRecord(k, float(probs[k]), _new(_from_front(post, n, perm), state.registers))


def measure_in_basis(
    state: QuantumState,
    qubits: Sequence[int],
    basis: np.ndarray,
    outcome: int | None = None,
    rng: np.random.Generator | None = None,
) -> MeasurementRecord:
    """Projective measurement onto the orthonormal rows of ``basis``."""
    qubits = _check_positions(state, qubits)
    n = state.num_qubits
    mat, perm = _to_front(state.amplitudes, n, qubits)
    coeffs = basis.conj() @ mat
    probs = np.einsum("ij,ij->i", coeffs, coeffs.conj()).real
    k = _choose(probs, outcome, rng)
    post = np.outer(basis[k], coeffs[k] / np.sqrt(probs[k]))
    return MeasurementRecord(k, float(probs[k]), _new(_from_front(post, n, perm), state.registers))


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """``|<a|b>|^2``."""
    if a.amplitudes.size != b.amplitudes.size:
        raise ValueError(f"dimension mismatch: {a.num_qubits} vs {b.num_qubits} qubits")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def reduced_density(state: QuantumState, keep: Sequence[int]) -> np.ndarray:
    """Partial trace over every qubit not in ``keep`` (output ordered as ``keep``)."""
    keep = _check_positions(state, keep)
    mat, _ = _to_front(state.amplitudes, state.num_qubits, keep)
    return mat @ mat.conj().T


def marginal_fidelity(state: QuantumState, qubits: Sequence[int], target: QuantumState) -> float:
    """``<target| rho |target>`` where ``rho`` is the marginal on ``qubits``."""
    rho = reduced_density(state, qubits)
    if rho.shape[0] != target.amplitudes.size:
        raise ValueError("target size does not match the marginal")
    t = target.amplitudes
    return float(np.real(t.conj() @ rho @ t))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    return float(0.5 * np.abs(np.linalg.eigvalsh(rho - sigma)).sum())
