"""Entangled resources shared by Alice, Bob and the controller Charlie.

Register names: ``A'``/``B'`` carry the Alice-to-Bob channel (Pauli frame on
``B'``), ``B''``/``A''`` the Bob-to-Alice channel (frame on ``A''``), and
``C`` holds Charlie's qubits.  Charlie's computational outcome ``c`` selects
the channel pair ``(i', i'')`` through a :class:`ChannelAssignment`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .pauli import gbs_pattern
from .qstate import QuantumState, make_state

RESOURCE_ORDER = ("A'", "B'", "B''", "A''", "C")


@dataclass(frozen=True)
class Permutation:
    """Bijection on ``range(len(forward))``; ``forward[i]`` is Charlie's basis label for term ``i``."""

    forward: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "forward", tuple(int(x) for x in self.forward))
        if sorted(self.forward) != list(range(len(self.forward))):
            raise ValueError(f"not a permutation: {self.forward}")

    @classmethod
    def identity(cls, size: int) -> Permutation:
        return cls(tuple(range(size)))

    @property
    def inverse(self) -> tuple[int, ...]:
        inv = [0] * len(self.forward)
        for i, c in enumerate(self.forward):
            inv[c] = i
        return tuple(inv)

    def __len__(self) -> int:
        return len(self.forward)


@dataclass(frozen=True)
class ResourceSpec:
    m: int
    n: int
    charlie_qubits: int | None = None
    phi: Permutation | None = None

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("message sizes m, n must be >= 1")
        if self.charlie_qubits is None:
            object.__setattr__(self, "charlie_qubits", 2 * self.p)
        if self.charlie_qubits < 0:
            raise ValueError("charlie_qubits must be >= 0")
        if self.phi is None:
            object.__setattr__(self, "phi", Permutation.identity(2**self.charlie_qubits))
        elif len(self.phi) != 2**self.charlie_qubits:
            raise ValueError(
                f"phi must permute {2**self.charlie_qubits} labels, got {len(self.phi)}"
            )

    @property
    def p(self) -> int:
        return max(self.m, self.n)

    @property
    def l(self) -> int:
        return self.charlie_qubits

    @property
    def total_qubits(self) -> int:
        """Qubits in the full exchange: both messages plus the resource."""
        return 2 * self.m + 2 * self.n + self.charlie_qubits + self.m + self.n

    def assignment(self) -> ChannelAssignment:
        if self.charlie_qubits != 2 * self.p:
            raise ValueError("the standard resource needs charlie_qubits = 2 * max(m, n)")
        inv = self.phi.inverse
        return ChannelAssignment(
            self.m,
            self.n,
            tuple((inv[c] % 4**self.m, inv[c] % 4**self.n) for c in range(2**self.charlie_qubits)),
        )


@dataclass(frozen=True)
class ChannelAssignment:
    """Channel pair ``(i', i'')`` for each Charlie outcome (list index)."""

    m: int
    n: int
    channels: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        size = len(self.channels)
        if size == 0 or size & (size - 1):
            raise ValueError("need 2^l channel entries")
        for a, b in self.channels:
            if not (0 <= a < 4**self.m and 0 <= b < 4**self.n):
                raise ValueError(f"channel {(a, b)} out of range for m={self.m}, n={self.n}")

    @property
    def l(self) -> int:
        return len(self.channels).bit_length() - 1

    def __getitem__(self, outcome: int) -> tuple[int, int]:
        if not 0 <= outcome < len(self.channels):
            raise IndexError(f"Charlie outcome {outcome} out of range")
        return self.channels[outcome]

    def __len__(self) -> int:
        return len(self.channels)


class SharedResource(NamedTuple):
    state: QuantumState
    assignment: ChannelAssignment


def channel_of(spec: ResourceSpec | ChannelAssignment, charlie_outcome: int) -> tuple[int, int]:
    assignment = spec if isinstance(spec, ChannelAssignment) else spec.assignment()
    return assignment[charlie_outcome]


def _registers(m: int, n: int, l: int) -> dict[str, range]:
    sizes = {"A'": m, "B'": m, "B''": n, "A''": n, "C": l}
    regs, pos = {}, 0
    for name in RESOURCE_ORDER:
        regs[name] = range(pos, pos + sizes[name])
        pos += sizes[name]
    return regs


def build_channel_resource(assignment: ChannelAssignment) -> QuantumState:
    """Equal-weight superposition ``2^{-l/2} sum_c |E^(i'_c)> |E^(i''_c)> |c>``."""
    m, n, l = assignment.m, assignment.n, assignment.l
    vec = np.zeros(2 ** (2 * m + 2 * n + l), dtype=np.complex128)
    for c, (i1, i2) in enumerate(assignment.channels):
        charlie = np.zeros(2**l)
        charlie[c] = 1
        vec += np.kron(np.kron(gbs_pattern(m, i1), gbs_pattern(n, i2)), charlie)
    # one scale factor so equal constructions agree bit for bit
    vec /= np.sqrt(2.0 ** (m + n + l))
    return make_state(vec, _registers(m, n, l))


def build_resource(spec: ResourceSpec) -> QuantumState:
    """Generalized resource: ``2^{-p} sum_i |E^(i mod 4^m)> |E^(i mod 4^n)> |phi(i)>``."""
    return build_channel_resource(spec.assignment())


# rows: Bell vectors 0..3 times sqrt(2)
_BELL = np.array(
    [
        [1, 0, 0, 1],
        [1, 0, 0, -1],
        [0, 1, 1, 0],
        [0, 1, -1, 0],
    ],
    dtype=np.complex128,
)


def build_sse(phi: Permutation | Sequence[int] | None = None) -> QuantumState:
    """Six-qubit SSE state on (A1, B1, B2, A2, C1, C2), written out from the four Bell vectors."""
    if phi is None:
        phi = Permutation.identity(4)
    elif not isinstance(phi, Permutation):
        phi = Permutation(tuple(phi))
    if len(phi) != 4:
        raise ValueError("SSE needs a permutation of 4 Charlie labels")
    vec = np.zeros(64, dtype=np.complex128)
    for i in range(4):
        charlie = np.zeros(4)
        charlie[phi.forward[i]] = 1
        vec += np.kron(np.kron(_BELL[i], _BELL[i]), charlie)
    return make_state(vec / 4, _registers(1, 1, 2))


def _security_channels(l: int) -> tuple[tuple[int, int], ...]:
    if l == 0:
        return ((0, 0),)
    if l == 1:
        return ((0, 0), (1, 1))
    if l == 2:
        return tuple((i, i) for i in range(4))
    if l == 3:
        return ((0, 0), (1, 1), (2, 2), (3, 3), (0, 1), (1, 0), (2, 3), (3, 2))
    if l in (4, 5):
        # low four bits of c pick (i, j); at l=5 each pair appears twice
        return tuple(((c >> 2) & 3, c & 3) for c in range(2**l))
    raise ValueError(f"security variants exist for l in 0..5, got {l}")


def build_security_variant(l: int) -> SharedResource:
    """Single-qubit exchange resource with ``l`` qubits held by Charlie."""
    assignment = ChannelAssignment(1, 1, _security_channels(l))
    return SharedResource(build_channel_resource(assignment), assignment)


def standard_resource(spec: ResourceSpec) -> SharedResource:
    return SharedResource(build_resource(spec), spec.assignment())
