"""Quaternary-indexed Pauli strings and the generalized Bell basis.

Digit values 0, 1, 2, 3 stand for I, sigma_z, sigma_x and sigma_x sigma_z.
All four are real, so products only ever pick up a sign, which
:class:`PauliString` carries explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .qstate import SIGMA, MeasurementRecord, QuantumState, _apply_pauli_vec, make_state, measure_in_basis

# (a, b) -> (c, sign) with sigma^a sigma^b = sign * sigma^c
_PRODUCT_TABLE: dict[tuple[int, int], tuple[int, int]] = {
    (0, 0): (0, 1), (0, 1): (1, 1), (0, 2): (2, 1), (0, 3): (3, 1),
    (1, 0): (1, 1), (1, 1): (0, 1), (1, 2): (3, -1), (1, 3): (2, -1),
    (2, 0): (2, 1), (2, 1): (3, 1), (2, 2): (0, 1), (2, 3): (1, 1),
    (3, 0): (3, 1), (3, 1): (2, 1), (3, 2): (1, -1), (3, 3): (0, -1),
}

# sigma^a dagger = sign * sigma^a; only sigma_x sigma_z is antisymmetric
_DAGGER_SIGN = (1, 1, 1, -1)


def pauli_product(a: int, b: int) -> tuple[int, int]:
    return _PRODUCT_TABLE[(a, b)]


def product_table_mismatches() -> list[tuple[int, int]]:
    """Entries of the product table that disagree with 2x2 matrix multiplication."""
    bad = []
    for a in range(4):
        for b in range(4):
            c, sign = _PRODUCT_TABLE[(a, b)]
            if not np.array_equal(SIGMA[a] @ SIGMA[b], sign * SIGMA[c]):
                bad.append((a, b))
    return bad


def digits_of(index: int, k: int) -> tuple[int, ...]:
    """Big-endian base-4 digits of ``index``, padded to length ``k``."""
    if not 0 <= index < 4**k:
        raise ValueError(f"index {index} out of range for {k} quaternary digits")
    out = []
    for _ in range(k):
        index, d = divmod(index, 4)
        out.append(d)
    return tuple(reversed(out))


def index_of(digits: Sequence[int]) -> int:
    value = 0
    for d in digits:
        value = 4 * value + d
    return value


@dataclass(frozen=True)
class PauliString:
    digits: tuple[int, ...]
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        if any(d not in (0, 1, 2, 3) for d in self.digits):
            raise ValueError(f"digits must be in 0..3, got {self.digits}")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    @classmethod
    def from_index(cls, index: int, k: int) -> PauliString:
        return cls(digits_of(index, k))

    @classmethod
    def identity(cls, k: int) -> PauliString:
        return cls((0,) * k)

    @property
    def index(self) -> int:
        return index_of(self.digits)

    def __len__(self) -> int:
        return len(self.digits)

    def matrix(self) -> np.ndarray:
        out = np.array([[float(self.sign)]])
        for d in self.digits:
            out = np.kron(out, SIGMA[d])
        return out

    def __str__(self) -> str:
        return ("-" if self.sign < 0 else "+") + "".join(map(str, self.digits))


def compose(a: PauliString, b: PauliString) -> PauliString:
    """Operator product ``a @ b`` computed digit by digit."""
    if len(a) != len(b):
        raise ValueError(f"cannot compose strings of length {len(a)} and {len(b)}")
    sign = a.sign * b.sign
    digits = []
    for x, y in zip(a.digits, b.digits):
        c, s = _PRODUCT_TABLE[(x, y)]
        digits.append(c)
        sign *= s
    return PauliString(tuple(digits), sign)


def dagger(s: PauliString) -> PauliString:
    sign = s.sign
    for d in s.digits:
        sign *= _DAGGER_SIGN[d]
    return PauliString(s.digits, sign)


def gbs_pattern(k: int, index: int) -> np.ndarray:
    """Unnormalized GBS vector with entries in {0, +1, -1}; divide by ``2^{k/2}`` to normalize."""
    if not 0 <= index < 4**k:
        raise ValueError(f"GBS index {index} out of range for k={k}")
    dim = 2**k
    vec = np.zeros(dim * dim, dtype=np.complex128)
    vec[np.arange(dim) * dim + np.arange(dim)] = 1
    for q, d in enumerate(digits_of(index, k), start=k):
        if d:
            vec = _apply_pauli_vec(vec, 2 * k, d, q)
    return vec


def build_gbs(k: int, index: int, names: tuple[str, str] = ("L", "R")) -> QuantumState:
    """Generalized Bell state: ``U^(index)`` on the second half of ``2^{-k/2} sum_j |j>|j>``."""
    return make_state(
        gbs_pattern(k, index) / np.sqrt(2**k),
        {names[0]: range(k), names[1]: range(k, 2 * k)},
    )


@lru_cache(maxsize=None)
def _gbs_basis_cached(k: int) -> np.ndarray:
    rows = np.array([build_gbs(k, i).amplitudes for i in range(4**k)])
    rows.flags.writeable = False
    return rows


def gbs_basis(k: int) -> np.ndarray:
    """All ``4^k`` GBS vectors as rows, indexed by GBS index."""
    return _gbs_basis_cached(k)


def gbs_measure(
    state: QuantumState,
    half1: Sequence[int],
    half2: Sequence[int],
    outcome: int | None = None,
    rng: np.random.Generator | None = None,
) -> MeasurementRecord:
    """Measure ``half1 + half2`` in the GBS basis; the outcome is the GBS index."""
    if len(half1) != len(half2):
        raise ValueError("GBS halves must have equal size")
    k = len(half1)
    return measure_in_basis(state, list(half1) + list(half2), gbs_basis(k), outcome, rng)
