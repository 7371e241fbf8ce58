# This module handles Pauli strings, Pauli-basis coefficients and replica contractions
# Letters are coded I=0, X=1, Y=2, Z=3; string index is most-significant-letter first
import itertools
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..config import get_settings
from ..errors import ArgumentError, SizeError
from .linalg import DensityOperator, State, as_density, check_dense_cap, qubit_count

PAULI_LABELS = "IXYZ"

PAULI_MATRICES = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)
PAULI_MATRICES.setflags(write=False)

# Single-letter products a*b = i**power * c
_PRODUCT_LETTER = np.array([[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]])
_PRODUCT_POWER = np.array([[0, 0, 0, 0], [0, 0, 1, 3], [0, 3, 0, 1], [0, 1, 3, 0]])


@dataclass(frozen=True)
class PauliString:
    letters: str
    sign: int = 1

    def __post_init__(self):
        if not self.letters or any(ch not in PAULI_LABELS for ch in self.letters):
            raise ArgumentError(f"Invalid Pauli letters {self.letters!r}")
        if self.sign not in (1, -1):
            raise ArgumentError(f"Pauli sign must be +1 or -1, got {self.sign}")

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def codes(self) -> Tuple[int, ...]:
        return tuple(PAULI_LABELS.index(ch) for ch in self.letters)

    @property
    def index(self) -> int:
        out = 0
        for c in self.codes:
            out = 4 * out + c
        return out

    @classmethod
    def from_index(cls, index: int, n: int, sign: int = 1) -> "PauliString":
        if not 0 <= index < 4**n:
            raise ArgumentError(f"Pauli index {index} out of range for n={n}")
        letters = []
        for _ in range(n):
            letters.append(PAULI_LABELS[index % 4])
            index //= 4
        return cls("".join(reversed(letters)), sign)

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        text = text.strip()
        sign = -1 if text.startswith("-") else 1
        return cls(text.lstrip("+-"), sign)

    def is_identity(self) -> bool:
        return set(self.letters) == {"I"}

    # This returns the binary symplectic representation as (x, z) bit masks
    def symplectic(self) -> Tuple[int, int]:
        x = z = 0
        for c in self.codes:
            x = (x << 1) | (c in (1, 2))
            z = (z << 1) | (c in (2, 3))
        return x, z

    def commutes_with(self, other: "PauliString") -> bool:
        if other.n != self.n:
            raise ArgumentError("Pauli strings act on different numbers of qubits")
        x1, z1 = self.symplectic()
        x2, z2 = other.symplectic()
        return bin((x1 & z2) ^ (z1 & x2)).count("1") % 2 == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        if other.n != self.n:
            raise ArgumentError("Pauli strings act on different numbers of qubits")
        letters, power = [], 0
        for a, b in zip(self.codes, other.codes):
            letters.append(PAULI_LABELS[_PRODUCT_LETTER[a, b]])
            power += int(_PRODUCT_POWER[a, b])
        if power % 2:
            raise ArgumentError(f"{self} and {other} anticommute; their product is not Hermitian")
        sign = self.sign * other.sign * (-1 if power % 4 == 2 else 1)
        return PauliString("".join(letters), sign)

    def matrix(self) -> np.ndarray:
        check_dense_cap(self.n)
        out = np.ones((1, 1), dtype=np.complex128)
        for c in self.codes:
            out = np.kron(out, PAULI_MATRICES[c])
        return self.sign * out

    def __str__(self) -> str:
        return ("+" if self.sign > 0 else "-") + self.letters


# ==================== PAULI COEFFICIENTS ====================

# _TO_PAULI[a, 2r+c] = P_a[c, r], so that sum over (r, c) of rho[r, c] P_a[c, r] = tr[rho P_a]
_TO_PAULI = np.einsum("acr->arc", PAULI_MATRICES).reshape(4, 4)
# _FROM_PAULI[2r+c, a] = P_a[r, c] / 2
_FROM_PAULI = (PAULI_MATRICES.reshape(4, 4) / 2).T


def _apply_per_axis(t: np.ndarray, local: np.ndarray) -> np.ndarray:
    """Apply `local` (out x in) along every axis of t."""
    for axis in range(t.ndim):
        t = np.moveaxis(np.tensordot(local, t, axes=([1], [axis])), 0, axis)
    return t


def pauli_coefficients(state: State) -> np.ndarray:
    """All 4**n values tr[rho P], flat, indexed by PauliString.index."""
    rho = as_density(state)
    n = rho.n
    check_dense_cap(n)
    t = rho.matrix.reshape((2,) * (2 * n))
    # interleave (row_q, col_q) pairs and fuse them into one axis of size 4 per qubit
    order = [ax for q in range(n) for ax in (q, q + n)]
    t = np.transpose(t, order).reshape((4,) * n)
    coeffs = _apply_per_axis(t, _TO_PAULI)
    return np.ascontiguousarray(coeffs.real.reshape(-1))


def state_from_pauli_coefficients(coeffs: np.ndarray) -> DensityOperator:
    coeffs = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
    n = qubit_count(coeffs.size) // 2
    if 4**n != coeffs.size:
        raise ArgumentError(f"{coeffs.size} coefficients do not form a 4**n vector")
    check_dense_cap(n)
    t = _apply_per_axis(coeffs.reshape((4,) * n), _FROM_PAULI)
    t = t.reshape((2, 2) * n)
    order = [2 * q for q in range(n)] + [2 * q + 1 for q in range(n)]
    matrix = np.transpose(t, order).reshape(2**n, 2**n)
    return DensityOperator(matrix)


def pauli_letters_table(n: int) -> np.ndarray:
    """(4**n, n) array of letter codes, row k spelling PauliString.from_index(k, n)."""
    idx = np.arange(4**n)
    return np.stack([(idx >> (2 * (n - 1 - q))) & 3 for q in range(n)], axis=1)


# ==================== REPLICA CONTRACTIONS ====================

def replica_tensor(op: np.ndarray, m: int) -> np.ndarray:
    """t[a_1..a_m] = tr[op (P_a1 x ... x P_am)] / 2**m for a one-qubit operator on m replicas."""
    op = np.asarray(op, dtype=np.complex128)
    if op.shape != (2**m, 2**m):
        raise ArgumentError(f"Operator of shape {op.shape} does not act on {m} replicas")
    out = np.zeros((4,) * m)
    for letters in itertools.product(range(4), repeat=m):
        basis = np.ones((1, 1), dtype=np.complex128)
        for a in letters:
            basis = np.kron(basis, PAULI_MATRICES[a])
        out[letters] = np.trace(op @ basis).real / 2**m
    return out


def _interleaved_outer(vectors: Sequence[np.ndarray], n: int) -> np.ndarray:
    k = len(vectors)
    t = vectors[0].reshape((4,) * n)
    for v in vectors[1:]:
        t = np.multiply.outer(t, v.reshape((4,) * n))
    # axes are (v1 qubits..., v2 qubits..., ...); regroup to (q0: v1..vk, q1: v1..vk, ...)
    order = [j * n + q for q in range(n) for j in range(k)]
    return np.transpose(t, order).reshape((4**k,) * n)


def contract_replicas(local: np.ndarray, vectors: Sequence[np.ndarray], max_n: int = None) -> float:
    """Sum over Pauli strings of prod_k c_k[P^k] prod_q local[P^1_q, ..., P^m_q].

    `local` is a one-qubit replica tensor of shape (4,)*m and `vectors` the m
    Pauli-coefficient vectors, one per replica. Replicas are split into two
    halves so memory stays at 16**n.
    """
    m = len(vectors)
    if local.shape != (4,) * m:
        raise ArgumentError(f"Replica tensor shape {local.shape} does not match {m} vectors")
    n = qubit_count(vectors[0].size) // 2
    if any(v.size != 4**n for v in vectors):
        raise ArgumentError("Pauli-coefficient vectors have different lengths")
    cap = max_n if max_n is not None else get_settings().transfer_cap
    if m > 2 and n > cap:
        raise SizeError(f"Replica contraction at n={n} exceeds the transfer cap of {cap}")
    split = (m + 1) // 2
    left = _interleaved_outer(vectors[:split], n)
    right = _interleaved_outer(vectors[split:], n)
    transfer = local.reshape(4**split, 4 ** (m - split))
    for axis in range(n):
        left = np.moveaxis(np.tensordot(left, transfer, axes=([axis], [0])), -1, axis)
    return float(np.sum(left * right))
