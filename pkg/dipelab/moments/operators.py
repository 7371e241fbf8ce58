# This module builds the one-qubit replica operators whose n-fold tensor powers give the variance coefficients
# Replica order is (A1, B1, A2, B2) for fourth moments, (A, A', B) / (A, B, B') for third moments
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from ..errors import ArgumentError
from ..qcore import PAULI_MATRICES, is_hermitian, permutation_from_cycles, permutation_operator, replica_tensor, swap_operator

logger = logging.getLogger(__name__)


class ReplicaLabel(str, Enum):
    SECOND_MOMENT = "second_moment"
    R_AAB = "r_aab"
    R_ABB = "r_abb"
    R4_CLIFFORD = "r4_clifford"
    R4_HAAR = "r4_haar"
    OMEGA2_SHADOW = "omega2_shadow"
    OMEGA3_SHADOW = "omega3_shadow"


@dataclass(frozen=True)
class ReplicaOperator:
    label: ReplicaLabel
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if not is_hermitian(m):
            raise ArgumentError(f"Replica operator {self.label.value} is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def m(self) -> int:
        return int(self.matrix.shape[0]).bit_length() - 1

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def on_product(self, vectors: Sequence[np.ndarray]) -> float:
        """tr[R (psi_1 x ... x psi_m)] for one-qubit pure states given as vectors."""
        vec = np.ones(1, dtype=np.complex128)
        for v in vectors:
            vec = np.kron(vec, np.asarray(v, dtype=np.complex128))
        return float(np.real(np.vdot(vec, self.matrix @ vec)))

    def pauli_tensor(self) -> np.ndarray:
        return _pauli_tensor(self.label)


def _swap(m: int, i: int, j: int) -> np.ndarray:
    return swap_operator(m, i, j)


def _pauli_power(letter: int, m: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for _ in range(m):
        out = np.kron(out, PAULI_MATRICES[letter])
    return out


# ==================== SECOND AND THIRD MOMENTS ====================

@lru_cache(maxsize=None)
def second_moment_operator() -> ReplicaOperator:
    """2I + F on (A, B)."""
    return ReplicaOperator(ReplicaLabel.SECOND_MOMENT, 2 * np.eye(4) + _swap(2, 0, 1))


@lru_cache(maxsize=None)
def build_third_moment_operators() -> Tuple[ReplicaOperator, ReplicaOperator]:
    eye = np.eye(8)
    r_aab = -eye + 1.5 * _swap(3, 0, 1) + 0.5 * _swap(3, 0, 2) + 0.5 * _swap(3, 1, 2)
    r_abb = -eye + 1.5 * _swap(3, 1, 2) + 0.5 * _swap(3, 0, 1) + 0.5 * _swap(3, 0, 2)
    return ReplicaOperator(ReplicaLabel.R_AAB, r_aab), ReplicaOperator(ReplicaLabel.R_ABB, r_abb)


# ==================== FOURTH MOMENTS ====================

def local_kernel_operator(a: np.ndarray) -> np.ndarray:
    """O_1 = I/2 + (3/2) a x a, the one-qubit kernel operator for measurement observable a = V^dag Z V."""
    return np.eye(4) / 2 + 1.5 * np.kron(a, a)


@lru_cache(maxsize=None)
def build_r4_clifford() -> ReplicaOperator:
    # -I + (F12 + F34)/2 + (3/2) * (I + XXXX + YYYY + ZZZZ)/2
    commutant = (np.eye(16) + sum(_pauli_power(k, 4) for k in (1, 2, 3))) / 2
    matrix = -np.eye(16) + 0.5 * (_swap(4, 0, 1) + _swap(4, 2, 3)) + 1.5 * commutant
    return ReplicaOperator(ReplicaLabel.R4_CLIFFORD, matrix)


@lru_cache(maxsize=None)
def build_r4_haar() -> ReplicaOperator:
    f = {(i, j): _swap(4, i, j) for i in range(4) for j in range(i + 1, 4)}
    double = (
        permutation_operator(permutation_from_cycles([(0, 1), (2, 3)], 4))
        + permutation_operator(permutation_from_cycles([(0, 2), (1, 3)], 4))
        + permutation_operator(permutation_from_cycles([(0, 3), (1, 2)], 4))
    )
    matrix = (
        (np.eye(16) + f[0, 1] + f[2, 3]) / 5
        + 0.6 * double
        - 0.3 * (f[0, 2] + f[1, 3] + f[0, 3] + f[1, 2])
    )
    return ReplicaOperator(ReplicaLabel.R4_HAAR, matrix)


def r4_haar_from_sphere_moments() -> np.ndarray:
    """-I/4 + (F12 + F34)/2 + (9/4) E[a^x4] with E[a^x4] from isotropic Bloch-vector moments."""
    eye = np.eye(16)
    s = {(i, j): 2 * _swap(4, i, j) - eye for i in range(4) for j in range(i + 1, 4)}
    fourth = (s[0, 1] @ s[2, 3] + s[0, 2] @ s[1, 3] + s[0, 3] @ s[1, 2]) / 15
    return -eye / 4 + 0.5 * (_swap(4, 0, 1) + _swap(4, 2, 3)) + 2.25 * fourth


def sampled_fourth_moment(directions: np.ndarray) -> np.ndarray:
    """E[O_1(a) x O_1(a)] estimated from unit Bloch vectors a = directions[k] (shape (N, 3))."""
    directions = np.asarray(directions, dtype=float)
    second = np.einsum("ki,kj->ij", directions, directions) / len(directions)
    fourth = np.einsum("ki,kj,kl,km->ijlm", directions, directions, directions, directions) / len(directions)
    sig = PAULI_MATRICES[1:]
    pair = np.einsum("ij,iab,jcd->acbd", second, sig, sig).reshape(4, 4)
    quad = np.einsum("ijlm,iab,jcd,lef,mgh->acegbdfh", fourth, sig, sig, sig, sig).reshape(16, 16)
    eye4 = np.eye(4)
    return np.eye(16) / 4 + 0.75 * (np.kron(pair, eye4) + np.kron(eye4, pair)) + 2.25 * quad


def twirled_r4_clifford(rotations: np.ndarray) -> np.ndarray:
    """Average of (W^x4)^dag R4_Cl W^x4 given the Bloch rotations of sampled W (shape (N, 3, 3)).

    I and the swaps are invariant; each Pauli power X^x4 maps to (r_k . sigma)^x4
    where r_k is row k of the rotation.
    """
    rows = np.asarray(rotations, dtype=float).reshape(-1, 3)
    eye = np.eye(16)
    sig = PAULI_MATRICES[1:]
    fourth = np.einsum("ki,kj,kl,km->ijlm", rows, rows, rows, rows) * 3 / len(rows)
    quad = np.einsum("ijlm,iab,jcd,lef,mgh->acegbdfh", fourth, sig, sig, sig, sig).reshape(16, 16)
    return -eye + 0.5 * (_swap(4, 0, 1) + _swap(4, 2, 3)) + 0.75 * (eye + quad)


# ==================== PAULI-SHADOW OPERATORS ====================

def pauli_eigenstates() -> np.ndarray:
    """The six one-qubit Pauli eigenstates ordered (X+, X-, Y+, Y-, Z+, Z-)."""
    s = 1 / np.sqrt(2)
    return np.array([[s, s], [s, -s], [s, 1j * s], [s, -1j * s], [1, 0], [0, 1]], dtype=np.complex128)


def shadow_snapshot(vector: np.ndarray) -> np.ndarray:
    psi = np.outer(vector, np.conj(vector))
    return 3 * psi - np.eye(2)


@lru_cache(maxsize=None)
def build_shadow_operators() -> Tuple[ReplicaOperator, ReplicaOperator]:
    states = pauli_eigenstates()
    effects = [np.outer(v, v.conj()) / 3 for v in states]
    snaps = [shadow_snapshot(v) for v in states]
    omega2 = np.zeros((4, 4), dtype=np.complex128)
    for e_a, s_a in zip(effects, snaps):
        for e_b, s_b in zip(effects, snaps):
            omega2 += np.trace(s_a @ s_b).real ** 2 * np.kron(e_a, e_b)
    omega3 = sum(np.kron(np.kron(e, s), s) for e, s in zip(effects, snaps))
    return (
        ReplicaOperator(ReplicaLabel.OMEGA2_SHADOW, omega2),
        ReplicaOperator(ReplicaLabel.OMEGA3_SHADOW, omega3),
    )


def snapshot_overlap_table() -> np.ndarray:
    """tr[s_psi s_phi] over the six eigenstates; values 5, -4 or 1/2."""
    snaps = [shadow_snapshot(v) for v in pauli_eigenstates()]
    return np.array([[np.trace(a @ b).real for b in snaps] for a in snaps])


# ==================== CACHED PAULI TENSORS ====================

_BUILDERS = {
    ReplicaLabel.SECOND_MOMENT: lambda: second_moment_operator(),
    ReplicaLabel.R_AAB: lambda: build_third_moment_operators()[0],
    ReplicaLabel.R_ABB: lambda: build_third_moment_operators()[1],
    ReplicaLabel.R4_CLIFFORD: lambda: build_r4_clifford(),
    ReplicaLabel.R4_HAAR: lambda: build_r4_haar(),
    ReplicaLabel.OMEGA2_SHADOW: lambda: build_shadow_operators()[0],
    ReplicaLabel.OMEGA3_SHADOW: lambda: build_shadow_operators()[1],
}


def replica_operator(label: ReplicaLabel) -> ReplicaOperator:
    return _BUILDERS[ReplicaLabel(label)]()


@lru_cache(maxsize=None)
def _pauli_tensor(label: ReplicaLabel) -> np.ndarray:
    op = replica_operator(label)
    t = replica_tensor(op.matrix, op.m)
    t.setflags(write=False)
    return t


def verify_twirl_identity(samples: int, seed: int, batch: int = 100_000) -> float:
    """Max entrywise deviation between the Monte Carlo Haar twirl of R4_Cl and R4_H."""
    from ..protocol.sampling import bloch_rotations, sample_haar_unitaries

    if samples < 1:
        raise ArgumentError("samples must be positive")
    rng = np.random.Generator(np.random.Philox(seed))
    total = np.zeros((16, 16), dtype=np.complex128)
    done = 0
    while done < samples:
        size = min(batch, samples - done)
        total += twirled_r4_clifford(bloch_rotations(sample_haar_unitaries(rng, size))) * size
        done += size
    deviation = float(np.max(np.abs(total / samples - build_r4_haar().matrix)))
    logger.info("twirl identity: %d samples, max deviation %.3e", samples, deviation)
    return deviation
