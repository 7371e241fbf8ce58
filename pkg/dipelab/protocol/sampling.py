# This module owns every random draw of the protocols
# Streams are keyed by (seed, block, party) so results never depend on execution order
from typing import Tuple

import numpy as np

from ..errors import ArgumentError
from ..qcore import BASIS_CHANGE, PAULI_MATRICES, apply_bitwise

PARTY_UNITARY = 0
PARTY_ALICE = 1
PARTY_BOB = 2

SEED_MAX = 2**64 - 1


def block_rng(seed: int, block: int, party: int) -> np.random.Generator:
    """Counter-based Philox stream for one (block, party) pair."""
    if not 0 <= seed <= SEED_MAX:
        raise ArgumentError(f"Seed must be a 64-bit unsigned integer, got {seed}")
    sequence = np.random.SeedSequence(seed, spawn_key=(int(block), int(party)))
    return np.random.Generator(np.random.Philox(sequence))


# ==================== UNITARIES ====================

def sample_haar_unitaries(rng: np.random.Generator, size: int) -> np.ndarray:
    """`size` Haar-random 2x2 unitaries from QR of complex Gaussian matrices with the phase fix."""
    z = (rng.normal(size=(size, 2, 2)) + 1j * rng.normal(size=(size, 2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def sample_haar_unitary(rng: np.random.Generator) -> np.ndarray:
    return sample_haar_unitaries(rng, 1)[0]


def bloch_rotations(unitaries: np.ndarray) -> np.ndarray:
    """R[k, i] = tr[sigma_i W^dag sigma_k W] / 2 for each W, so W^dag sigma_k W = sum_i R[k, i] sigma_i."""
    w = np.asarray(unitaries, dtype=np.complex128)
    sig = PAULI_MATRICES[1:]
    conjugated = np.einsum("nba,kbc,ncd->nkad", w.conj(), sig, w)
    return 0.5 * np.einsum("iab,nkba->nki", sig, conjugated).real


def sample_pauli_bases(rng: np.random.Generator, n: int) -> np.ndarray:
    """Basis index per qubit, 0=X, 1=Y, 2=Z."""
    return rng.integers(0, 3, size=n)


# This draws the shared product unitary of one block
def sample_local_unitaries(rng: np.random.Generator, n: int, ensemble: str) -> Tuple[np.ndarray, np.ndarray]:
    """Per-qubit unitaries (shape (n, 2, 2)) and basis indices (-1 for Haar draws)."""
    ensemble = str(getattr(ensemble, "value", ensemble)).lower()
    if ensemble == "clifford":
        bases = sample_pauli_bases(rng, n)
        return BASIS_CHANGE[bases], bases
    if ensemble == "haar":
        return sample_haar_unitaries(rng, n), np.full(n, -1)
    raise ArgumentError(f"Unknown local ensemble {ensemble!r}; expected clifford or haar")


# ==================== OUTCOME NOISE ====================

def depolarized_outcome_transform(probabilities: np.ndarray, p: float) -> np.ndarray:
    """Per-bit binary symmetric channel with flip probability p/2."""
    if not 0.0 <= p <= 1.0:
        raise ArgumentError(f"Depolarizing strength must lie in [0, 1], got {p}")
    probabilities = np.asarray(probabilities, dtype=float)
    if p == 0:
        return probabilities.copy()
    channel = np.array([[1 - p / 2, p / 2], [p / 2, 1 - p / 2]])
    return apply_bitwise(probabilities, channel)
