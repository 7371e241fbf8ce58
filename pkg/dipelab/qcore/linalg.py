# This module holds the dense linear-algebra primitives every other module builds on
# States are immutable numpy arrays; qubit 0 is the leftmost, most-significant tensor factor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import get_settings
from ..errors import ArgumentError, SizeError

# Complex square matrices are plain complex128 numpy arrays
ComplexMatrix = np.ndarray

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-12
PSD_FLOOR = -1e-10


def _frozen(array: np.ndarray, dtype=np.complex128) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def qubit_count(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or (1 << n) != dim:
        raise ArgumentError(f"Dimension {dim} is not a power of two")
    return n


def check_dense_cap(n: int) -> None:
    cap = get_settings().dense_cap
    if n > cap:
        raise SizeError(f"{n} qubits exceeds the dense cap of {cap}", {"n": n, "cap": cap})


# This converts arbitrary input to a validated square complex matrix
def as_matrix(entries) -> ComplexMatrix:
    m = np.asarray(entries, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ArgumentError(f"Expected a square matrix, got shape {m.shape}")
    return m


def is_hermitian(m: ComplexMatrix, atol: float = HERMITIAN_TOL) -> bool:
    return bool(np.allclose(m, m.conj().T, rtol=0.0, atol=atol))


def is_unitary(m: ComplexMatrix, atol: float = HERMITIAN_TOL) -> bool:
    return bool(np.allclose(m.conj().T @ m, np.eye(m.shape[0]), rtol=0.0, atol=atol))


def is_psd(m: ComplexMatrix, floor: float = PSD_FLOOR) -> bool:
    return bool(np.linalg.eigvalsh((m + m.conj().T) / 2).min() >= floor)


@dataclass(frozen=True)
class PureState:
    """Unit vector of 2**n amplitudes."""

    amplitudes: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        n = qubit_count(vec.size)
        check_dense_cap(n)
        norm = float(np.vdot(vec, vec).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ArgumentError(f"State is not normalized (squared norm {norm!r})")
        object.__setattr__(self, "amplitudes", _frozen(vec))

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = True) -> "PureState":
        vec = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        if normalize:
            norm = np.linalg.norm(vec)
            if norm == 0:
                raise ArgumentError("Cannot normalize the zero vector")
            vec = vec / norm
        return cls(vec)

    @property
    def n(self) -> int:
        return qubit_count(self.amplitudes.size)

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, unit-trace, positive semidefinite 2**n x 2**n matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        n = qubit_count(m.shape[0])
        check_dense_cap(n)
        if not is_hermitian(m):
            raise ArgumentError("Density operator is not Hermitian")
        trace = complex(np.trace(m))
        if abs(trace - 1.0) > NORM_TOL * max(1, m.shape[0]):
            raise ArgumentError(f"Density operator trace is {trace!r}, expected 1")
        if not is_psd(m):
            raise ArgumentError("Density operator has a negative eigenvalue")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def n(self) -> int:
        return qubit_count(self.matrix.shape[0])

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityOperator":
        return cls(np.eye(2**n) / 2**n)


State = Union[PureState, DensityOperator]


def as_density(state: State) -> DensityOperator:
    if isinstance(state, DensityOperator):
        return state
    if isinstance(state, PureState):
        return state.density()
    raise ArgumentError(f"Expected a PureState or DensityOperator, got {type(state).__name__}")


def overlap(rho: State, sigma: State) -> float:
    """tr[rho sigma]"""
    if isinstance(rho, PureState) and isinstance(sigma, PureState):
        return float(abs(np.vdot(rho.amplitudes, sigma.amplitudes)) ** 2)
    a, b = as_density(rho).matrix, as_density(sigma).matrix
    if a.shape != b.shape:
        raise ArgumentError("States act on different numbers of qubits")
    return float(np.real(np.sum(a * b.T)))


# ==================== TENSOR STRUCTURE ====================

def tensor(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    a, b = as_matrix(a), as_matrix(b)
    dim = a.shape[0] * b.shape[0]
    cap = get_settings().tensor_cap
    if dim > cap:
        raise SizeError(f"Tensor product dimension {dim} exceeds the cap of {cap}", {"dim": dim, "cap": cap})
    return np.kron(a, b)


def tensor_all(factors: Sequence[ComplexMatrix]) -> ComplexMatrix:
    out = np.ones((1, 1), dtype=np.complex128)
    for f in factors:
        out = tensor(out, f)
    return out


def _validate_qubits(qubits: Iterable[int], n: int) -> Tuple[int, ...]:
    picked = tuple(sorted(set(int(q) for q in qubits)))
    if any(q < 0 or q >= n for q in picked):
        raise ArgumentError(f"Qubit subset {list(picked)} is not contained in range({n})")
    return picked


# This traces out every qubit not listed in keep
def partial_trace(m: ComplexMatrix, keep: Iterable[int], n: int) -> ComplexMatrix:
    m = as_matrix(m)
    if m.shape[0] != 2**n:
        raise ArgumentError(f"Matrix of dimension {m.shape[0]} does not act on {n} qubits")
    kept = _validate_qubits(keep, n)
    t = m.reshape((2,) * (2 * n))
    current = n
    for q in reversed([q for q in range(n) if q not in kept]):
        t = np.trace(t, axis1=q, axis2=q + current)
        current -= 1
    dim = 2 ** len(kept)
    return t.reshape(dim, dim)


def reduced_purity(state: State, keep: Iterable[int]) -> float:
    rho = as_density(state)
    sub = partial_trace(rho.matrix, keep, rho.n)
    return float(np.real(np.vdot(sub, sub)))


# ==================== PERMUTATIONS OF TENSOR FACTORS ====================

def validate_permutation(perm: Sequence[int]) -> Tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(len(perm))):
        raise ArgumentError(f"{perm} is not a permutation of range({len(perm)})")
    return perm


def compose(pi: Sequence[int], tau: Sequence[int]) -> Tuple[int, ...]:
    """(pi o tau)(k) = pi[tau[k]]"""
    return tuple(pi[t] for t in tau)


def permutation_from_cycles(cycles: Iterable[Sequence[int]], m: int) -> Tuple[int, ...]:
    perm = list(range(m))
    for cycle in cycles:
        cycle = [int(c) for c in cycle]
        if any(c < 0 or c >= m for c in cycle):
            raise ArgumentError(f"Cycle {cycle} has entries outside range({m})")
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            perm[a] = b
    return validate_permutation(perm)


def permutation_operator(perm: Sequence[int], local_dim: int = 2) -> ComplexMatrix:
    """Matrix moving tensor factor k to position perm[k].

    The map perm -> matrix is a homomorphism: P(pi) @ P(tau) == P(compose(pi, tau)).
    """
    perm = validate_permutation(perm)
    m = len(perm)
    dim = local_dim**m
    if dim > get_settings().tensor_cap:
        raise SizeError(f"Permutation operator on {m} factors exceeds the tensor cap")
    # out[..., c_{perm[k]} = b_k, ...] = in[b]; axes of the identity are relabelled accordingly
    identity = np.eye(dim, dtype=np.complex128).reshape((local_dim,) * m + (dim,))
    inverse = [0] * m
    for k, p in enumerate(perm):
        inverse[p] = k
    moved = np.transpose(identity, axes=inverse + [m])
    return moved.reshape(dim, dim)


def swap_operator(m: int, i: int, j: int) -> ComplexMatrix:
    """SWAP of tensor factors i and j on m qubits.

    Indices are 0-based and qubit 0 is the leftmost, most significant factor,
    so swap_operator(3, 0, 2) exchanges the first and last qubit of |abc>.
    """
    if not (0 <= i < j < m):
        raise ArgumentError(f"Swap indices must satisfy 0 <= i < j < m, got i={i}, j={j}, m={m}")
    perm = list(range(m))
    perm[i], perm[j] = j, i
    return permutation_operator(perm)


# This reorders the tensor factors of an operator on len(perm) qubits
def permute_factors(m: ComplexMatrix, perm: Sequence[int]) -> ComplexMatrix:
    p = permutation_operator(perm)
    return p @ as_matrix(m) @ p.conj().T


def random_density(n: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityOperator:
    """Random mixed state G G^dagger / tr, G a complex Ginibre matrix of the given rank."""
    dim = 2**n
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityOperator(rho / np.trace(rho).real)


def party_swap(n: int) -> ComplexMatrix:
    """Full swap of two n-qubit registers, qubit q <-> qubit n+q.

    Qubits are 0-based with qubit 0 leftmost, so the first register holds
    factors 0..n-1 and the second n..2n-1.
    """
    return permutation_operator([(q + n) % (2 * n) for q in range(2 * n)])
