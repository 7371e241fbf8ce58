# This module covers post-processing kernels f(s, t) for local randomized measurements
# It provides the unique unbiased Hamming kernel, symmetrization and the Krawtchouk sector analysis
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.linalg import null_space

from .errors import ArgumentError, SizeError
from .qcore import PAULI_MATRICES, ComplexMatrix, State, as_density, party_swap, permute_factors

logger = logging.getLogger(__name__)

TABLE_CAP = 6
OMEGA_CAP = 2

BitString = Union[str, Sequence[int]]


@dataclass(frozen=True)
class Kernel:
    """A kernel stored either as a full 2**n x 2**n table or as a Hamming profile g(0..n)."""

    n: int
    table: Optional[np.ndarray] = None
    profile: Optional[np.ndarray] = None

    def __post_init__(self):
        if (self.table is None) == (self.profile is None):
            raise ArgumentError("Kernel needs exactly one of table or profile")
        if self.table is not None:
            if self.n > TABLE_CAP:
                raise SizeError(f"Kernel tables are capped at n <= {TABLE_CAP}")
            table = np.array(self.table, dtype=float)
            if table.shape != (2**self.n, 2**self.n):
                raise ArgumentError(f"Kernel table must have shape {(2**self.n,) * 2}, got {table.shape}")
            table.setflags(write=False)
            object.__setattr__(self, "table", table)
        else:
            profile = np.array(self.profile, dtype=float)
            if profile.shape != (self.n + 1,):
                raise ArgumentError(f"Hamming profile must have {self.n + 1} entries")
            profile.setflags(write=False)
            object.__setattr__(self, "profile", profile)

    @property
    def is_table(self) -> bool:
        return self.table is not None

    def to_table(self) -> np.ndarray:
        if self.is_table:
            return self.table
        if self.n > TABLE_CAP:
            raise SizeError(f"Kernel tables are capped at n <= {TABLE_CAP}")
        return self.profile[hamming_matrix(self.n)]

    def value(self, s: BitString, t: BitString) -> float:
        i, j = _bit_index(s, self.n), _bit_index(t, self.n)
        if self.is_table:
            return float(self.table[i, j])
        return float(self.profile[bin(i ^ j).count("1")])


def _bits_of(s: BitString) -> List[int]:
    bits = [int(ch) for ch in s] if isinstance(s, str) else [int(b) for b in s]
    if any(b not in (0, 1) for b in bits):
        raise ArgumentError(f"Bit string {s!r} contains values other than 0 and 1")
    return bits


def _bit_index(s: BitString, n: int) -> int:
    bits = _bits_of(s)
    if len(bits) != n:
        raise ArgumentError(f"Bit string {s!r} has length {len(bits)}, expected {n}")
    return int("".join(map(str, bits)) or "0", 2)


def hamming_matrix(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    xor = idx[:, None] ^ idx[None, :]
    return sum((xor >> q) & 1 for q in range(n)) if n else np.zeros((1, 1), dtype=np.int64)


# ==================== UNIQUE UNBIASED KERNEL ====================

def unique_kernel_value(n: int, s: BitString, t: BitString) -> float:
    """(-1)^D 2^(n-D) with D the Hamming distance of s and t."""
    bs, bt = _bits_of(s), _bits_of(t)
    if len(bs) != n or len(bt) != n:
        raise ArgumentError(f"Bit strings must both have length {n}, got {len(bs)} and {len(bt)}")
    d = sum(a != b for a, b in zip(bs, bt))
    return float((-1) ** d * 2 ** (n - d))


def unique_kernel_profile(n: int) -> np.ndarray:
    return np.array([(-1) ** d * 2.0 ** (n - d) for d in range(n + 1)])


def unique_kernel(n: int) -> Kernel:
    return Kernel(n=n, profile=unique_kernel_profile(n))


# ==================== SYMMETRIZATION ====================

def _group_actions(n: int):
    """Yield index maps s -> gamma(s) for every bit relabelling combined with a qubit permutation."""
    idx = np.arange(2**n)
    bits = np.stack([(idx >> (n - 1 - q)) & 1 for q in range(n)], axis=1)
    weights = 1 << np.arange(n - 1, -1, -1)
    for perm in itertools.permutations(range(n)):
        for flips in itertools.product((0, 1), repeat=n):
            moved = (bits[:, list(perm)] ^ np.array(flips)) @ weights
            yield moved


def hamming_symmetrize(f: Kernel) -> Kernel:
    """Orbit-average a full table over simultaneous bit flips and qubit permutations."""
    if not f.is_table:
        return f
    n = f.n
    table = f.table
    distance = hamming_matrix(n)
    if n <= 3:
        actions = list(_group_actions(n))
        averaged = sum(table[np.ix_(a, a)] for a in actions) / len(actions)
        profile = np.array([averaged[distance == d].mean() for d in range(n + 1)])
        spread = max(np.ptp(averaged[distance == d]) for d in range(n + 1))
        if spread > 1e-9:
            logger.warning("symmetrized table is not constant on Hamming classes (spread %.3g)", spread)
    else:
        # the group acts transitively on pairs at fixed distance, so the orbit average is the class mean
        profile = np.array([table[distance == d].mean() for d in range(n + 1)])
    return Kernel(n=n, profile=profile)


def brute_force_symmetrize(f: Kernel) -> np.ndarray:
    """Orbit-averaged full table by explicit group enumeration (any n <= TABLE_CAP)."""
    actions = list(_group_actions(f.n))
    return sum(f.table[np.ix_(a, a)] for a in actions) / len(actions)


# ==================== KRAWTCHOUK ANALYSIS ====================

def krawtchouk(d: int, k: int, n: int) -> int:
    """K_d(k; n, 3) = sum_j (-1)^j 2^(d-j) C(k, j) C(n-k, d-j)."""
    if n < 0 or not (0 <= d <= n and 0 <= k <= n):
        raise ArgumentError(f"Krawtchouk indices must satisfy 0 <= d, k <= n, got d={d}, k={k}, n={n}")
    return sum((-1) ** j * 2 ** (d - j) * comb(k, j) * comb(n - k, d - j) for j in range(d + 1))


def krawtchouk_matrix(n: int) -> np.ndarray:
    """K[d, k] = K_d(k; n, 3) as exact Python integers."""
    return np.array([[krawtchouk(d, k, n) for k in range(n + 1)] for d in range(n + 1)], dtype=object)


def swap_sector_coefficients(g: Union[Kernel, Sequence[float]]) -> np.ndarray:
    """alpha_k = 3^-n sum_d g(d) K_d(k; n, 3)."""
    profile = np.asarray(g.profile if isinstance(g, Kernel) else g, dtype=float)
    n = profile.size - 1
    k_mat = krawtchouk_matrix(n).astype(float)
    return (k_mat.T @ profile) / 3.0**n


def swap_sector_coefficients_exact(g: Sequence[int]) -> List[Fraction]:
    """Same transform in rational arithmetic for integer-valued profiles."""
    n = len(g) - 1
    k_mat = krawtchouk_matrix(n)
    return [Fraction(sum(int(g[d]) * int(k_mat[d, k]) for d in range(n + 1)), 3**n) for k in range(n + 1)]


# Inverse transform by linear solve
def profile_from_sectors(alpha: Sequence[float]) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    n = alpha.size - 1
    forward = krawtchouk_matrix(n).astype(float).T / 3.0**n
    return np.linalg.solve(forward, alpha)


# ==================== ENSEMBLE-AVERAGED KERNEL OPERATOR ====================

def _projector(direction: int, sign: int, outcome: int) -> np.ndarray:
    return (np.eye(2) + (-1) ** (outcome ^ sign) * PAULI_MATRICES[direction]) / 2


def _pair_to_party_order(n: int) -> List[int]:
    """Permutation taking (A0, B0, A1, B1, ...) to (A0, A1, ..., B0, B1, ...)."""
    perm = [0] * (2 * n)
    for q in range(n):
        perm[2 * q] = q
        perm[2 * q + 1] = n + q
    return perm


def averaged_omega(f: Kernel, ensemble: str, n: Optional[int] = None) -> ComplexMatrix:
    """E_U[(U^dag x U^dag) Omega_f (U x U)] on the (A qubits, B qubits) register order."""
    n = f.n if n is None else n
    if n != f.n:
        raise ArgumentError(f"Kernel acts on {f.n} qubits, not {n}")
    if n > OMEGA_CAP:
        raise SizeError(f"averaged_omega supports n <= {OMEGA_CAP}")
    table = f.to_table()
    ensemble = str(getattr(ensemble, "value", ensemble)).lower()
    dim = 4**n
    out = np.zeros((dim, dim), dtype=np.complex128)
    outcomes = list(itertools.product((0, 1), repeat=n))
    if ensemble == "clifford":
        # uniform over the six signed Pauli directions per qubit
        settings = list(itertools.product([(a, b) for a in (1, 2, 3) for b in (0, 1)], repeat=n))
        for setting in settings:
            for si, s in enumerate(outcomes):
                for ti, t in enumerate(outcomes):
                    if table[si, ti] == 0:
                        continue
                    block = np.ones((1, 1), dtype=np.complex128)
                    for (axis, sign), sq, tq in zip(setting, s, t):
                        block = np.kron(block, np.kron(_projector(axis, sign, sq), _projector(axis, sign, tq)))
                    out += table[si, ti] * block
        out /= len(settings)
    elif ensemble == "haar":
        # E[A x A] = (2F - I)/3 with vanishing first moments
        swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128)
        second = (2 * swap - np.eye(4)) / 3
        local = {
            (a, b): (np.eye(4) + (-1) ** (a + b) * second) / 4 for a in (0, 1) for b in (0, 1)
        }
        for si, s in enumerate(outcomes):
            for ti, t in enumerate(outcomes):
                if table[si, ti] == 0:
                    continue
                block = np.ones((1, 1), dtype=np.complex128)
                for sq, tq in zip(s, t):
                    block = np.kron(block, local[(sq, tq)])
                out += table[si, ti] * block
    else:
        raise ArgumentError(f"Unknown ensemble {ensemble!r}; expected clifford or haar")
    return permute_factors(out, _pair_to_party_order(n))


def is_unbiased(f: Kernel, ensemble: str = "haar", atol: float = 1e-10) -> bool:
    return bool(np.allclose(averaged_omega(f, ensemble), party_swap(f.n), atol=atol, rtol=0.0))


# ==================== SYMMETRIZATION AND VARIANCE ====================

def unbiased_perturbation(n: int, ensemble: str, rng: np.random.Generator, scale: float = 0.5) -> Kernel:
    """Unique kernel plus a random table from the null space of the averaging map, so it stays unbiased."""
    if n > OMEGA_CAP:
        raise SizeError(f"unbiased_perturbation supports n <= {OMEGA_CAP}")
    dim = 2**n
    columns = []
    for k in range(dim * dim):
        basis = np.zeros(dim * dim)
        basis[k] = 1.0
        omega = averaged_omega(Kernel(n=n, table=basis.reshape(dim, dim)), ensemble)
        columns.append(np.concatenate([omega.real.ravel(), omega.imag.ravel()]))
    null = null_space(np.array(columns).T)
    if null.shape[1] == 0:
        raise ArgumentError(f"Averaging map of the {ensemble} ensemble is injective at n={n}")
    h = (null @ rng.normal(size=null.shape[1])).reshape(dim, dim)
    return Kernel(n=n, table=unique_kernel(n).to_table() + scale * h / np.abs(h).max())


def worst_single_shot_variance(f: Kernel, states: Sequence[State], ensemble: str) -> float:
    """max over pairs (rho, sigma) from `states` of V[f(s, t)] with one shot per party."""
    first = averaged_omega(f, ensemble)
    second = averaged_omega(Kernel(n=f.n, table=f.to_table() ** 2), ensemble)
    mats = [as_density(s).matrix for s in states]
    worst = -np.inf
    for a in mats:
        for b in mats:
            joint = np.kron(a, b)
            mean = np.trace(joint @ first).real
            worst = max(worst, np.trace(joint @ second).real - mean**2)
    return float(worst)
