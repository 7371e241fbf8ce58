# This module simulates DIPE with independent Pauli shadows
# Each party measures every copy in its own uniformly random Pauli basis; no randomness is shared
import logging
import time
from typing import Dict, Optional, Tuple

import numpy as np

from ..config import get_settings
from ..errors import ArgumentError
from ..moments import ReplicaLabel, overlap_from_coefficients, replica_operator, snapshot_overlap_table
from ..qcore import BASIS_CHANGE, State, check_dense_cap, contract_replicas, pauli_coefficients, rotated_probabilities
from ..qcore.paulis import _apply_per_axis
from .sampling import PARTY_ALICE, PARTY_BOB, block_rng
from .shared import EnsembleKind, EstimateRecord, RunConfig, standard_error

logger = logging.getLogger(__name__)

HISTOGRAM_CAP = 1 << 20
PAIR_CHUNK = 1 << 22

# Per-qubit snapshot overlaps tr[s_a s_b] over labels 2*basis + bit, ordered (X+, X-, Y+, Y-, Z+, Z-)
OVERLAP_TABLE = snapshot_overlap_table()


def sample_snapshots(state: State, count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, n) array of single-qubit snapshot labels 2*basis + outcome."""
    n = state.n
    bases = rng.integers(0, 3, size=(count, n))
    labels = np.empty((count, n), dtype=np.int64)
    configs, inverse = np.unique(bases, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    shifts = np.arange(n - 1, -1, -1)
    # configurations are visited in sorted order so draws stay reproducible
    for k, config in enumerate(configs):
        rows = np.flatnonzero(inverse == k)
        probs = rotated_probabilities(state, BASIS_CHANGE[config])
        outcomes = rng.choice(probs.size, size=rows.size, p=probs)
        bits = (outcomes[:, None] >> shifts) & 1
        labels[rows] = 2 * config[None, :] + bits
    return labels


def snapshot_overlap_factors(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-qubit factors tr[s_a,q s_b,q] of one snapshot pair."""
    return OVERLAP_TABLE[np.asarray(a), np.asarray(b)]


def _label_histogram(labels: np.ndarray) -> np.ndarray:
    n = labels.shape[1]
    index = labels @ (6 ** np.arange(n - 1, -1, -1))
    return np.bincount(index, minlength=6**n).astype(float)


def _pair_kernel_means(labels_a: np.ndarray, labels_b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Row and column means of the N x N matrix k(i, j) = tr[rho_hat_i sigma_hat_j]."""
    n = labels_a.shape[1]
    if 6**n <= HISTOGRAM_CAP:
        hist_b = _label_histogram(labels_b).reshape((6,) * n)
        hist_a = _label_histogram(labels_a).reshape((6,) * n)
        against_b = _apply_per_axis(hist_b, OVERLAP_TABLE).reshape(-1)
        against_a = _apply_per_axis(hist_a, OVERLAP_TABLE).reshape(-1)
        powers = 6 ** np.arange(n - 1, -1, -1)
        rows = against_b[labels_a @ powers] / len(labels_b)
        cols = against_a[labels_b @ powers] / len(labels_a)
        return rows, cols
    rows = np.zeros(len(labels_a))
    cols = np.zeros(len(labels_b))
    step = max(1, PAIR_CHUNK // max(1, len(labels_b) * n))
    for start in range(0, len(labels_a), step):
        block = OVERLAP_TABLE[labels_a[start : start + step, None, :], labels_b[None, :, :]].prod(axis=-1)
        rows[start : start + step] = block.mean(axis=1)
        cols += block.sum(axis=0)
    return rows, cols / len(labels_a)


def shadow_estimate(labels_a: np.ndarray, labels_b: np.ndarray) -> Tuple[float, float]:
    """g_hat = N^-2 sum_ij tr[rho_hat_i sigma_hat_j] and its first-order standard error."""
    rows, cols = _pair_kernel_means(labels_a, labels_b)
    estimate = float(rows.mean())
    var = rows.var(ddof=1) / rows.size + cols.var(ddof=1) / cols.size if rows.size > 1 else 0.0
    return estimate, float(np.sqrt(var))


def run_pauli_shadow(rho: State, sigma: State, N: int, seed: int, block: int = 0) -> EstimateRecord:
    if rho.n != sigma.n:
        raise ArgumentError(f"States act on {rho.n} and {sigma.n} qubits")
    if N < 1:
        raise ArgumentError("N must be positive")
    check_dense_cap(rho.n)
    start = time.perf_counter()
    labels_a = sample_snapshots(rho, N, block_rng(seed, block, PARTY_ALICE))
    labels_b = sample_snapshots(sigma, N, block_rng(seed, block, PARTY_BOB))
    estimate, se = shadow_estimate(labels_a, labels_b)
    elapsed = time.perf_counter() - start
    config = RunConfig(n=rho.n, N_U=1, N_M=N, seed=seed, ensemble=EnsembleKind.SHADOW)
    return EstimateRecord(estimate=estimate, standard_error=se, block_values=[estimate], config=config, wall_time=elapsed)


def repeat_pauli_shadow(rho: State, sigma: State, N: int, repetitions: int, seed: int) -> EstimateRecord:
    """Independent repetitions on blocks 0..repetitions-1; the spread of block values is the empirical variance."""
    if repetitions < 1:
        raise ArgumentError("repetitions must be positive")
    start = time.perf_counter()
    values = [run_pauli_shadow(rho, sigma, N, seed, block=r).estimate for r in range(repetitions)]
    config = RunConfig(n=rho.n, N_U=repetitions, N_M=N, seed=seed, ensemble=EnsembleKind.SHADOW)
    return EstimateRecord(
        estimate=float(np.mean(values)),
        standard_error=standard_error(values),
        block_values=values,
        config=config,
        wall_time=time.perf_counter() - start,
    )


# ==================== EXACT VARIANCE ====================

def shadow_coefficients(rho: State, sigma: State) -> Dict[str, float]:
    """A^P = tr[w2^xn (rho x sigma)], B^P_rs = tr[w3^xn (rho x sigma x sigma)] and its mirror."""
    if rho.n != sigma.n:
        raise ArgumentError(f"States act on {rho.n} and {sigma.n} qubits")
    r_hat, s_hat = pauli_coefficients(rho), pauli_coefficients(sigma)
    omega2 = replica_operator(ReplicaLabel.OMEGA2_SHADOW).pauli_tensor()
    omega3 = replica_operator(ReplicaLabel.OMEGA3_SHADOW).pauli_tensor()
    cap = get_settings().transfer_cap
    return {
        "A": contract_replicas(omega2, [r_hat, s_hat]),
        "B_rho_sigma": contract_replicas(omega3, [r_hat, s_hat, s_hat], max_n=cap),
        "B_sigma_rho": contract_replicas(omega3, [s_hat, r_hat, r_hat], max_n=cap),
        "overlap": overlap_from_coefficients(r_hat, s_hat),
    }


def shadow_exact_variance(rho: State, sigma: State, N: int, coefficients: Optional[Dict[str, float]] = None) -> float:
    """A/N^2 + (N-1)/N^2 (B_rs + B_sr) - (2N-1)/N^2 f^2."""
    if N < 1:
        raise ArgumentError("N must be positive")
    c = coefficients or shadow_coefficients(rho, sigma)
    f = c["overlap"]
    return c["A"] / N**2 + (N - 1) / N**2 * (c["B_rho_sigma"] + c["B_sigma_rho"]) - (2 * N - 1) / N**2 * f**2
