# This module simulates DIPE with shared single-qubit randomized measurements
# Each block draws one product unitary used by both parties, then N_M shots per party
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..config import get_settings
from ..errors import ArgumentError
from ..qcore import State, apply_bitwise, check_dense_cap, kernel_form_walsh, rotated_probabilities
from ..qcore.measure import KERNEL_FACTOR
from .sampling import (
    PARTY_ALICE,
    PARTY_BOB,
    PARTY_UNITARY,
    SEED_MAX,
    block_rng,
    depolarized_outcome_transform,
    sample_local_unitaries,
)

logger = logging.getLogger(__name__)


class EnsembleKind(str, Enum):
    CLIFFORD = "clifford"
    HAAR = "haar"
    SHADOW = "shadow"


class RunConfig(BaseModel):
    n: int = Field(..., ge=1)
    N_U: int = Field(..., ge=1, description="Unitary blocks")
    N_M: int = Field(..., ge=1, description="Shots per block per party")
    seed: int = Field(0, ge=0, le=SEED_MAX)
    ensemble: EnsembleKind = EnsembleKind.CLIFFORD
    outcome_noise: float = Field(0.0, ge=0.0, le=1.0, description="Per-bit depolarizing strength p")
    # Excluded from dumps; a record must not depend on the thread count
    workers: Optional[int] = Field(None, ge=1, le=64, exclude=True)

    @property
    def total_copies(self) -> int:
        return self.N_U * self.N_M


class EstimateRecord(BaseModel):
    estimate: float
    standard_error: Optional[float] = None
    block_values: List[float]
    config: RunConfig
    wall_time: float = 0.0

    @model_validator(mode="after")
    def _check_mean(self):
        if self.block_values and abs(float(np.mean(self.block_values)) - self.estimate) > 1e-9 * max(1.0, abs(self.estimate)):
            raise ValueError("estimate must equal the mean of the block values")
        return self


def standard_error(values: Sequence[float]) -> Optional[float]:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return None
    return float(values.std(ddof=1) / np.sqrt(values.size))


def _outcome_distributions(rho: State, sigma: State, unitaries: np.ndarray, noise: float):
    p_a = rotated_probabilities(rho, unitaries)
    p_b = rotated_probabilities(sigma, unitaries)
    if noise:
        p_a = depolarized_outcome_transform(p_a, noise)
        p_b = depolarized_outcome_transform(p_b, noise)
    return p_a, p_b


def conditional_mean(rho: State, sigma: State, unitaries: np.ndarray, outcome_noise: float = 0.0) -> float:
    """mu_U = sum_{s,t} f(s,t) p_rho(s) p_sigma(t), via the Walsh-Hadamard form."""
    p_a, p_b = _outcome_distributions(rho, sigma, unitaries, outcome_noise)
    return kernel_form_walsh(p_a, p_b)


def block_value(counts_a: np.ndarray, counts_b: np.ndarray, shots: int) -> float:
    """Kernel average over all N_M^2 outcome pairs from two count histograms."""
    return float(np.dot(counts_a, apply_bitwise(counts_b.astype(float), KERNEL_FACTOR)) / shots**2)


def _check_inputs(rho: State, sigma: State, config: RunConfig) -> None:
    if rho.n != sigma.n or rho.n != config.n:
        raise ArgumentError(f"States act on {rho.n} and {sigma.n} qubits, config says {config.n}")
    check_dense_cap(config.n)
    if config.ensemble == EnsembleKind.SHADOW:
        raise ArgumentError("run_shared_lrm handles clifford and haar ensembles; use run_pauli_shadow for shadows")


def run_shared_lrm(rho: State, sigma: State, config: RunConfig) -> EstimateRecord:
    _check_inputs(rho, sigma, config)
    n, shots = config.n, config.N_M

    def one_block(block: int) -> float:
        unitaries, _ = sample_local_unitaries(block_rng(config.seed, block, PARTY_UNITARY), n, config.ensemble)
        p_a, p_b = _outcome_distributions(rho, sigma, unitaries, config.outcome_noise)
        counts_a = block_rng(config.seed, block, PARTY_ALICE).multinomial(shots, p_a)
        counts_b = block_rng(config.seed, block, PARTY_BOB).multinomial(shots, p_b)
        return block_value(counts_a, counts_b, shots)

    workers = config.workers or get_settings().workers
    start = time.perf_counter()
    if workers > 1 and config.N_U > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one_block, range(config.N_U)))
    else:
        values = [one_block(b) for b in range(config.N_U)]
    elapsed = time.perf_counter() - start
    logger.debug("shared LRM: %d blocks x %d shots in %.3fs", config.N_U, shots, elapsed)
    return EstimateRecord(
        estimate=float(np.mean(values)),
        standard_error=standard_error(values),
        block_values=values,
        config=config,
        wall_time=elapsed,
    )
