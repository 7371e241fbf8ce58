# This module estimates B_{n,E} = E_U[mu_U^2] by sampling shared local unitaries
# It is the fallback when no exact path fits the qubit count
import logging

import numpy as np
from pydantic import BaseModel

from ..errors import ArgumentError
from ..qcore import State, check_dense_cap
from .sampling import PARTY_UNITARY, block_rng, sample_local_unitaries
from .shared import conditional_mean

logger = logging.getLogger(__name__)


class MonteCarloEstimate(BaseModel):
    mean: float
    standard_error: float
    seed: int
    samples: int


def estimate_B_monte_carlo(rho: State, sigma: State, ensemble: str, samples: int, seed: int) -> MonteCarloEstimate:
    if rho.n != sigma.n:
        raise ArgumentError(f"States act on {rho.n} and {sigma.n} qubits")
    if samples < 2:
        raise ArgumentError("Monte Carlo estimate needs at least 2 samples")
    check_dense_cap(rho.n)
    values = np.empty(samples)
    for k in range(samples):
        unitaries, _ = sample_local_unitaries(block_rng(seed, k, PARTY_UNITARY), rho.n, ensemble)
        values[k] = conditional_mean(rho, sigma, unitaries) ** 2
    se = float(values.std(ddof=1) / np.sqrt(samples))
    logger.debug("MC estimate of B at n=%d: %.6g +- %.2g (%d samples)", rho.n, values.mean(), se, samples)
    return MonteCarloEstimate(mean=float(values.mean()), standard_error=se, seed=seed, samples=samples)
