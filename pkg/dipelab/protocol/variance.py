# This module compares the empirical block variance of the shared protocol
# with the exact four-term decomposition built from moment coefficients
import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel

from ..errors import ArgumentError
from ..moments import Ensemble, MomentCoefficients, compute_coefficients
from ..qcore import State
from .shared import EnsembleKind, RunConfig, run_shared_lrm

logger = logging.getLogger(__name__)

MEAN_SIGMAS = 5.0
VARIANCE_SIGMAS = 3.0


class VarianceTerms(BaseModel):
    N_M: int
    V1: float
    V2: float
    V3: float
    V4: float

    @property
    def total(self) -> float:
        return self.V1 + self.V2 + self.V3 + self.V4


class VarianceReport(BaseModel):
    ensemble: EnsembleKind
    N_M: int
    blocks: int
    seed: int
    V_hat: float
    V_hat_se: float
    exact: VarianceTerms
    exact_total: float
    z_score: float
    mean: float
    mean_se: float
    overlap: float
    mean_z_score: float
    passed: bool


def exact_block_variance(coefficients: MomentCoefficients, ensemble: Ensemble, N_M: int) -> VarianceTerms:
    """-f^2 + A/N_M^2 + C (N_M-1)/N_M^2 + B ((N_M-1)/N_M)^2"""
    if N_M < 1:
        raise ArgumentError("N_M must be positive")
    b = coefficients.B(ensemble)
    missing = [k for k, v in (("A", coefficients.A), ("C", coefficients.C), ("B", b), ("overlap", coefficients.overlap)) if v is None]
    if missing:
        raise ArgumentError(f"Exact variance needs coefficients {', '.join(missing)}")
    return VarianceTerms(
        N_M=N_M,
        V1=-coefficients.overlap**2,
        V2=coefficients.A / N_M**2,
        V3=coefficients.C * (N_M - 1) / N_M**2,
        V4=b * ((N_M - 1) / N_M) ** 2,
    )


def sample_variance_se(values: np.ndarray) -> float:
    """Standard error of the unbiased sample variance from the fourth central moment."""
    m = values.size
    centered = values - values.mean()
    s2 = centered.var(ddof=1)
    m4 = np.mean(centered**4)
    return float(np.sqrt(max(m4 - s2**2 * (m - 3) / (m - 1), 0.0) / m))


def empirical_variance_decomposition(
    rho: State,
    sigma: State,
    ensemble: EnsembleKind,
    N_M: int,
    blocks: int,
    seed: int,
    coefficients: Optional[MomentCoefficients] = None,
) -> VarianceReport:
    ensemble = EnsembleKind(ensemble)
    if ensemble == EnsembleKind.SHADOW:
        raise ArgumentError("The four-term decomposition applies to the shared clifford and haar ensembles")
    if blocks < 4:
        raise ArgumentError("Need at least 4 blocks to estimate the variance and its error")
    coefficients = coefficients or compute_coefficients(rho, sigma)
    terms = exact_block_variance(coefficients, Ensemble(ensemble.value), N_M)
    record = run_shared_lrm(rho, sigma, RunConfig(n=rho.n, N_U=blocks, N_M=N_M, seed=seed, ensemble=ensemble))
    values = np.asarray(record.block_values)
    v_hat = float(values.var(ddof=1))
    v_se = sample_variance_se(values)
    z = (v_hat - terms.total) / v_se if v_se > 0 else (0.0 if abs(v_hat - terms.total) < 1e-12 else np.inf)
    f = coefficients.overlap
    mean_se = record.standard_error or 0.0
    mean_z = (record.estimate - f) / mean_se if mean_se > 0 else (0.0 if abs(record.estimate - f) < 1e-12 else np.inf)
    passed = abs(z) <= VARIANCE_SIGMAS and abs(mean_z) <= MEAN_SIGMAS
    if not passed:
        logger.warning("variance check failed: V_hat=%.6g exact=%.6g z=%.2f mean_z=%.2f", v_hat, terms.total, z, mean_z)
    return VarianceReport(
        ensemble=ensemble,
        N_M=N_M,
        blocks=blocks,
        seed=seed,
        V_hat=v_hat,
        V_hat_se=v_se,
        exact=terms,
        exact_total=terms.total,
        z_score=float(z),
        mean=record.estimate,
        mean_se=mean_se,
        overlap=f,
        mean_z_score=float(mean_z),
        passed=passed,
    )
