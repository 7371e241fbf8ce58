# This module runs one protocol simulation between two state families
# and sets the empirical block variance next to the exact decomposition
import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

from .catalog import resolve_coefficients
from .errors import ArgumentError, DipeError
from .moments import Ensemble, compute_coefficients
from .protocol import (
    EnsembleKind,
    EstimateRecord,
    RunConfig,
    exact_block_variance,
    repeat_pauli_shadow,
    run_shared_lrm,
    sample_variance_se,
    shadow_exact_variance,
)
from .states import StateFamily, parse_family

logger = logging.getLogger(__name__)


class VarianceRow(BaseModel):
    quantity: str
    exact: Optional[float] = None
    empirical: Optional[float] = None
    standard_error: Optional[float] = None
    z: Optional[float] = None


class SimulationResult(BaseModel):
    rho: str
    sigma: str
    record: EstimateRecord
    variance: List[VarianceRow] = Field(default_factory=list)
    note: str = ""


def _z(value: float, expected: float, se: Optional[float]) -> Optional[float]:
    if se is None or se <= 0:
        return None
    return float((value - expected) / se)


def _total_row(values: np.ndarray, exact: float) -> VarianceRow:
    row = VarianceRow(quantity="V_total", exact=exact)
    if values.size >= 4:
        row.empirical = float(values.var(ddof=1))
        row.standard_error = sample_variance_se(values)
        row.z = _z(row.empirical, exact, row.standard_error)
    return row


def shared_variance_table(
    rho_family: StateFamily, sigma_family: StateFamily, record: EstimateRecord
) -> List[VarianceRow]:
    """V1..V4 from exact coefficients, then the total and the mean against their empirical values."""
    if rho_family == sigma_family:
        coeffs = resolve_coefficients(rho_family)
    else:
        coeffs = compute_coefficients(rho_family.build(), sigma_family.build())
    ensemble = Ensemble(record.config.ensemble.value)
    terms = exact_block_variance(coeffs, ensemble, record.config.N_M)
    rows = [VarianceRow(quantity=name, exact=getattr(terms, name)) for name in ("V1", "V2", "V3", "V4")]
    rows.append(_total_row(np.asarray(record.block_values), terms.total))
    rows.append(
        VarianceRow(
            quantity="mean",
            exact=coeffs.overlap,
            empirical=record.estimate,
            standard_error=record.standard_error,
            z=_z(record.estimate, coeffs.overlap, record.standard_error),
        )
    )
    return rows


def simulate(
    rho: str,
    sigma: str,
    ensemble: EnsembleKind = EnsembleKind.CLIFFORD,
    N_U: int = 1000,
    N_M: int = 1,
    seed: int = 0,
    outcome_noise: float = 0.0,
    workers: Optional[int] = None,
) -> SimulationResult:
    """Shared ensembles run N_U blocks of N_M shots; shadows run N_U repetitions with N_M copies per party."""
    rho_family, sigma_family = parse_family(rho), parse_family(sigma)
    rho_state, sigma_state = rho_family.build(), sigma_family.build()
    ensemble = EnsembleKind(ensemble)
    if ensemble == EnsembleKind.SHADOW:
        if outcome_noise:
            raise ArgumentError("Outcome noise applies to the shared-unitary ensembles only")
        record = repeat_pauli_shadow(rho_state, sigma_state, N_M, N_U, seed)
    else:
        config = RunConfig(
            n=rho_state.n,
            N_U=N_U,
            N_M=N_M,
            seed=seed,
            ensemble=ensemble,
            outcome_noise=outcome_noise,
            workers=workers,
        )
        record = run_shared_lrm(rho_state, sigma_state, config)

    result = SimulationResult(rho=rho_family.label, sigma=sigma_family.label, record=record)
    if outcome_noise:
        result.note = "exact variance terms assume noiseless outcomes"
        return result
    try:
        if ensemble == EnsembleKind.SHADOW:
            exact = shadow_exact_variance(rho_state, sigma_state, N_M)
            result.variance = [_total_row(np.asarray(record.block_values), exact)]
        else:
            result.variance = shared_variance_table(rho_family, sigma_family, record)
    except DipeError as e:
        result.note = e.message
        logger.info("variance table skipped: %s", e.message)
    return result
