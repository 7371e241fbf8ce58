from .montecarlo import MonteCarloEstimate, estimate_B_monte_carlo
from .sampling import (
    PARTY_ALICE,
    PARTY_BOB,
    PARTY_UNITARY,
    block_rng,
    bloch_rotations,
    depolarized_outcome_transform,
    sample_haar_unitaries,
    sample_haar_unitary,
    sample_local_unitaries,
    sample_pauli_bases,
)
from .shadow import (
    repeat_pauli_shadow,
    run_pauli_shadow,
    sample_snapshots,
    shadow_coefficients,
    shadow_estimate,
    shadow_exact_variance,
    snapshot_overlap_factors,
)
from .shared import EnsembleKind, EstimateRecord, RunConfig, block_value, conditional_mean, run_shared_lrm
from .variance import (
    VarianceReport,
    VarianceTerms,
    empirical_variance_decomposition,
    exact_block_variance,
    sample_variance_se,
)

__all__ = [
    'MonteCarloEstimate', 'estimate_B_monte_carlo',
    'PARTY_ALICE', 'PARTY_BOB', 'PARTY_UNITARY', 'block_rng', 'bloch_rotations', 'depolarized_outcome_transform',
    'sample_haar_unitaries', 'sample_haar_unitary', 'sample_local_unitaries', 'sample_pauli_bases',
    'repeat_pauli_shadow', 'run_pauli_shadow', 'sample_snapshots', 'shadow_coefficients', 'shadow_estimate',
    'shadow_exact_variance', 'snapshot_overlap_factors',
    'EnsembleKind', 'EstimateRecord', 'RunConfig', 'block_value', 'conditional_mean', 'run_shared_lrm',
    'VarianceReport', 'VarianceTerms', 'empirical_variance_decomposition', 'exact_block_variance',
    'sample_variance_se',
]
