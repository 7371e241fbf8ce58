from .closed_forms import (
    CERTIFICATE_BASE,
    W_TAIL_CONSTANTS,
    CertificateResult,
    certificate,
    closed_form_A,
    closed_form_B,
    family_certificate,
    schmidt_certificate,
    schmidt_polynomials,
    w_certificate_ratio,
    w_tail_form_B,
)
from .coefficients import (
    KAPPA,
    Ensemble,
    Method,
    MomentCoefficients,
    bloch_vector,
    clifford_fourth_moment,
    coeff_A,
    coeff_A_purity_form,
    coeff_B,
    coeff_B_contraction,
    coeff_B_dense,
    coeff_C,
    compute_coefficients,
    overlap_from_coefficients,
    product_pair_coefficients,
    single_qubit_haar_B,
)
from .operators import (
    ReplicaLabel,
    ReplicaOperator,
    build_r4_clifford,
    build_r4_haar,
    build_shadow_operators,
    build_third_moment_operators,
    local_kernel_operator,
    pauli_eigenstates,
    r4_haar_from_sphere_moments,
    replica_operator,
    sampled_fourth_moment,
    second_moment_operator,
    shadow_snapshot,
    snapshot_overlap_table,
    twirled_r4_clifford,
    verify_twirl_identity,
)
from .stabilizer import (
    StabilizerSupport,
    chain_graph_support,
    clifford_pair_sum,
    coeff_A_stabilizer,
    coeff_B_stabilizer,
    enumerate_stabilizer_states,
    product_stabilizer_support,
    stabilizer_pure_state,
    stabilizer_support_from_state,
    support_from_generators,
)

__all__ = [
    'CERTIFICATE_BASE', 'W_TAIL_CONSTANTS', 'CertificateResult', 'certificate', 'closed_form_A',
    'closed_form_B', 'family_certificate', 'schmidt_certificate', 'schmidt_polynomials',
    'w_certificate_ratio', 'w_tail_form_B',
    'KAPPA', 'Ensemble', 'Method', 'MomentCoefficients', 'bloch_vector', 'clifford_fourth_moment',
    'coeff_A', 'coeff_A_purity_form', 'coeff_B', 'coeff_B_contraction', 'coeff_B_dense', 'coeff_C',
    'compute_coefficients', 'overlap_from_coefficients', 'product_pair_coefficients', 'single_qubit_haar_B',
    'ReplicaLabel', 'ReplicaOperator', 'build_r4_clifford', 'build_r4_haar', 'build_shadow_operators',
    'build_third_moment_operators', 'local_kernel_operator', 'pauli_eigenstates', 'r4_haar_from_sphere_moments',
    'replica_operator', 'sampled_fourth_moment', 'second_moment_operator', 'shadow_snapshot',
    'snapshot_overlap_table', 'twirled_r4_clifford', 'verify_twirl_identity',
    'StabilizerSupport', 'chain_graph_support', 'clifford_pair_sum', 'coeff_A_stabilizer', 'coeff_B_stabilizer',
    'enumerate_stabilizer_states', 'product_stabilizer_support', 'stabilizer_pure_state',
    'stabilizer_support_from_state', 'support_from_generators',
]
