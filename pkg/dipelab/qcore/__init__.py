from .linalg import (
    ComplexMatrix,
    DensityOperator,
    PureState,
    State,
    as_density,
    as_matrix,
    check_dense_cap,
    compose,
    is_hermitian,
    is_psd,
    is_unitary,
    overlap,
    partial_trace,
    party_swap,
    permutation_from_cycles,
    permutation_operator,
    permute_factors,
    qubit_count,
    random_density,
    reduced_purity,
    swap_operator,
    tensor,
    tensor_all,
)
from .measure import (
    BASIS_CHANGE,
    apply_bitwise,
    kernel_form,
    kernel_form_walsh,
    rotated_probabilities,
    walsh_hadamard,
)
from .paulis import (
    PAULI_LABELS,
    PAULI_MATRICES,
    PauliString,
    contract_replicas,
    pauli_coefficients,
    pauli_letters_table,
    replica_tensor,
    state_from_pauli_coefficients,
)

__all__ = [
    'ComplexMatrix', 'DensityOperator', 'PureState', 'State', 'as_density', 'as_matrix',
    'check_dense_cap', 'compose', 'is_hermitian', 'is_psd', 'is_unitary', 'overlap',
    'partial_trace', 'party_swap', 'permutation_from_cycles', 'permutation_operator', 'permute_factors',
    'qubit_count', 'random_density', 'reduced_purity', 'swap_operator', 'tensor', 'tensor_all',
    'BASIS_CHANGE', 'apply_bitwise', 'kernel_form', 'kernel_form_walsh', 'rotated_probabilities',
    'walsh_hadamard', 'PAULI_LABELS', 'PAULI_MATRICES', 'PauliString', 'contract_replicas',
    'pauli_coefficients', 'pauli_letters_table', 'replica_tensor', 'state_from_pauli_coefficients',
]
