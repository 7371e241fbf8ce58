import itertools

import numpy as np
import pytest

from dipelab.config import reset_settings
from dipelab.errors import ArgumentError, SizeError
from dipelab.qcore import (
    BASIS_CHANGE,
    DensityOperator,
    PauliString,
    PureState,
    apply_bitwise,
    compose,
    contract_replicas,
    kernel_form,
    kernel_form_walsh,
    overlap,
    partial_trace,
    party_swap,
    pauli_coefficients,
    pauli_letters_table,
    permutation_from_cycles,
    permutation_operator,
    random_density,
    reduced_purity,
    replica_tensor,
    rotated_probabilities,
    state_from_pauli_coefficients,
    swap_operator,
    tensor,
    walsh_hadamard,
)
from dipelab.states import make_bell_dimer, make_ghz, make_haar_random_pure, make_product

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])


class TestStates:
    def test_pure_state_requires_normalization(self):
        with pytest.raises(ArgumentError):
            PureState(np.array([1.0, 1.0]))

    def test_from_amplitudes_normalizes(self):
        psi = PureState.from_amplitudes([3, 4j])
        assert np.isclose(np.vdot(psi.amplitudes, psi.amplitudes).real, 1.0)
        assert psi.n == 1

    def test_amplitudes_are_read_only(self):
        psi = make_product("0")
        with pytest.raises(ValueError):
            psi.amplitudes[0] = 0

    @pytest.mark.parametrize(
        "matrix",
        [
            [[1, 1], [0, 0]],
            [[0.6, 0], [0, 0.6]],
            [[1.5, 0], [0, -0.5]],
        ],
    )
    def test_density_operator_validation(self, matrix):
        with pytest.raises(ArgumentError):
            DensityOperator(np.array(matrix))

    def test_maximally_mixed_purity(self):
        assert np.isclose(DensityOperator.maximally_mixed(2).purity(), 0.25)

    def test_overlap_pure_and_mixed_agree(self):
        psi, phi = make_product("0"), make_product("+")
        assert np.isclose(overlap(psi, phi), 0.5)
        assert np.isclose(overlap(psi.density(), phi), 0.5)

    def test_dense_cap_from_environment(self, monkeypatch):
        monkeypatch.setenv("DIPE_DENSE_CAP", "2")
        reset_settings()
        with pytest.raises(SizeError):
            make_ghz(3)

    def test_tensor_cap_from_environment(self, monkeypatch):
        monkeypatch.setenv("DIPE_TENSOR_CAP", "4")
        reset_settings()
        with pytest.raises(SizeError):
            tensor(np.eye(2), np.eye(4))


class TestTensorStructure:
    def test_partial_trace_of_bell_pair(self):
        rho = make_bell_dimer(2).density()
        assert np.allclose(partial_trace(rho.matrix, [0], 2), np.eye(2) / 2)

    def test_partial_trace_keeps_product_factor(self):
        rho = make_product("0+").density()
        plus = np.full((2, 2), 0.5)
        assert np.allclose(partial_trace(rho.matrix, [1], 2), plus)

    def test_reduced_purity_of_ghz(self):
        assert np.isclose(reduced_purity(make_ghz(3), [0]), 0.5)
        assert np.isclose(reduced_purity(make_ghz(3), [0, 1, 2]), 1.0)

    def test_partial_trace_rejects_bad_qubits(self):
        with pytest.raises(ArgumentError):
            partial_trace(np.eye(4) / 4, [2], 2)

    def test_permutation_homomorphism(self):
        pi, tau = (1, 2, 0), (0, 2, 1)
        left = permutation_operator(pi) @ permutation_operator(tau)
        assert np.allclose(left, permutation_operator(compose(pi, tau)))

    def test_permutation_moves_factor(self):
        # factor 0 moves to position 1: |0 1> -> |1 0>
        ket = np.kron([1, 0], [0, 1])
        moved = permutation_operator((1, 0)) @ ket
        assert np.allclose(moved, np.kron([0, 1], [1, 0]))

    def test_cycles(self):
        assert permutation_from_cycles([(0, 1)], 3) == (1, 0, 2)
        with pytest.raises(ArgumentError):
            permutation_from_cycles([(0, 3)], 3)

    def test_swap_operator(self):
        assert np.allclose(swap_operator(2, 0, 1), SWAP)
        with pytest.raises(ArgumentError):
            swap_operator(3, 2, 1)

    def test_party_swap_single_qubit(self):
        assert np.allclose(party_swap(1), SWAP)

    def test_swap_operator_counts_from_the_leftmost_qubit(self):
        e0, e1 = np.array([1, 0]), np.array([0, 1])
        ket = np.kron(np.kron(e0, e0), e1)
        assert np.allclose(swap_operator(3, 0, 2) @ ket, np.kron(np.kron(e1, e0), e0))
        assert np.allclose(swap_operator(3, 1, 2) @ ket, np.kron(np.kron(e0, e1), e0))
        with pytest.raises(ArgumentError):
            swap_operator(3, 0, 3)

    def test_party_swap_exchanges_registers(self):
        left, right = make_product("0+").amplitudes, make_product("1r").amplitudes
        swapped = party_swap(2) @ np.kron(left, right)
        assert np.allclose(swapped, np.kron(right, left))

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_partial_trace_composes(self, n):
        m = make_haar_random_pure(n, 7 + n).density().matrix
        for size in range(1, n + 1):
            for outer in itertools.combinations(range(n), size):
                reduced = partial_trace(m, outer, n)
                for inner_size in range(1, size + 1):
                    for inner in itertools.combinations(range(size), inner_size):
                        direct = partial_trace(m, [outer[i] for i in inner], n)
                        assert np.allclose(partial_trace(reduced, inner, size), direct)


class TestPauliStrings:
    def test_index_round_trip(self):
        p = PauliString("XZ")
        assert p.index == 7
        assert PauliString.from_index(7, 2).letters == "XZ"

    def test_parse_sign(self):
        p = PauliString.parse("-XY")
        assert p.sign == -1 and p.letters == "XY"
        assert str(p) == "-XY"

    def test_product_sign(self):
        product = PauliString("XX") * PauliString("ZZ")
        assert product.letters == "YY" and product.sign == -1
        assert np.allclose(product.matrix(), PauliString("XX").matrix() @ PauliString("ZZ").matrix())

    def test_anticommuting_product_rejected(self):
        with pytest.raises(ArgumentError):
            PauliString("X") * PauliString("Z")

    def test_commutation(self):
        assert PauliString("XX").commutes_with(PauliString("ZZ"))
        assert not PauliString("XI").commutes_with(PauliString("ZI"))

    def test_invalid_letters(self):
        with pytest.raises(ArgumentError):
            PauliString("XQ")

    def test_letters_table(self):
        table = pauli_letters_table(2)
        assert table.shape == (16, 2)
        assert list(table[7]) == [1, 3]


class TestPauliCoefficients:
    @pytest.mark.parametrize(
        "label, expected",
        [("0", [1, 0, 0, 1]), ("1", [1, 0, 0, -1]), ("+", [1, 1, 0, 0]), ("r", [1, 0, 1, 0])],
    )
    def test_single_qubit(self, label, expected):
        assert np.allclose(pauli_coefficients(make_product(label)), expected)

    def test_bell_pair(self):
        coeffs = pauli_coefficients(make_bell_dimer(2))
        expected = np.zeros(16)
        expected[[0, 5, 10, 15]] = [1, 1, -1, 1]
        assert np.allclose(coeffs, expected)

    def test_state_reconstruction(self, rng):
        rho = random_density(2, rng)
        back = state_from_pauli_coefficients(pauli_coefficients(rho))
        assert np.allclose(back.matrix, rho.matrix)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_coefficients_preserve_the_overlap(self, n, rng):
        rho, sigma = random_density(n, rng), random_density(n, rng)
        inner = np.dot(pauli_coefficients(rho), pauli_coefficients(sigma)) / 2**n
        assert np.isclose(inner, overlap(rho, sigma))
        psi = make_haar_random_pure(n, 3)
        assert np.isclose(np.dot(pauli_coefficients(psi), pauli_coefficients(psi)) / 2**n, 1.0)

    def test_replica_tensor_of_swap(self):
        # tr[F (P x Q)] / 4 = delta_PQ / 2
        t = replica_tensor(SWAP, 2)
        assert np.allclose(t, np.eye(4) / 2)

    def test_contract_second_moment(self):
        local = replica_tensor(2 * np.eye(4) + SWAP, 2)
        c = pauli_coefficients(make_product("00"))
        assert np.isclose(contract_replicas(local, [c, c]), 9.0)

    def test_contract_cap(self):
        c = pauli_coefficients(make_product("00"))
        with pytest.raises(SizeError):
            contract_replicas(np.ones((4, 4, 4)), [c, c, c], max_n=1)


class TestMeasurement:
    def test_basis_change_maps_eigenstates_to_zero(self):
        for basis, label in enumerate("+r0"):
            probs = rotated_probabilities(make_product(label), [BASIS_CHANGE[basis]])
            assert np.allclose(probs, [1, 0])

    def test_pure_and_density_paths_agree(self, rng):
        psi = make_ghz(2)
        unitaries = [BASIS_CHANGE[0], BASIS_CHANGE[1]]
        assert np.allclose(rotated_probabilities(psi, unitaries), rotated_probabilities(psi.density(), unitaries))

    def test_wrong_unitary_count(self):
        with pytest.raises(ArgumentError):
            rotated_probabilities(make_ghz(2), [np.eye(2)])

    def test_walsh_of_point_mass(self):
        delta = np.zeros(8)
        delta[0] = 1
        assert np.allclose(walsh_hadamard(delta), np.ones(8))

    def test_apply_bitwise_identity(self, rng):
        v = rng.random(8)
        assert np.allclose(apply_bitwise(v, np.eye(2)), v)

    def test_kernel_forms_agree(self, rng):
        p, q = rng.random(8), rng.random(8)
        p, q = p / p.sum(), q / q.sum()
        assert np.isclose(kernel_form(p, q), kernel_form_walsh(p, q))

    def test_kernel_form_of_identical_point_masses(self):
        p = np.array([1.0, 0, 0, 0])
        assert np.isclose(kernel_form(p, p), 4.0)
