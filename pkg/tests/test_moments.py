import numpy as np
import pytest
from scipy.stats import unitary_group

from dipelab.errors import ArgumentError, SizeError
from dipelab.moments import (
    Ensemble,
    Method,
    build_r4_clifford,
    build_r4_haar,
    build_shadow_operators,
    build_third_moment_operators,
    closed_form_B,
    coeff_A,
    coeff_A_purity_form,
    coeff_B,
    coeff_B_contraction,
    coeff_B_dense,
    coeff_C,
    compute_coefficients,
    pauli_eigenstates,
    product_pair_coefficients,
    r4_haar_from_sphere_moments,
    sampled_fourth_moment,
    second_moment_operator,
    single_qubit_haar_B,
    snapshot_overlap_table,
    twirled_r4_clifford,
    verify_twirl_identity,
)
from dipelab.moments.coefficients import bloch_vector
from dipelab.protocol import bloch_rotations
from dipelab.qcore import DensityOperator, random_density
from dipelab.states import make_bell_dimer, make_ghz, make_haar_random_pure, make_plus_product, make_product

ZERO = np.array([1.0, 0.0])


class TestReplicaOperators:
    def test_second_moment(self):
        op = second_moment_operator()
        assert np.isclose(op.trace(), 10)
        assert np.allclose(op.spectrum(), [1, 3, 3, 3])
        assert np.isclose(op.on_product([ZERO, ZERO]), 3)

    def test_third_moment_on_pure_product(self):
        r_aab, r_abb = build_third_moment_operators()
        assert np.isclose(r_aab.on_product([ZERO] * 3), 1.5)
        assert np.isclose(r_abb.on_product([ZERO] * 3), 1.5)
        assert np.isclose(r_aab.trace(), 2)

    @pytest.mark.parametrize("builder, value", [(build_r4_clifford, 1.5), (build_r4_haar, 1.2)])
    def test_fourth_moment_on_pure_product(self, builder, value):
        op = builder()
        assert op.m == 4
        assert np.isclose(op.trace(), 4)
        assert np.isclose(op.on_product([ZERO] * 4), value)

    def test_six_directions_give_the_clifford_moment(self):
        directions = np.vstack([np.eye(3), -np.eye(3)])
        assert np.allclose(sampled_fourth_moment(directions), build_r4_clifford().matrix)

    def test_sphere_moments_give_the_haar_moment(self):
        assert np.allclose(r4_haar_from_sphere_moments(), build_r4_haar().matrix)

    def test_identity_twirl_is_trivial(self):
        assert np.allclose(twirled_r4_clifford(np.eye(3)[None]), build_r4_clifford().matrix)

    def test_scipy_haar_unitaries_twirl_to_the_haar_moment(self):
        unitaries = unitary_group.rvs(2, size=50_000, random_state=np.random.default_rng(5))
        twirled = twirled_r4_clifford(bloch_rotations(unitaries))
        assert np.max(np.abs(twirled - build_r4_haar().matrix)) < 0.1

    def test_snapshot_overlaps(self):
        table = snapshot_overlap_table()
        assert np.allclose(np.diag(table), 5)
        assert set(np.round(table, 6).ravel()) == {5.0, -4.0, 0.5}

    def test_shadow_operators_are_hermitian(self):
        omega2, omega3 = build_shadow_operators()
        assert omega2.m == 2 and omega3.m == 3

    def test_eigenstates_are_normalized(self):
        assert np.allclose(np.linalg.norm(pauli_eigenstates(), axis=1), 1)

    @pytest.mark.slow
    def test_haar_twirl_of_clifford_moment(self):
        assert verify_twirl_identity(1_000_000, seed=11) < 0.02


class TestCoefficientLandmarks:
    def test_A(self):
        assert np.isclose(coeff_A(make_product("0"), make_product("0")), 3)
        mixed = DensityOperator.maximally_mixed(1)
        assert np.isclose(coeff_A(mixed, mixed), 2.5)
        assert np.isclose(coeff_A(make_ghz(3), make_ghz(3)), 18)
        assert np.isclose(coeff_A(make_bell_dimer(2), make_bell_dimer(2)), 7)

    def test_purity_form(self):
        assert np.isclose(coeff_A_purity_form(make_ghz(3)), 18)

    def test_C(self):
        psi = make_product("0")
        assert np.isclose(coeff_C(psi, psi), 3)
        plus = make_plus_product(3)
        assert np.isclose(coeff_C(plus, plus), 6.75)

    @pytest.mark.parametrize(
        "state, clifford, haar",
        [
            (make_product("0"), 1.5, 1.2),
            (make_bell_dimer(2), 17 / 8, 1.45),
            (make_product("00"), 9 / 4, 1.44),
        ],
    )
    def test_B(self, state, clifford, haar):
        assert np.isclose(coeff_B(state, state, Ensemble.CLIFFORD), clifford)
        assert np.isclose(coeff_B(state, state, Ensemble.HAAR), haar)

    def test_plus_product_clifford_B(self):
        for n in (1, 2, 3, 4):
            psi = make_plus_product(n)
            assert np.isclose(coeff_B(psi, psi, Ensemble.CLIFFORD), 1.5**n)

    def test_fully_depolarized_qubit(self):
        mixed = DensityOperator.maximally_mixed(1)
        assert np.isclose(coeff_B(mixed, mixed, Ensemble.CLIFFORD), 0.25)
        assert np.isclose(coeff_B(mixed, mixed, Ensemble.HAAR), 0.25)

    def test_mismatched_sizes(self):
        with pytest.raises(ArgumentError):
            coeff_A(make_ghz(2), make_ghz(3))


class TestCrossChecks:
    def test_dense_and_transfer_C(self, rng):
        rho, sigma = random_density(2, rng), random_density(2, rng)
        assert np.isclose(coeff_C(rho, sigma, "dense"), coeff_C(rho, sigma, "transfer"))

    def test_dense_C_cap(self):
        with pytest.raises(SizeError):
            coeff_C(make_ghz(4), make_ghz(4), "dense")

    def test_unknown_C_method(self):
        with pytest.raises(ArgumentError):
            coeff_C(make_ghz(1), make_ghz(1), "fast")

    @pytest.mark.parametrize("ensemble", [Ensemble.CLIFFORD, Ensemble.HAAR])
    def test_B_paths_agree(self, ensemble, rng):
        rho, sigma = random_density(2, rng), random_density(2, rng)
        value = coeff_B(rho, sigma, ensemble)
        assert np.isclose(value, coeff_B_contraction(rho, sigma, ensemble))
        assert np.isclose(value, coeff_B_dense(rho, sigma, ensemble))

    def test_single_qubit_haar_formula(self, rng):
        rho, sigma = random_density(1, rng), random_density(1, rng)
        expected = single_qubit_haar_B(bloch_vector(rho), bloch_vector(sigma))
        assert np.isclose(coeff_B(rho, sigma, Ensemble.HAAR), expected)

    def test_product_pair(self, rng):
        rho_factors = [random_density(1, rng) for _ in range(2)]
        sigma_factors = [random_density(1, rng) for _ in range(2)]
        rho = DensityOperator(np.kron(rho_factors[0].matrix, rho_factors[1].matrix))
        sigma = DensityOperator(np.kron(sigma_factors[0].matrix, sigma_factors[1].matrix))
        product = product_pair_coefficients(rho_factors, sigma_factors)
        generic = compute_coefficients(rho, sigma)
        for field in ("A", "C", "B_cl", "B_haar", "overlap"):
            assert np.isclose(getattr(product, field), getattr(generic, field)), field
        assert product.methods["A"] == Method.PRODUCT

    def test_product_pair_needs_matching_factors(self):
        with pytest.raises(ArgumentError):
            product_pair_coefficients([make_product("0")], [])


class TestRandomPairBounds:
    @pytest.mark.parametrize("n", [1, 2])
    @pytest.mark.parametrize("ensemble", [Ensemble.CLIFFORD, Ensemble.HAAR])
    def test_cross_B_below_the_larger_identical_pair(self, n, ensemble):
        for seed in range(0, 40, 2):
            psi, phi = make_haar_random_pure(n, seed), make_haar_random_pure(n, seed + 1)
            own = max(coeff_B(psi, psi, ensemble), coeff_B(phi, phi, ensemble))
            assert coeff_B(psi, phi, ensemble) <= own + 1e-9

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_C_below_twice_seven_quarters_to_the_n(self, n, rng):
        top = 2 * 1.75**n
        for seed in range(0, 20, 2):
            psi, phi = make_haar_random_pure(n, 100 + seed), make_haar_random_pure(n, 101 + seed)
            assert coeff_C(psi, phi) <= top + 1e-9
        for _ in range(5):
            assert coeff_C(random_density(n, rng), random_density(n, rng)) <= top + 1e-9


class TestHaarCap:
    def test_generic_haar_is_capped(self):
        psi = make_ghz(4)
        with pytest.raises(SizeError):
            coeff_B(psi, psi, Ensemble.HAAR)

    def test_allow_large_warns(self):
        psi = make_ghz(4)
        with pytest.warns(RuntimeWarning):
            value = coeff_B(psi, psi, Ensemble.HAAR, allow_large=True)
        assert np.isclose(value, closed_form_B("ghz", 4))

    def test_compute_coefficients_skips_capped_entries(self):
        psi = make_ghz(4)
        coeffs = compute_coefficients(psi, psi)
        assert coeffs.B_haar is None
        assert coeffs.methods["B_haar"] == Method.SKIPPED
        assert "capped" in coeffs.notes["B_haar"]
        assert np.isclose(coeffs.A, (81 + 16 + 1) / 2)
        assert np.isclose(coeffs.overlap, 1.0)

    def test_B_accessor(self):
        coeffs = compute_coefficients(make_product("0"), make_product("0"))
        assert np.isclose(coeffs.B(Ensemble.CLIFFORD), 1.5)
        assert np.isclose(coeffs.B("haar"), 1.2)
