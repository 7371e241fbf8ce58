import numpy as np
import pytest

from dipelab.errors import ArgumentError, SizeError
from dipelab.moments import (
    Ensemble,
    chain_graph_support,
    clifford_pair_sum,
    closed_form_B,
    coeff_A_stabilizer,
    coeff_B,
    coeff_B_stabilizer,
    enumerate_stabilizer_states,
    product_stabilizer_support,
    stabilizer_pure_state,
    stabilizer_support_from_state,
    support_from_generators,
)
from dipelab.qcore import overlap
from dipelab.states import make_bell_dimer, make_chain_graph, make_w

BELL = ["XX", "ZZ"]
GHZ3 = ["XXX", "ZZI", "IZZ"]


class TestEnumeration:
    @pytest.mark.parametrize("n, count", [(1, 6), (2, 60)])
    def test_counts(self, n, count):
        assert len(enumerate_stabilizer_states(n)) == count

    def test_cap(self):
        with pytest.raises(SizeError):
            enumerate_stabilizer_states(4)

    def test_two_qubit_clifford_maximum(self):
        states = enumerate_stabilizer_states(2)
        values = [coeff_B_stabilizer(s, Ensemble.CLIFFORD) for s in states]
        assert max(values) <= 9 / 4 + 1e-12
        maximizers = [s for s, v in zip(states, values) if np.isclose(v, 9 / 4)]
        assert len(maximizers) == 36
        assert all(s.is_product() for s in maximizers)
        assert all(np.isclose(v, 17 / 8) for s, v in zip(states, values) if not s.is_product())


class TestSupports:
    def test_product_support(self):
        support = product_stabilizer_support("0+r")
        assert support.is_product()
        assert np.isclose(coeff_A_stabilizer(support), 27)
        assert np.isclose(coeff_B_stabilizer(support, Ensemble.CLIFFORD), 1.5**3)
        assert np.isclose(coeff_B_stabilizer(support, Ensemble.HAAR), 1.2**3)

    def test_unknown_product_label(self):
        with pytest.raises(ArgumentError):
            product_stabilizer_support("0z")

    @pytest.mark.parametrize(
        "gens",
        [["XI", "ZI"], ["XX", "XX"], ["XX"]],
    )
    def test_bad_generators(self, gens):
        with pytest.raises(ArgumentError):
            support_from_generators(gens)

    def test_A_values(self):
        assert np.isclose(coeff_A_stabilizer(support_from_generators(GHZ3)), 18)
        assert np.isclose(coeff_A_stabilizer(support_from_generators(BELL)), 7)

    def test_recover_from_state(self):
        support = stabilizer_support_from_state(make_bell_dimer(2))
        assert sorted(e.letters for e in support.elements) == ["II", "XX", "YY", "ZZ"]
        assert np.isclose(overlap(stabilizer_pure_state(support), make_bell_dimer(2)), 1.0)

    def test_non_stabilizer_state(self):
        with pytest.raises(ArgumentError):
            stabilizer_support_from_state(make_w(3))

    def test_chain_range(self):
        with pytest.raises(ArgumentError):
            chain_graph_support(3, 3)


class TestGroupMoments:
    @pytest.mark.parametrize("n, m", [(2, 1), (3, 1), (3, 2), (4, 3)])
    @pytest.mark.parametrize("ensemble", [Ensemble.CLIFFORD, Ensemble.HAAR])
    def test_chain_matches_generic(self, n, m, ensemble):
        psi = make_chain_graph(n, m)
        generic = coeff_B(psi, psi, ensemble, allow_large=n > 3)
        assert np.isclose(coeff_B_stabilizer(chain_graph_support(n, m), ensemble), generic)

    @pytest.mark.parametrize("n", [3, 4])
    def test_ghz_haar_matches_closed_form(self, n):
        gens = ["X" * n] + ["I" * i + "ZZ" + "I" * (n - i - 2) for i in range(n - 1)]
        value = coeff_B_stabilizer(support_from_generators(gens), Ensemble.HAAR)
        assert np.isclose(value, closed_form_B("ghz", n))

    def test_chain_clifford_is_not_monotone_in_edges(self):
        # entangling the chain lowers the Clifford moment below the product value
        assert np.isclose(coeff_B_stabilizer(chain_graph_support(2, 0), Ensemble.CLIFFORD), 2.25)
        assert np.isclose(coeff_B_stabilizer(chain_graph_support(2, 1), Ensemble.CLIFFORD), 2.125)
        assert np.isclose(coeff_B_stabilizer(chain_graph_support(3, 1), Ensemble.CLIFFORD), 3.1875)

    def test_pair_sum_matches_dense_weights(self):
        support = chain_graph_support(4, 2)
        assert np.isclose(clifford_pair_sum(support), coeff_B_stabilizer(support, Ensemble.CLIFFORD))

    def test_haar_cap(self):
        support = chain_graph_support(7, 0)
        assert np.isclose(coeff_B_stabilizer(support, Ensemble.CLIFFORD), 1.5**7)
        with pytest.raises(SizeError):
            coeff_B_stabilizer(support, Ensemble.HAAR)
