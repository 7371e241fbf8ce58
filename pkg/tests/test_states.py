import numpy as np
import pytest

from dipelab.errors import ArgumentError
from dipelab.qcore import DensityOperator, overlap, reduced_purity
from dipelab.states import (
    FamilyKind,
    build_family,
    depolarize_local,
    make_bell_dimer,
    make_chain_graph,
    make_ghz,
    make_haar_random_pure,
    make_plus_product,
    make_product,
    make_schmidt_pair,
    make_w,
    parse_family,
)


class TestConstructors:
    def test_ghz(self):
        amps = make_ghz(3).amplitudes
        assert np.isclose(amps[0], 1 / np.sqrt(2)) and np.isclose(amps[7], 1 / np.sqrt(2))
        assert np.count_nonzero(amps) == 2

    def test_w(self):
        amps = make_w(3).amplitudes
        assert np.allclose(amps[[1, 2, 4]], 1 / np.sqrt(3))
        assert np.count_nonzero(amps) == 3

    def test_bell_dimer_odd_filler(self):
        amps = make_bell_dimer(3).amplitudes
        # (|00> + |11>)/sqrt2 x |0>
        assert np.isclose(amps[0], 1 / np.sqrt(2)) and np.isclose(amps[6], 1 / np.sqrt(2))
        assert np.count_nonzero(amps) == 2

    def test_chain_graph_single_edge(self):
        assert np.allclose(make_chain_graph(2, 1).amplitudes, np.array([1, 1, 1, -1]) / 2)

    def test_chain_without_edges_is_plus_product(self):
        assert np.allclose(make_chain_graph(3, 0).amplitudes, make_plus_product(3).amplitudes)

    def test_chain_edge_range(self):
        with pytest.raises(ArgumentError):
            make_chain_graph(3, 3)

    def test_schmidt_pair(self):
        assert np.allclose(make_schmidt_pair(0.25).amplitudes, [0.5, 0, 0, np.sqrt(0.75)])
        with pytest.raises(ArgumentError):
            make_schmidt_pair(1.5)

    def test_product_labels(self):
        assert make_product("0+r").n == 3
        with pytest.raises(ArgumentError):
            make_product("0x")

    def test_haar_random_is_reproducible(self):
        a, b = make_haar_random_pure(3, 7), make_haar_random_pure(3, 7)
        assert np.allclose(a.amplitudes, b.amplitudes)
        assert not np.allclose(a.amplitudes, make_haar_random_pure(3, 8).amplitudes)

    def test_haar_random_marginal_purity(self):
        # E tr[rho_A^2] = (d_A + d_B) / (d_A d_B + 1) for a 2 x 2 split
        purities = [reduced_purity(make_haar_random_pure(2, seed), [0]) for seed in range(1000)]
        assert abs(np.mean(purities) - 0.8) <= 0.02
        assert min(purities) >= 0.5 - 1e-12


class TestDepolarization:
    def test_limits(self):
        psi = make_ghz(2)
        assert np.allclose(depolarize_local(psi, 0.0).matrix, psi.density().matrix)
        assert np.allclose(depolarize_local(psi, 1.0).matrix, np.eye(4) / 4)

    @pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
    def test_bloch_vector_shrinks(self, p):
        rho = depolarize_local(make_product("0"), p)
        assert np.isclose(rho.purity(), (1 + (1 - p) ** 2) / 2)

    def test_range(self):
        with pytest.raises(ArgumentError):
            depolarize_local(make_product("0"), 1.5)


class TestFamilies:
    @pytest.mark.parametrize(
        "text, kind, n",
        [
            ("ghz:4", FamilyKind.GHZ, 4),
            ("w:5", FamilyKind.W, 5),
            ("belldimer:6", FamilyKind.BELL_DIMER, 6),
            ("chain:5:3", FamilyKind.CHAIN, 5),
            ("depol:plusprod:4:0.3", FamilyKind.DEPOLARIZED, 4),
            ("schmidt:0.25", FamilyKind.SCHMIDT, 2),
            ("product:0+r", FamilyKind.PRODUCT, 3),
            ("haar:3:7", FamilyKind.HAAR, 3),
        ],
    )
    def test_parse(self, text, kind, n):
        family = parse_family(text)
        assert family.kind == kind and family.n == n

    def test_labels_round_trip(self):
        for text in ("ghz:4", "chain:5:3", "depol:plusprod:4:0.3", "schmidt:0.25", "haar:3:7"):
            assert parse_family(text).label == text

    def test_n_from_argument(self):
        assert parse_family("ghz", 3).n == 3
        assert parse_family("ghz:4", 3).n == 4

    @pytest.mark.parametrize("text", ["ghz", "foo:3", "chain:3:5", "ghz:x", "schmidt:0.2:0.3", "depol:0.3"])
    def test_invalid(self, text):
        with pytest.raises(ArgumentError):
            parse_family(text)

    def test_purity_flag(self):
        assert parse_family("ghz:3").is_pure
        assert not parse_family("depol:ghz:3:0.2").is_pure
        assert parse_family("depol:ghz:3:0").is_pure

    def test_product_factors(self):
        assert parse_family("ghz:2").product_factors() is None
        assert len(parse_family("plusprod:3").product_factors()) == 3
        factors = parse_family("depol:plusprod:2:0.5").product_factors()
        assert all(isinstance(f, DensityOperator) and f.n == 1 for f in factors)

    def test_build(self):
        assert np.isclose(overlap(build_family("w:3"), make_w(3)), 1.0)
        assert isinstance(build_family("depol:w:3:0.2"), DensityOperator)
