import numpy as np
import pytest

from dipelab.errors import ArgumentError
from dipelab.moments import (
    CERTIFICATE_BASE,
    Ensemble,
    certificate,
    closed_form_A,
    closed_form_B,
    coeff_A,
    coeff_B,
    family_certificate,
    schmidt_certificate,
    schmidt_polynomials,
    w_certificate_ratio,
    w_tail_form_B,
)
from dipelab.states import build_family, make_ghz, make_schmidt_pair

FAMILIES = ["ghz", "w", "belldimer", "plusprod"]


class TestClosedForms:
    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_match_generic(self, family, n):
        psi = build_family(f"{family}:{n}")
        assert np.isclose(closed_form_A(family, n), coeff_A(psi, psi))
        assert np.isclose(closed_form_B(family, n), coeff_B(psi, psi, Ensemble.HAAR))

    @pytest.mark.parametrize("family", ["belldimer", "plusprod"])
    @pytest.mark.parametrize("n", [2, 3])
    def test_clifford_forms(self, family, n):
        psi = build_family(f"{family}:{n}")
        assert np.isclose(closed_form_B(family, n, Ensemble.CLIFFORD), coeff_B(psi, psi, Ensemble.CLIFFORD))

    @pytest.mark.parametrize("n, value", [(1, 1.2), (2, 1.45), (3, 1.338)])
    def test_ghz_haar_landmarks(self, n, value):
        assert np.isclose(closed_form_B("ghz", n), value)

    @pytest.mark.parametrize("n", range(1, 13))
    def test_w_tail_form(self, n):
        assert np.isclose(w_tail_form_B(n), closed_form_B("w", n))

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_bell_dimers_beat_the_product_value(self, n):
        assert closed_form_B("belldimer", n) > 1.2**n

    def test_errors(self):
        with pytest.raises(ArgumentError):
            closed_form_A("haar", 2)
        with pytest.raises(ArgumentError):
            closed_form_A("ghz", 0)
        with pytest.raises(ArgumentError):
            closed_form_B("ghz", 2, Ensemble.CLIFFORD)


class TestCertificate:
    @pytest.mark.parametrize("family", FAMILIES)
    def test_families_pass(self, family):
        for n in range(1, 13):
            result = family_certificate(family, n)
            assert result.passed, (family, n)
            assert np.isclose(result.bound, CERTIFICATE_BASE**n)

    def test_product_states_saturate(self):
        assert all(np.isclose(family_certificate("plusprod", n).ratio, 1.0) for n in range(1, 13))

    def test_w_ratio(self):
        for n in range(1, 13):
            assert np.isclose(w_certificate_ratio(n), family_certificate("w", n).ratio)

    def test_generic_certificate(self):
        result = certificate(make_ghz(3))
        assert result.passed
        assert np.isclose(result.A, 18)
        assert result.margin > 0


class TestSchmidtPair:
    @pytest.mark.parametrize("lam", [0.0, 0.1, 0.3, 0.5])
    def test_polynomials_match_generic(self, lam):
        psi = make_schmidt_pair(lam)
        poly = schmidt_polynomials(lam * (1 - lam))
        assert np.isclose(poly["A"], coeff_A(psi, psi))
        assert np.isclose(poly["B_haar"], coeff_B(psi, psi, Ensemble.HAAR))
        assert np.isclose(poly["AB"], poly["A"] * poly["B_haar"])

    def test_maximum_at_product_end(self):
        products = [schmidt_certificate(t).product for t in np.linspace(0, 0.25, 26)]
        assert np.isclose(max(products), 324 / 25)
        assert np.argmax(products) == 0
        assert np.isclose(products[-1], 7 * 1.45)

    def test_range(self):
        with pytest.raises(ArgumentError):
            schmidt_polynomials(0.3)
