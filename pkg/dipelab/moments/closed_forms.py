# This module holds the closed-form coefficient values of the benchmark families
# and the A*B_haar <= (18/5)^n certificate evaluated on them
import logging
from fractions import Fraction
from typing import Optional, Union

from pydantic import BaseModel

from ..errors import ArgumentError
from ..qcore import State
from .coefficients import Ensemble, coeff_A, coeff_B

logger = logging.getLogger(__name__)

CERTIFICATE_BASE = 18 / 5

# Tail constants of the W-state Haar fourth moment, B = n^-4 sum_r (n)_r (6/5)^(n-r) C_r
W_TAIL_CONSTANTS = (Fraction(6, 5), Fraction(254, 25), Fraction(587, 125), Fraction(1561, 2500))

CLOSED_FORM_FAMILIES = ("ghz", "w", "belldimer", "plusprod", "product")


def _family_key(family) -> str:
    key = str(getattr(family, "value", family)).lower()
    if key not in CLOSED_FORM_FAMILIES:
        raise ArgumentError(f"No closed form for family {key!r} (supported: {', '.join(CLOSED_FORM_FAMILIES)})")
    return "product" if key == "plusprod" else key


def _check_n(n: int) -> None:
    if n < 1:
        raise ArgumentError(f"Closed forms need n >= 1, got {n}")


def closed_form_A(family, n: int) -> float:
    key = _family_key(family)
    _check_n(n)
    if key == "ghz":
        return (3**n + 2**n + 1) / 2
    if key == "w":
        return 3**n * (5 * n + 4) / (9 * n)
    if key == "belldimer":
        return float(7 ** (n // 2) * 3 ** (n % 2))
    return float(3**n)


def closed_form_B(family, n: int, ensemble: Ensemble = Ensemble.HAAR) -> float:
    key = _family_key(family)
    _check_n(n)
    if Ensemble(ensemble) == Ensemble.CLIFFORD:
        if key == "product":
            return 1.5**n
        if key == "belldimer":
            return (17 / 8) ** (n // 2) * 1.5 ** (n % 2)
        raise ArgumentError(f"No Clifford closed form for family {key!r}")
    if key == "ghz":
        return (
            5 / 8 * 1.2**n
            + 0.5 * 0.8**n
            + 0.75 * 0.2**n
            + 0.5 * (-0.2) ** n
            + 0.3**n
            + (-0.3) ** n
        )
    if key == "w":
        return (1561 * n**3 + 4722 * n**2 + 11483 * n - 12582) / (5184 * n**3) * 1.2**n
    if key == "belldimer":
        return (29 / 20) ** (n // 2) * 1.2 ** (n % 2)
    return 1.2**n


def w_tail_form_B(n: int) -> float:
    """n^-4 sum_{r=1..4} (n)_r (6/5)^(n-r) C_r with falling factorials (n)_r."""
    _check_n(n)
    total = Fraction(0)
    falling = 1
    for r, c in enumerate(W_TAIL_CONSTANTS, start=1):
        falling *= n - r + 1
        total += falling * Fraction(6, 5) ** (n - r) * c
    return float(total / n**4)


def schmidt_polynomials(t: float) -> dict:
    """A_2, B_2,H and their product for the Schmidt pair with t = lambda (1 - lambda)."""
    if not 0.0 <= t <= 0.25:
        raise ArgumentError(f"t = lambda(1-lambda) lies in [0, 1/4], got {t}")
    a2 = 9 - 8 * t
    b2 = 36 / 25 - 58 / 25 * t + 236 / 25 * t**2
    ab = 324 / 25 - 162 / 5 * t + 2588 / 25 * t**2 - 1888 / 25 * t**3
    return {"A": a2, "B_haar": b2, "AB": ab}


def w_certificate_ratio(n: int) -> float:
    _check_n(n)
    return (5 * n + 4) * (1561 * n**3 + 4722 * n**2 + 11483 * n - 12582) / (46656 * n**4)


# ==================== CERTIFICATE ====================

class CertificateResult(BaseModel):
    n: int
    label: str
    A: float
    B_haar: float
    product: float
    bound: float
    margin: float
    ratio: float
    passed: bool


def _certify(n: int, label: str, a: float, b: float, tol: float = 1e-9) -> CertificateResult:
    bound = CERTIFICATE_BASE**n
    product = a * b
    result = CertificateResult(
        n=n,
        label=label,
        A=a,
        B_haar=b,
        product=product,
        bound=bound,
        margin=bound - product,
        ratio=product / bound,
        passed=product <= bound * (1 + tol),
    )
    if not result.passed:
        logger.warning("certificate fails for %s: A*B = %.12g > %.12g", label, product, bound)
    return result


def certificate(rho: State, sigma: Optional[State] = None, allow_large: bool = False) -> CertificateResult:
    """A_n B_{n,H} against (18/5)^n from generic contractions; sigma defaults to rho."""
    sigma = rho if sigma is None else sigma
    a = coeff_A(rho, sigma)
    b = coeff_B(rho, sigma, Ensemble.HAAR, allow_large=allow_large)
    return _certify(rho.n, "state", a, b)


def family_certificate(family: Union[str, object], n: int) -> CertificateResult:
    """Same check through the closed forms, valid at any n."""
    key = _family_key(family)
    return _certify(n, f"{key}:{n}", closed_form_A(key, n), closed_form_B(key, n, Ensemble.HAAR))


def schmidt_certificate(t: float) -> CertificateResult:
    poly = schmidt_polynomials(t)
    return _certify(2, f"schmidt:t={t:g}", poly["A"], poly["B_haar"])
