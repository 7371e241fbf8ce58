# This module turns variance bounds into Chebyshev copy budgets N = N_U * N_M
# The optimal shot count per block balances the second- and fourth-moment terms
import logging
from enum import Enum
from math import ceil, floor, sqrt
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, Field, model_validator

from .errors import ArgumentError

logger = logging.getLogger(__name__)

EXACT_SCAN_FACTOR = 4


class Regime(str, Enum):
    CLIFFORD = "clifford"
    HAAR = "haar"
    CONJECTURED = "conjectured"
    SHADOW = "shadow"
    STATE = "state"


class BoundKind(str, Enum):
    SIMPLE = "simple"
    EXACT = "exact"


# Worst-case (A, B) per regime as bases of n-th powers; C always uses 2 (7/4)^n
_REGIME_BASES = {
    Regime.CLIFFORD: (3.0, 1.5),
    Regime.HAAR: (3.0, 1.5),
    Regime.CONJECTURED: (3.0, 1.2),
}

_SCALING_LABELS = {
    Regime.CLIFFORD: "sqrt(4.5^n)",
    Regime.HAAR: "sqrt(4.5^n)",
    Regime.CONJECTURED: "sqrt(3.6^n)",
    Regime.SHADOW: "sqrt(7.5^n)",
    Regime.STATE: "state-specific",
}


class PlanRequest(BaseModel):
    n: int = Field(..., ge=1)
    epsilon: float = Field(..., gt=0.0, lt=1.0)
    delta: float = Field(..., gt=0.0, lt=1.0)
    regime: Regime = Regime.CLIFFORD
    A: Optional[float] = Field(None, gt=0.0)
    B: Optional[float] = Field(None, ge=0.0)
    C: Optional[float] = None
    overlap: Optional[float] = Field(None, ge=0.0, le=1.0)
    bound: BoundKind = BoundKind.SIMPLE

    @model_validator(mode="after")
    def _check_regime(self):
        if self.regime == Regime.STATE and (self.A is None or self.B is None):
            raise ValueError("state-specific regime needs A and B")
        if self.bound == BoundKind.EXACT:
            if self.regime != Regime.STATE:
                raise ValueError("exact bound needs state-specific coefficients")
            if self.C is None or self.overlap is None:
                raise ValueError("exact bound needs C and the overlap")
        return self

    def coefficients(self) -> Dict[str, float]:
        c_default = 2 * 1.75**self.n
        if self.regime == Regime.STATE:
            return {"A": self.A, "B": self.B, "C": c_default if self.C is None else self.C}
        if self.regime == Regime.SHADOW:
            raise ArgumentError("shadow budgets have no (A, B, C) form; use shadow_copies")
        a, b = _REGIME_BASES[self.regime]
        return {"A": a**self.n, "B": b**self.n, "C": c_default}


class PlanResult(BaseModel):
    n: int
    regime: Regime
    epsilon: float
    delta: float
    N_M_star: int = Field(..., ge=1)
    N_U_star: int = Field(..., ge=1)
    N_star: int = Field(..., ge=1)
    bound: float
    bound_kind: str
    continuous_N_M: Optional[float] = None
    continuous_bound: Optional[float] = None
    breakdown: Dict[str, float]
    scaling: str
    binding: Optional[str] = None

    @model_validator(mode="after")
    def _check_budget(self):
        if self.N_star < self.N_M_star:
            raise ValueError("N_star must be at least N_M_star")
        return self


def _simple_terms(coeffs: Dict[str, float], n_m: int, scale: float) -> Dict[str, float]:
    return {
        "second": coeffs["A"] / n_m / scale,
        "third": coeffs["C"] / scale,
        "fourth": n_m * coeffs["B"] / scale,
    }


def _exact_terms(coeffs: Dict[str, float], f: float, n_m: int, scale: float) -> Dict[str, float]:
    """N_M * V[X_M] / (delta eps^2) split into its four terms."""
    return {
        "first": -(f**2) * n_m / scale,
        "second": coeffs["A"] / n_m / scale,
        "third": coeffs["C"] * (n_m - 1) / n_m / scale,
        "fourth": coeffs["B"] * (n_m - 1) ** 2 / n_m / scale,
    }


def _budget(n_m: int, bound: float) -> int:
    n_u = max(1, ceil(bound / n_m))
    return n_u


def _pick(candidates: Sequence[int], terms_of) -> Dict:
    best = None
    for n_m in sorted(set(candidates)):
        terms = terms_of(n_m)
        bound = max(sum(terms.values()), 0.0)
        n_u = _budget(n_m, bound)
        key = (n_u * n_m, n_m)
        if best is None or key < best["key"]:
            best = {"key": key, "N_M": n_m, "N_U": n_u, "bound": bound, "terms": terms}
    return best


def sufficient_copies(request: PlanRequest) -> PlanResult:
    if request.regime == Regime.SHADOW:
        return shadow_copies(request.n, request.epsilon, request.delta)
    coeffs = request.coefficients()
    scale = request.delta * request.epsilon**2
    x = sqrt(coeffs["A"] / coeffs["B"]) if coeffs["B"] > 0 else float(max(1.0, coeffs["A"]))
    continuous_bound = (2 * sqrt(coeffs["A"] * coeffs["B"]) + coeffs["C"]) / scale
    if request.bound == BoundKind.SIMPLE:
        candidates = [max(1, floor(x)), max(1, ceil(x))]
        best = _pick(candidates, lambda n_m: _simple_terms(coeffs, n_m, scale))
    else:
        upper = max(2, EXACT_SCAN_FACTOR * ceil(x) + 8)
        best = _pick(range(1, upper + 1), lambda n_m: _exact_terms(coeffs, request.overlap, n_m, scale))
    result = PlanResult(
        n=request.n,
        regime=request.regime,
        epsilon=request.epsilon,
        delta=request.delta,
        N_M_star=best["N_M"],
        N_U_star=best["N_U"],
        N_star=best["N_M"] * best["N_U"],
        bound=best["bound"],
        bound_kind=request.bound.value,
        continuous_N_M=x,
        continuous_bound=continuous_bound,
        breakdown=best["terms"],
        scaling=_SCALING_LABELS[request.regime],
    )
    logger.debug("plan %s n=%d: N_M=%d N=%d", request.regime.value, request.n, result.N_M_star, result.N_star)
    return result


# ==================== PAULI SHADOWS ====================

def shadow_copies(n: int, epsilon: float, delta: float) -> PlanResult:
    """Smallest N with (15/2)^n / N^2 + 2^(n+1) / N <= delta eps^2."""
    if n < 1:
        raise ArgumentError("n must be positive")
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise ArgumentError("epsilon and delta must lie in (0, 1)")
    a, b, c = 7.5**n, 2.0 ** (n + 1), delta * epsilon**2
    n_copies = max(1, ceil((b + sqrt(b * b + 4 * a * c)) / (2 * c)))

    def fits(k: int) -> bool:
        return a / k**2 + b / k <= c

    # guard the rounded root against floating error in both directions
    while not fits(n_copies):
        n_copies += 1
    while n_copies > 1 and fits(n_copies - 1):
        n_copies -= 1
    quadratic, linear = a / n_copies**2, b / n_copies
    return PlanResult(
        n=n,
        regime=Regime.SHADOW,
        epsilon=epsilon,
        delta=delta,
        N_M_star=1,
        N_U_star=n_copies,
        N_star=n_copies,
        bound=quadratic + linear,
        bound_kind="shadow",
        breakdown={"pairs": quadratic, "cross": linear},
        scaling=_SCALING_LABELS[Regime.SHADOW],
        binding="pairs" if quadratic >= linear else "cross",
    )


# ==================== SCALING TABLE ====================

class TableRow(BaseModel):
    protocol: str
    regime: Optional[Regime]
    scaling: str
    tightness: str
    numeric: bool
    N_star: Dict[int, Optional[int]]


def scaling_table(epsilon: float = 0.1, delta: float = 0.1, n_values: Sequence[int] = range(1, 11)) -> List[TableRow]:
    """Worst-case sample-complexity rows with the explicit Chebyshev budget per n; the prior Haar row is a citation only."""
    n_values = list(n_values)
    rows = [
        TableRow(
            protocol="single-qubit Haar (prior bound)",
            regime=None,
            scaling="sqrt(6^n)",
            tightness="not achievable",
            numeric=False,
            N_star={n: None for n in n_values},
        )
    ]
    specs = [
        ("single-qubit Clifford", Regime.CLIFFORD, "identical pure product stabilizer states"),
        ("single-qubit Haar", Regime.HAAR, "not achievable"),
        ("single-qubit Haar (conjectured)", Regime.CONJECTURED, "identical pure product states"),
        ("independent Pauli shadows", Regime.SHADOW, "identical pure product states"),
    ]
    for protocol, regime, tightness in specs:
        budgets = {
            n: sufficient_copies(PlanRequest(n=n, epsilon=epsilon, delta=delta, regime=regime)).N_star for n in n_values
        }
        rows.append(
            TableRow(
                protocol=protocol,
                regime=regime,
                scaling=_SCALING_LABELS[regime],
                tightness=tightness,
                numeric=True,
                N_star=budgets,
            )
        )
    return rows
