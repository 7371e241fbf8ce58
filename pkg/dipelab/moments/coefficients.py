# This module evaluates the state-dependent variance coefficients A_n, C_n and B_{n,E}
# Generic paths contract one-qubit replica tensors against Pauli-coefficient vectors
import itertools
import logging
import warnings
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from ..config import get_settings
from ..errors import ArgumentError, SizeError, VerificationError
from ..qcore import (
    DensityOperator,
    PureState,
    State,
    as_density,
    contract_replicas,
    pauli_coefficients,
    permute_factors,
    reduced_purity,
    tensor_all,
)
from .operators import ReplicaLabel, build_third_moment_operators, replica_operator

logger = logging.getLogger(__name__)

DENSE_C_CAP = 3

# Clifford fourth moment in the Pauli basis: kappa(I,I)=1, one identity -> 1, equal letters -> 3, else 0
KAPPA = np.array([[1, 1, 1, 1], [1, 3, 0, 0], [1, 0, 3, 0], [1, 0, 0, 3]], dtype=float)


class Ensemble(str, Enum):
    CLIFFORD = "clifford"
    HAAR = "haar"


class Method(str, Enum):
    GENERIC = "generic"
    CLOSED_FORM = "closed_form"
    STABILIZER = "stabilizer"
    PRODUCT = "product"
    MC = "mc"
    SKIPPED = "skipped"


class MomentCoefficients(BaseModel):
    n: int = Field(..., ge=1)
    A: Optional[float] = None
    C: Optional[float] = None
    B_cl: Optional[float] = None
    B_haar: Optional[float] = None
    overlap: Optional[float] = Field(None, description="tr[rho sigma]")
    methods: Dict[str, Method] = Field(default_factory=dict)
    notes: Dict[str, str] = Field(default_factory=dict)

    def B(self, ensemble: "Ensemble") -> Optional[float]:
        return self.B_cl if Ensemble(ensemble) == Ensemble.CLIFFORD else self.B_haar


def _check_pair(rho: State, sigma: State) -> int:
    if rho.n != sigma.n:
        raise ArgumentError(f"States act on {rho.n} and {sigma.n} qubits")
    return rho.n


def _same_pure(rho: State, sigma: State) -> bool:
    return (
        isinstance(rho, PureState)
        and isinstance(sigma, PureState)
        and (rho is sigma or np.allclose(rho.amplitudes, sigma.amplitudes, atol=1e-14))
    )


def overlap_from_coefficients(r_hat: np.ndarray, s_hat: np.ndarray) -> float:
    n = int(round(np.log(r_hat.size) / np.log(4)))
    return float(np.dot(r_hat, s_hat) / 2**n)


# ==================== A_n ====================

def coeff_A_purity_form(psi: PureState) -> float:
    """sum over subsets S of 2^(n-|S|) tr[psi_S^2]."""
    n = psi.n
    total = 0.0
    for size in range(n + 1):
        for subset in itertools.combinations(range(n), size):
            purity = reduced_purity(psi, subset) if size else 1.0
            total += 2 ** (n - size) * purity
    return total


def coeff_A(rho: State, sigma: State, check_purity_form: bool = True) -> float:
    """tr[(2I + F)^xn (rho x sigma)]"""
    n = _check_pair(rho, sigma)
    value = contract_replicas(
        replica_operator(ReplicaLabel.SECOND_MOMENT).pauli_tensor(),
        [pauli_coefficients(rho), pauli_coefficients(sigma)],
    )
    if check_purity_form and n <= 4 and _same_pure(rho, sigma):
        purity_value = coeff_A_purity_form(rho)
        if abs(purity_value - value) > 1e-9:
            raise VerificationError(
                "A coefficient disagrees with its subsystem-purity form",
                {"contraction": value, "purity_form": purity_value},
            )
    return value


# ==================== C_n ====================

def _dense_replica_trace(op: np.ndarray, states: Sequence[DensityOperator]) -> float:
    m, n = len(states), states[0].n
    big = tensor_all([op] * n)
    x = tensor_all([s.matrix for s in states])
    # replica-major (r, q) -> qubit-major position q*m + r
    x = permute_factors(x, [q * m + r for r in range(m) for q in range(n)])
    return float(np.real(np.sum(big * x.T)))


def coeff_C(rho: State, sigma: State, method: str = "auto") -> float:
    """tr[R_AA'B^xn (rho x rho x sigma)] + tr[R_ABB'^xn (rho x sigma x sigma)]"""
    n = _check_pair(rho, sigma)
    r_aab, r_abb = build_third_moment_operators()
    if method == "auto":
        method = "dense" if n <= DENSE_C_CAP else "transfer"
    if method == "dense":
        if n > DENSE_C_CAP:
            raise SizeError(f"Dense C path materializes 8^n operators and is capped at n <= {DENSE_C_CAP}")
        a, b = as_density(rho), as_density(sigma)
        return _dense_replica_trace(r_aab.matrix, [a, a, b]) + _dense_replica_trace(r_abb.matrix, [a, b, b])
    if method == "transfer":
        r_hat, s_hat = pauli_coefficients(rho), pauli_coefficients(sigma)
        return contract_replicas(r_aab.pauli_tensor(), [r_hat, r_hat, s_hat]) + contract_replicas(
            r_abb.pauli_tensor(), [r_hat, s_hat, s_hat]
        )
    raise ArgumentError(f"Unknown C method {method!r}")


# ==================== B_{n,E} ====================

def clifford_fourth_moment(weights: np.ndarray) -> float:
    """4^-n sum_{P,Q} kappa_n(P, Q) w(P) w(Q) with w(P) = rho_hat(P) sigma_hat(P)."""
    return contract_replicas(KAPPA / 4, [weights, weights])


def _haar_generic(r_hat: np.ndarray, s_hat: np.ndarray, n: int, allow_large: bool) -> float:
    settings = get_settings()
    if n > settings.generic_b_cap:
        if not allow_large:
            raise SizeError(
                f"Generic Haar fourth-moment contraction is capped at n <= {settings.generic_b_cap}",
                {"n": n, "cap": settings.generic_b_cap},
            )
        if n > settings.transfer_cap:
            raise SizeError(f"n={n} exceeds the transfer cap of {settings.transfer_cap}")
        message = f"Running the generic Haar fourth-moment contraction at n={n} (16^n memory)"
        warnings.warn(message, RuntimeWarning, stacklevel=3)
        logger.warning(message)
    return contract_replicas(
        replica_operator(ReplicaLabel.R4_HAAR).pauli_tensor(), [r_hat, s_hat, r_hat, s_hat], max_n=settings.transfer_cap
    )


def coeff_B(rho: State, sigma: State, ensemble: Ensemble, allow_large: bool = False) -> float:
    """tr[R_4,E^xn (rho x sigma x rho x sigma)]"""
    n = _check_pair(rho, sigma)
    r_hat, s_hat = pauli_coefficients(rho), pauli_coefficients(sigma)
    if Ensemble(ensemble) == Ensemble.CLIFFORD:
        return clifford_fourth_moment(r_hat * s_hat)
    return _haar_generic(r_hat, s_hat, n, allow_large)


def coeff_B_contraction(rho: State, sigma: State, ensemble: Ensemble) -> float:
    """Plain replica-tensor contraction for either ensemble (used to cross-check the Clifford kappa form)."""
    _check_pair(rho, sigma)
    label = ReplicaLabel.R4_CLIFFORD if Ensemble(ensemble) == Ensemble.CLIFFORD else ReplicaLabel.R4_HAAR
    r_hat, s_hat = pauli_coefficients(rho), pauli_coefficients(sigma)
    return contract_replicas(replica_operator(label).pauli_tensor(), [r_hat, s_hat, r_hat, s_hat])


def coeff_B_dense(rho: State, sigma: State, ensemble: Ensemble) -> float:
    """Direct trace against the materialized R^xn; n <= 3 only."""
    n = _check_pair(rho, sigma)
    if n > 3:
        raise SizeError("Dense fourth-moment trace is capped at n <= 3")
    label = ReplicaLabel.R4_CLIFFORD if Ensemble(ensemble) == Ensemble.CLIFFORD else ReplicaLabel.R4_HAAR
    a, b = as_density(rho), as_density(sigma)
    return _dense_replica_trace(replica_operator(label).matrix, [a, b, a, b])


# ==================== ASSEMBLY ====================

def compute_coefficients(rho: State, sigma: State, allow_large: bool = False) -> MomentCoefficients:
    """Every coefficient through the generic paths; entries beyond the caps are left empty."""
    n = _check_pair(rho, sigma)
    settings = get_settings()
    r_hat, s_hat = pauli_coefficients(rho), pauli_coefficients(sigma)
    out = MomentCoefficients(n=n, overlap=overlap_from_coefficients(r_hat, s_hat))
    out.A = coeff_A(rho, sigma)
    out.B_cl = clifford_fourth_moment(r_hat * s_hat)
    out.methods.update(A=Method.GENERIC, B_cl=Method.GENERIC)
    if n <= settings.transfer_cap:
        out.C = coeff_C(rho, sigma)
        out.methods["C"] = Method.GENERIC
    else:
        out.methods["C"] = Method.SKIPPED
        out.notes["C"] = f"n={n} exceeds the transfer cap"
    try:
        out.B_haar = _haar_generic(r_hat, s_hat, n, allow_large)
        out.methods["B_haar"] = Method.GENERIC
    except SizeError as e:
        out.methods["B_haar"] = Method.SKIPPED
        out.notes["B_haar"] = str(e)
    return out


def single_qubit_haar_B(r: Sequence[float], s: Sequence[float]) -> float:
    """1/4 + x/2 + 3 q^2/20 + 3 x^2/10 with x = r.s and q = |r||s| for Bloch vectors r, s."""
    r, s = np.asarray(r, dtype=float), np.asarray(s, dtype=float)
    x = float(np.dot(r, s))
    q = float(np.linalg.norm(r) * np.linalg.norm(s))
    return 0.25 + x / 2 + 3 * q**2 / 20 + 3 * x**2 / 10


def bloch_vector(state: State) -> np.ndarray:
    if state.n != 1:
        raise ArgumentError("Bloch vectors exist for single qubits only")
    return pauli_coefficients(state)[1:]


def product_pair_coefficients(rho_factors: List[State], sigma_factors: List[State]) -> MomentCoefficients:
    """Coefficients of a product pair from its single-qubit factors; C keeps its two terms separate."""
    if len(rho_factors) != len(sigma_factors) or not rho_factors:
        raise ArgumentError("Product pairs need the same non-zero number of factors on both sides")
    r_aab, r_abb = build_third_moment_operators()
    a = c_aab = c_abb = b_cl = b_h = f = 1.0
    for rq, sq in zip(rho_factors, sigma_factors):
        if rq.n != 1 or sq.n != 1:
            raise ArgumentError("Product factors must be single-qubit states")
        r_hat, s_hat = pauli_coefficients(rq), pauli_coefficients(sq)
        a *= coeff_A(rq, sq, check_purity_form=False)
        c_aab *= contract_replicas(r_aab.pauli_tensor(), [r_hat, r_hat, s_hat])
        c_abb *= contract_replicas(r_abb.pauli_tensor(), [r_hat, s_hat, s_hat])
        b_cl *= clifford_fourth_moment(r_hat * s_hat)
        b_h *= single_qubit_haar_B(r_hat[1:], s_hat[1:])
        f *= overlap_from_coefficients(r_hat, s_hat)
    methods = {key: Method.PRODUCT for key in ("A", "C", "B_cl", "B_haar")}
    return MomentCoefficients(n=len(rho_factors), A=a, C=c_aab + c_abb, B_cl=b_cl, B_haar=b_h, overlap=f, methods=methods)
