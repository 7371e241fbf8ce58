# This module picks the cheapest exact path for each coefficient of a state family
# Order of preference: product factorization, closed form, stabilizer group, generic contraction, Monte Carlo
import logging
from typing import Optional

from .config import get_settings
from .errors import DipeError, SizeError
from .moments import (
    Ensemble,
    Method,
    MomentCoefficients,
    StabilizerSupport,
    chain_graph_support,
    closed_form_A,
    closed_form_B,
    clifford_fourth_moment,
    coeff_A,
    coeff_A_stabilizer,
    coeff_B,
    coeff_B_stabilizer,
    coeff_C,
    product_pair_coefficients,
    support_from_generators,
)
from .moments.stabilizer import HAAR_STABILIZER_CAP
from .qcore import pauli_coefficients
from .states import FamilyKind, StateFamily

logger = logging.getLogger(__name__)

CLOSED_FORM_KINDS = {
    FamilyKind.GHZ: "ghz",
    FamilyKind.W: "w",
    FamilyKind.BELL_DIMER: "belldimer",
    FamilyKind.PRODUCT_PLUS: "product",
    FamilyKind.PRODUCT: "product",
}


def ghz_support(n: int) -> StabilizerSupport:
    gens = ["X" * n] + ["I" * i + "ZZ" + "I" * (n - i - 2) for i in range(n - 1)]
    return support_from_generators(gens)


def family_support(family: StateFamily) -> Optional[StabilizerSupport]:
    """Stabilizer group of a pure stabilizer family, None otherwise."""
    if family.kind == FamilyKind.CHAIN:
        return chain_graph_support(family.n, family.m)
    if family.kind == FamilyKind.GHZ:
        return ghz_support(family.n)
    return None


def _fill_C(out: MomentCoefficients, family: StateFamily) -> None:
    if out.C is not None:
        return
    if family.n > get_settings().transfer_cap:
        out.methods["C"] = Method.SKIPPED
        out.notes["C"] = f"n={family.n} exceeds the transfer cap"
        return
    state = family.build()
    out.C = coeff_C(state, state)
    out.methods["C"] = Method.GENERIC


def _fill_mc(out: MomentCoefficients, family: StateFamily, ensemble: Ensemble, samples: int, seed: int) -> None:
    from .protocol import estimate_B_monte_carlo

    state = family.build()
    estimate = estimate_B_monte_carlo(state, state, ensemble.value, samples, seed)
    field = "B_cl" if ensemble == Ensemble.CLIFFORD else "B_haar"
    setattr(out, field, estimate.mean)
    out.methods[field] = Method.MC
    out.notes[field] = f"mc seed={seed} samples={samples} se={estimate.standard_error:.3g}"


def resolve_coefficients(
    family: StateFamily,
    allow_large: bool = False,
    mc_samples: Optional[int] = None,
    seed: int = 0,
) -> MomentCoefficients:
    """Coefficients of the identical pair (rho, rho) for `family`, each tagged with the path used."""
    n = family.n
    factors = family.product_factors()
    if factors is not None:
        out = product_pair_coefficients(factors, factors)
        return out

    out = MomentCoefficients(n=n, overlap=1.0 if family.is_pure else None)
    key = CLOSED_FORM_KINDS.get(family.kind)
    if key is not None:
        out.A = closed_form_A(key, n)
        out.B_haar = closed_form_B(key, n, Ensemble.HAAR)
        out.methods.update(A=Method.CLOSED_FORM, B_haar=Method.CLOSED_FORM)
        if key in ("product", "belldimer"):
            out.B_cl = closed_form_B(key, n, Ensemble.CLIFFORD)
            out.methods["B_cl"] = Method.CLOSED_FORM

    support = family_support(family)
    if support is not None:
        if out.A is None:
            out.A = coeff_A_stabilizer(support)
            out.methods["A"] = Method.STABILIZER
        out.B_cl = coeff_B_stabilizer(support, Ensemble.CLIFFORD)
        out.methods["B_cl"] = Method.STABILIZER
        if out.B_haar is None:
            if n <= HAAR_STABILIZER_CAP:
                out.B_haar = coeff_B_stabilizer(support, Ensemble.HAAR)
                out.methods["B_haar"] = Method.STABILIZER
            else:
                out.methods["B_haar"] = Method.SKIPPED
                out.notes["B_haar"] = f"stabilizer Haar path is capped at n <= {HAAR_STABILIZER_CAP}"

    needs_state = out.A is None or out.B_cl is None or out.B_haar is None or out.overlap is None
    if needs_state:
        state = family.build()
        r_hat = pauli_coefficients(state)
        if out.overlap is None:
            out.overlap = float(r_hat @ r_hat / 2**n)
        if out.A is None:
            out.A = coeff_A(state, state)
            out.methods["A"] = Method.GENERIC
        if out.B_cl is None:
            out.B_cl = clifford_fourth_moment(r_hat * r_hat)
            out.methods["B_cl"] = Method.GENERIC
        if out.B_haar is None and out.methods.get("B_haar") != Method.SKIPPED:
            try:
                out.B_haar = coeff_B(state, state, Ensemble.HAAR, allow_large=allow_large)
                out.methods["B_haar"] = Method.GENERIC
            except SizeError as e:
                out.methods["B_haar"] = Method.SKIPPED
                out.notes["B_haar"] = e.message

    if out.B_haar is None and mc_samples:
        _fill_mc(out, family, Ensemble.HAAR, mc_samples, seed)
    try:
        _fill_C(out, family)
    except DipeError as e:
        out.methods["C"] = Method.SKIPPED
        out.notes["C"] = e.message
    logger.debug("resolved %s: %s", family.label, {k: v.value for k, v in out.methods.items()})
    return out
