# This module runs the named verification suites behind `dipelab verify`
# Each suite returns a report of individual checks instead of raising on the first failure
import logging
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from .errors import ArgumentError, VerificationError
from .kernels import (
    Kernel,
    hamming_symmetrize,
    is_unbiased,
    swap_sector_coefficients_exact,
    unbiased_perturbation,
    unique_kernel,
    unique_kernel_profile,
    worst_single_shot_variance,
)
from .moments import (
    Ensemble,
    build_r4_clifford,
    build_r4_haar,
    build_shadow_operators,
    build_third_moment_operators,
    coeff_A,
    coeff_B,
    coeff_B_stabilizer,
    coeff_C,
    enumerate_stabilizer_states,
    family_certificate,
    r4_haar_from_sphere_moments,
    sampled_fourth_moment,
    schmidt_polynomials,
    snapshot_overlap_table,
    stabilizer_pure_state,
    verify_twirl_identity,
)
from .moments.closed_forms import CLOSED_FORM_FAMILIES
from .planner import PlanRequest, Regime, sufficient_copies
from .protocol import (
    EnsembleKind,
    RunConfig,
    empirical_variance_decomposition,
    repeat_pauli_shadow,
    run_shared_lrm,
    sample_variance_se,
    shadow_exact_variance,
)
from .states import make_bell_dimer, make_haar_random_pure, make_plus_product, make_product, make_schmidt_pair

logger = logging.getLogger(__name__)


class Suite(str, Enum):
    KERNEL = "kernel"
    OPERATORS = "operators"
    TWIRL = "twirl"
    BOUNDS = "bounds"
    CERTIFICATE = "certificate"
    SHADOW = "shadow"
    VARIANCE = "variance"
    PLANNER = "planner"


class CheckResult(BaseModel):
    name: str
    passed: bool
    value: Optional[float] = None
    expected: Optional[float] = None
    detail: str = ""


class SuiteReport(BaseModel):
    suite: Suite
    passed: bool = True
    checks: List[CheckResult] = Field(default_factory=list)

    def add(self, name: str, passed: bool, value=None, expected=None, detail: str = "") -> None:
        passed = bool(passed)
        self.checks.append(
            CheckResult(
                name=name,
                passed=passed,
                value=None if value is None else float(value),
                expected=None if expected is None else float(expected),
                detail=detail,
            )
        )
        self.passed = self.passed and passed
        if not passed:
            logger.warning("check failed: %s/%s value=%s expected=%s %s", self.suite.value, name, value, expected, detail)

    def close(self, name: str, value: float, expected: float, tol: float) -> None:
        self.add(name, abs(value - expected) <= tol, value, expected, f"tol={tol:g}")


class VerifyOptions(BaseModel):
    n: Optional[int] = Field(None, ge=1)
    nmax: int = Field(10, ge=1, le=40)
    samples: Optional[int] = Field(None, ge=1)
    seed: int = Field(0, ge=0)
    families: Sequence[str] = ("all",)


# ==================== SUITES ====================

def _kernel_suite(opts: VerifyOptions, report: SuiteReport) -> None:
    n_top = opts.n or 8
    for n in range(1, n_top + 1):
        sectors = swap_sector_coefficients_exact([int(v) for v in unique_kernel_profile(n)])
        report.add(f"sectors n={n}", sectors == [0] * n + [1], detail=str([str(s) for s in sectors]))
    for n in (1, 2):
        for ensemble in ("clifford", "haar"):
            report.add(f"averaged omega is the swap, {ensemble} n={n}", is_unbiased(unique_kernel(n), ensemble))
    for n in (1, 2, 3):
        table = Kernel(n=n, table=unique_kernel(n).to_table())
        profile = hamming_symmetrize(table).profile
        report.close(f"symmetrize fixes the unique kernel n={n}", float(np.max(np.abs(profile - unique_kernel_profile(n)))), 0.0, 1e-12)
    constant = Kernel(n=2, profile=np.ones(3))
    report.add("constant kernel is biased", not is_unbiased(constant, "haar"))
    stabilizers = [stabilizer_pure_state(s) for s in enumerate_stabilizer_states(2)]
    perturbed = unbiased_perturbation(2, "clifford", np.random.default_rng(opts.seed))
    report.add("perturbed kernel stays unbiased", is_unbiased(perturbed, "clifford", atol=1e-9))
    before = worst_single_shot_variance(perturbed, stabilizers, "clifford")
    after = worst_single_shot_variance(hamming_symmetrize(perturbed), stabilizers, "clifford")
    report.add("symmetrization does not raise the worst variance n=2", after <= before + 1e-9, after, before)


def _operators_suite(opts: VerifyOptions, report: SuiteReport) -> None:
    r_cl, r_h = build_r4_clifford(), build_r4_haar()
    report.close("trace R4 clifford", r_cl.trace(), 4.0, 1e-12)
    report.close("trace R4 haar", r_h.trace(), 4.0, 1e-12)
    expected = np.array([-2, -2, 0, 0, 1.5, 1.5, 1.5, 1.5])
    for op in build_third_moment_operators():
        report.close(f"spectrum {op.label.value}", float(np.max(np.abs(op.spectrum() - expected))), 0.0, 1e-9)
    plus = np.array([1, 1]) / np.sqrt(2)
    report.close("R4 clifford on |+>^4", r_cl.on_product([plus] * 4), 1.5, 1e-12)
    report.close("R4 haar on |+>^4", r_h.on_product([plus] * 4), 1.2, 1e-12)
    directions = np.vstack([np.eye(3), -np.eye(3)])
    report.close(
        "R4 clifford equals the signed Pauli average",
        float(np.max(np.abs(sampled_fourth_moment(directions) - r_cl.matrix))),
        0.0,
        1e-12,
    )
    report.close(
        "R4 haar equals the isotropic moment form",
        float(np.max(np.abs(r4_haar_from_sphere_moments() - r_h.matrix))),
        0.0,
        1e-12,
    )


def _twirl_suite(opts: VerifyOptions, report: SuiteReport) -> None:
    samples = opts.samples or 1_000_000
    tol = max(5e-3, 5.0 / np.sqrt(samples))
    deviation = verify_twirl_identity(samples, opts.seed)
    report.add("haar twirl of R4 clifford", deviation <= tol, deviation, 0.0, f"samples={samples} tol={tol:.3g}")
    report.close("traces agree", build_r4_clifford().trace() - build_r4_haar().trace(), 0.0, 1e-12)


def _bounds_suite(opts: VerifyOptions, report: SuiteReport) -> None:
    n = opts.n or 2
    if n <= 3:
        supports = enumerate_stabilizer_states(n)
        values = np.array([coeff_B_stabilizer(s, Ensemble.CLIFFORD) for s in supports])
        top = 1.5**n
        products = np.array([s.is_product() for s in supports])
        report.add(f"{len(supports)} stabilizer states below (3/2)^n", bool(np.all(values <= top + 1e-12)), values.max(), top)
        at_max = np.isclose(values, top, rtol=0.0, atol=1e-12)
        report.add("maximum attained exactly on product states", bool(np.array_equal(at_max, products)), int(at_max.sum()), int(products.sum()))
    rng = np.random.default_rng(opts.seed)
    count = opts.samples or 500
    for k in range(1, min(opts.n or 3, 3) + 1):
        worst = {Ensemble.CLIFFORD: 0.0, Ensemble.HAAR: 0.0}
        # B(psi, phi) - max(B(psi, psi), B(phi, phi)), checked at k <= 2
        reduction_gap = {Ensemble.CLIFFORD: -np.inf, Ensemble.HAAR: -np.inf}
        worst_c = -np.inf
        for _ in range(count):
            psi = make_haar_random_pure(k, int(rng.integers(2**31)))
            phi = make_haar_random_pure(k, int(rng.integers(2**31)))
            worst_c = max(worst_c, coeff_C(psi, phi))
            for ensemble in worst:
                cross, own_psi = coeff_B(psi, phi, ensemble), coeff_B(psi, psi, ensemble)
                worst[ensemble] = max(worst[ensemble], cross, own_psi)
                if k <= 2:
                    own_phi = coeff_B(phi, phi, ensemble)
                    reduction_gap[ensemble] = max(reduction_gap[ensemble], cross - max(own_psi, own_phi))
        for ensemble, value in worst.items():
            report.add(f"random pairs n={k} {ensemble.value} below (3/2)^n", value <= 1.5**k + 1e-9, value, 1.5**k)
            if k <= 2:
                gap = reduction_gap[ensemble]
                report.add(f"random pairs n={k} {ensemble.value} below the identical-pure maximum", gap <= 1e-9, gap, 0.0)
        report.add(f"random pairs n={k} C below 2 (7/4)^n", worst_c <= 2 * 1.75**k + 1e-9, worst_c, 2 * 1.75**k)


def _certificate_suite(opts: VerifyOptions, report: SuiteReport) -> None:
    families = list(opts.families)
    if not families or "all" in families:
        families = ["ghz", "w", "belldimer", "product"]
    for family in families:
        if family not in CLOSED_FORM_FAMILIES:
            raise ArgumentError(f"No certificate for family {family!r}")
        for n in range(1, opts.nmax + 1):
            cert = family_certificate(family, n)
            report.add(f"{family} n={n}", cert.passed, cert.product, cert.bound)
            if family in ("product", "plusprod"):
                report.close(f"{family} n={n} equality", cert.ratio, 1.0, 1e-12)
    grid = np.linspace(0.0, 1.0, 21)
    values = []
    for lam in grid:
        poly = schmidt_polynomials(lam * (1 - lam))
        psi = make_schmidt_pair(float(lam))
        values.append(poly["AB"])
        report.close(f"schmidt B lambda={lam:.2f}", coeff_B(psi, psi, Ensemble.HAAR), poly["B_haar"], 1e-9)
        report.close(f"schmidt cubic lambda={lam:.2f}", coeff_A(psi, psi) * coeff_B(psi, psi, Ensemble.HAAR), poly["AB"], 1e-9)
    report.close("schmidt maximum at t=0", max(values), 324 / 25, 1e-12)


def _shadow_suite(opts: VerifyOptions, report: SuiteReport) -> None:
    omega2, omega3 = build_shadow_operators()
    report.close("omega2 spectrum", float(np.max(np.abs(omega2.spectrum() - [5.5, 7.5, 7.5, 7.5]))), 0.0, 1e-9)
    report.close(
        "omega3 spectrum",
        float(np.max(np.abs(omega3.spectrum() - [-2, -2, 0, 0, 1.5, 1.5, 1.5, 1.5]))),
        0.0,
        1e-9,
    )
    overlaps = set(np.round(snapshot_overlap_table(), 12).ravel().tolist())
    report.add("snapshot overlaps in {5, -4, 1/2}", overlaps <= {5.0, -4.0, 0.5}, detail=str(sorted(overlaps)))
    zero = make_product("0")
    repetitions = opts.samples or 20_000
    record = repeat_pauli_shadow(zero, zero, 64, repetitions, opts.seed)
    values = np.asarray(record.block_values)
    exact = shadow_exact_variance(zero, zero, 64)
    v_hat = float(values.var(ddof=1))
    se = sample_variance_se(values)
    z = (v_hat - exact) / se
    report.add("shadow variance at n=1, N=64", abs(z) <= 3, v_hat, exact, f"z={z:.2f}")
    mean_z = (record.estimate - 1.0) / record.standard_error
    report.add("shadow estimator is unbiased", abs(mean_z) <= 5, record.estimate, 1.0, f"z={mean_z:.2f}")


def _variance_suite(opts: VerifyOptions, report: SuiteReport) -> None:
    blocks = opts.samples or 20_000
    plus = make_plus_product(1)
    bell = make_bell_dimer(2)
    configs = [
        ("|+> clifford N_M=2", plus, EnsembleKind.CLIFFORD, 2),
        ("bell haar N_M=3", bell, EnsembleKind.HAAR, 3),
        ("bell clifford N_M=1", bell, EnsembleKind.CLIFFORD, 1),
    ]
    for k, (name, state, ensemble, n_m) in enumerate(configs):
        result = empirical_variance_decomposition(state, state, ensemble, n_m, blocks, opts.seed + k)
        report.add(f"{name} variance", abs(result.z_score) <= 3, result.V_hat, result.exact_total, f"z={result.z_score:.2f}")
        report.add(f"{name} mean", abs(result.mean_z_score) <= 5, result.mean, result.overlap, f"z={result.mean_z_score:.2f}")


def _planner_suite(opts: VerifyOptions, report: SuiteReport) -> None:
    eps = delta = 0.2
    plan = sufficient_copies(PlanRequest(n=2, epsilon=eps, delta=delta, regime=Regime.CLIFFORD))
    report.close("clifford n=2 continuous N_M", plan.continuous_N_M, 2.0, 1e-12)
    bell = make_bell_dimer(2)
    repetitions = opts.samples or 200
    hits = 0
    for r in range(repetitions):
        config = RunConfig(n=2, N_U=plan.N_U_star, N_M=plan.N_M_star, seed=opts.seed + r)
        hits += abs(run_shared_lrm(bell, bell, config).estimate - 1.0) <= eps
    rate = hits / repetitions
    report.add(
        "bell n=2 within eps at the planned budget",
        rate >= 1 - delta,
        rate,
        1 - delta,
        f"N_M={plan.N_M_star} N_U={plan.N_U_star} repetitions={repetitions}",
    )


_SUITES: Dict[Suite, Callable[[VerifyOptions, SuiteReport], None]] = {
    Suite.KERNEL: _kernel_suite,
    Suite.OPERATORS: _operators_suite,
    Suite.TWIRL: _twirl_suite,
    Suite.BOUNDS: _bounds_suite,
    Suite.CERTIFICATE: _certificate_suite,
    Suite.SHADOW: _shadow_suite,
    Suite.VARIANCE: _variance_suite,
    Suite.PLANNER: _planner_suite,
}


def run_suite(suite: str, options: Optional[VerifyOptions] = None, strict: bool = False) -> SuiteReport:
    try:
        suite = Suite(str(getattr(suite, "value", suite)).lower())
    except ValueError:
        raise ArgumentError(f"Unknown suite {suite!r} (known: {', '.join(s.value for s in Suite)})") from None
    report = SuiteReport(suite=suite)
    _SUITES[suite](options or VerifyOptions(), report)
    logger.info("suite %s: %d checks, passed=%s", suite.value, len(report.checks), report.passed)
    if strict and not report.passed:
        failed = [c.name for c in report.checks if not c.passed]
        raise VerificationError(f"Suite {suite.value} failed", failed)
    return report
