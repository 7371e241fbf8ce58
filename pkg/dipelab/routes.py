# This module exposes the laboratory operations over HTTP
# Each endpoint mirrors one CLI subcommand and answers with the standard envelope
import logging
from typing import Optional

from fastapi import APIRouter, Query
from pydantic import BaseModel, Field

from .catalog import resolve_coefficients
from .errors import DipeError
from .moments import Ensemble
from .planner import PlanRequest, scaling_table, sufficient_copies
from .protocol import EnsembleKind
from .simulate import simulate
from .states import parse_family
from .utils import bad, bad_request, ok
from .verify import VerifyOptions, run_suite

logger = logging.getLogger(__name__)

router = APIRouter()


# This defines the body of a simulation request
# Families are given as strings, e.g. "ghz:3" or "depol:plusprod:2:0.3"
class SimulateRequest(BaseModel):
    rho: str = Field(..., description="Family string of Alice's state")
    sigma: str = Field(..., description="Family string of Bob's state")
    ensemble: EnsembleKind = Field(EnsembleKind.CLIFFORD, description="clifford, haar or shadow")
    N_U: int = Field(1000, ge=1, le=1_000_000, description="Unitary blocks (shadow: repetitions)")
    N_M: int = Field(1, ge=1, le=100_000, description="Shots per block (shadow: copies per party)")
    seed: int = Field(0, ge=0)
    outcome_noise: float = Field(0.0, ge=0.0, le=1.0)
    include_blocks: bool = Field(False, description="Return every block value")


# This endpoint resolves the variance coefficients of an identical pair of family states
@router.get("/coeffs", tags=["Coefficients"])
def get_coefficients(
    family: str = Query(..., description="Family string, e.g. ghz:3"),
    ensemble: Optional[Ensemble] = Query(None, description="Restrict B to one ensemble"),
    allow_large: bool = Query(False, description="Run the generic Haar contraction past its default cap"),
):
    try:
        parsed = parse_family(family)
        coeffs = resolve_coefficients(parsed, allow_large=allow_large)
        data = coeffs.model_dump(mode="json")
        if ensemble is not None:
            data.pop("B_haar" if ensemble == Ensemble.CLIFFORD else "B_cl")
        return ok("Coefficients resolved", {"family": parsed.label, **data})
    except DipeError as e:
        return bad_request(e)


# This endpoint computes the Chebyshev copy budget for one request
@router.post("/plan", tags=["Planner"])
def create_plan(body: PlanRequest):
    try:
        return ok("Plan computed", sufficient_copies(body).model_dump(mode="json"))
    except DipeError as e:
        return bad_request(e)


# This endpoint returns the worst-case scaling table with budgets for n = 1..nmax
@router.get("/plan/table", tags=["Planner"])
def get_plan_table(
    eps: float = Query(0.1, gt=0.0, lt=1.0),
    delta: float = Query(0.1, gt=0.0, lt=1.0),
    nmax: int = Query(10, ge=1, le=40),
):
    rows = scaling_table(eps, delta, range(1, nmax + 1))
    return ok("Scaling table", [row.model_dump(mode="json") for row in rows])


# This endpoint runs one protocol simulation and its variance comparison
@router.post("/simulate", tags=["Simulation"])
def run_simulation(body: SimulateRequest):
    try:
        result = simulate(
            body.rho,
            body.sigma,
            ensemble=body.ensemble,
            N_U=body.N_U,
            N_M=body.N_M,
            seed=body.seed,
            outcome_noise=body.outcome_noise,
        )
    except DipeError as e:
        return bad_request(e)
    except ValueError as e:
        return bad(400, "VALIDATION_ERROR", str(e))
    data = result.model_dump(mode="json")
    if not body.include_blocks:
        data["record"].pop("block_values")
    return ok("Simulation finished", data)


# This endpoint runs a verification suite; a failing suite still answers 200 with passed=false
@router.get("/verify/{suite}", tags=["Verification"])
def verify_suite(
    suite: str,
    n: Optional[int] = Query(None, ge=1),
    nmax: int = Query(10, ge=1, le=40),
    samples: Optional[int] = Query(None, ge=1),
    seed: int = Query(0, ge=0),
):
    try:
        report = run_suite(suite, VerifyOptions(n=n, nmax=nmax, samples=samples, seed=seed))
    except DipeError as e:
        return bad_request(e)
    message = "Suite passed" if report.passed else "Suite failed"
    return ok(message, report.model_dump(mode="json"))
