# This module produces the benchmark sweeps: coefficient rows per (family, n, ensemble)
# Rows are computed independently and emitted in sorted order so output never depends on scheduling
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from .catalog import resolve_coefficients
from .config import get_settings
from .errors import ArgumentError, DipeError
from .moments import Ensemble, Method, MomentCoefficients
from .states import FamilyKind, StateFamily, parse_family

logger = logging.getLogger(__name__)

DEFAULT_FAMILIES = ("plusprod", "ghz", "w", "belldimer", "haar")
RIGIDITY_TOL = 1e-9


class Sweep(str, Enum):
    FAMILIES = "families"
    PURITY = "purity"
    CHAIN = "chain"


class BenchRow(BaseModel):
    family: str
    n: int
    ensemble: Ensemble
    A: Optional[float] = None
    C: Optional[float] = None
    B: Optional[float] = None
    log10B: Optional[float] = None
    method: Optional[Method] = None
    A_method: Optional[Method] = None
    C_method: Optional[Method] = None
    seed: Optional[int] = None
    samples: Optional[int] = None
    status: str = "ok"
    reason: str = ""

    def sort_key(self) -> Tuple:
        return (self.family.split(":")[0], self.n, self.family, self.ensemble.value)


class BenchResult(BaseModel):
    sweep: Sweep
    rows: List[BenchRow] = Field(default_factory=list)
    rigid: Dict[int, bool] = Field(default_factory=dict)


# ==================== PARSING ====================

def parse_n_range(text: str) -> List[int]:
    """"a:b" (inclusive) or a single integer."""
    try:
        if ":" in text:
            low, high = (int(p) for p in text.split(":", 1))
        else:
            low = high = int(text)
    except ValueError:
        raise ArgumentError(f"Invalid n range {text!r}; expected a:b") from None
    if low < 1 or high < low:
        raise ArgumentError(f"Invalid n range {text!r}; need 1 <= a <= b")
    return list(range(low, high + 1))


def parse_grid(text: str) -> List[float]:
    """"start:stop:count" evenly spaced, inclusive of both ends."""
    try:
        start, stop, count = text.split(":")
        grid = np.linspace(float(start), float(stop), int(count))
    except ValueError:
        raise ArgumentError(f"Invalid grid {text!r}; expected start:stop:count") from None
    if grid.size < 1:
        raise ArgumentError("Grid needs at least one point")
    return [round(float(p), 12) for p in grid]


# ==================== ROWS ====================

def _rows_from_coefficients(
    label: str, coeffs: MomentCoefficients, ensembles: Sequence[Ensemble], seed: int, mc_samples: Optional[int]
) -> List[BenchRow]:
    rows = []
    for ensemble in ensembles:
        field = "B_cl" if ensemble == Ensemble.CLIFFORD else "B_haar"
        b = getattr(coeffs, field)
        method = coeffs.methods.get(field)
        row = BenchRow(
            family=label,
            n=coeffs.n,
            ensemble=ensemble,
            A=coeffs.A,
            C=coeffs.C,
            B=b,
            log10B=math.log10(b) if b is not None and b > 0 else None,
            method=method,
            A_method=coeffs.methods.get("A"),
            C_method=coeffs.methods.get("C"),
        )
        if method == Method.MC:
            row.seed = seed
            row.samples = mc_samples
        if b is None:
            row.status = "skipped"
            row.reason = coeffs.notes.get(field, "no applicable path")
        rows.append(row)
    return rows


def bench_point(
    family: StateFamily,
    ensembles: Sequence[Ensemble],
    allow_large: bool = False,
    mc_samples: Optional[int] = None,
    seed: int = 0,
) -> List[BenchRow]:
    try:
        coeffs = resolve_coefficients(family, allow_large=allow_large, mc_samples=mc_samples, seed=seed)
    except DipeError as e:
        logger.info("skipping %s: %s", family.label, e.message)
        return [BenchRow(family=family.label, n=family.n, ensemble=ens, status="skipped", reason=e.message) for ens in ensembles]
    return _rows_from_coefficients(family.label, coeffs, ensembles, seed, mc_samples)


# This expands family strings over n; strings that fix their own n appear once
def expand_families(texts: Sequence[str], n_values: Sequence[int]) -> List[StateFamily]:
    out = []
    for text in texts:
        for n in n_values:
            family = parse_family(text, n)
            if family not in out:
                out.append(family)
    return out


def _points(sweep: Sweep, families: Sequence[str], n_values: Sequence[int], p_grid: Sequence[float]) -> List[StateFamily]:
    if sweep == Sweep.FAMILIES:
        return expand_families(families, n_values)
    if sweep == Sweep.PURITY:
        return [parse_family(f"depol:plusprod:{n}:{p}") for n in n_values for p in p_grid]
    return [StateFamily(kind=FamilyKind.CHAIN, n=n, m=m) for n in n_values for m in range(n)]


def chain_rigidity(rows: Sequence[BenchRow]) -> Dict[int, bool]:
    """Whether the Clifford B is constant in the edge count m at each n."""
    by_n: Dict[int, List[float]] = {}
    for row in rows:
        if row.ensemble == Ensemble.CLIFFORD and row.B is not None:
            by_n.setdefault(row.n, []).append(row.B)
    rigid = {}
    for n, values in sorted(by_n.items()):
        rigid[n] = bool(max(values) - min(values) <= RIGIDITY_TOL)
        if not rigid[n]:
            message = f"Clifford B varies with the chain edge count at n={n}: {min(values):.6g}..{max(values):.6g}"
            warnings.warn(message, RuntimeWarning, stacklevel=2)
            logger.warning(message)
    return rigid


def run_bench(
    sweep: Sweep = Sweep.FAMILIES,
    families: Sequence[str] = DEFAULT_FAMILIES,
    n_values: Sequence[int] = (1, 2, 3),
    ensembles: Sequence[Ensemble] = (Ensemble.CLIFFORD, Ensemble.HAAR),
    p_grid: Sequence[float] = (0.0, 0.5, 1.0),
    allow_large: bool = False,
    mc_samples: Optional[int] = None,
    seed: int = 0,
    workers: Optional[int] = None,
) -> BenchResult:
    sweep = Sweep(sweep)
    ensembles = [Ensemble(e) for e in ensembles]
    points = _points(sweep, families, n_values, p_grid)
    workers = workers or get_settings().workers

    def run(family: StateFamily) -> List[BenchRow]:
        return bench_point(family, ensembles, allow_large, mc_samples, seed)

    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, points))
    else:
        chunks = [run(p) for p in points]
    rows = sorted((row for chunk in chunks for row in chunk), key=BenchRow.sort_key)
    result = BenchResult(sweep=sweep, rows=rows)
    if sweep == Sweep.CHAIN:
        result.rigid = chain_rigidity(rows)
    logger.info("bench %s: %d rows (%d skipped)", sweep.value, len(rows), sum(r.status != "ok" for r in rows))
    return result
