# This module builds every state family the laboratory works with
# Families can be described by short strings such as "ghz:4" or "depol:plusprod:4:0.3"
import logging
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .errors import ArgumentError
from .qcore import DensityOperator, PureState, State, as_density, check_dense_cap

logger = logging.getLogger(__name__)

SQRT2 = np.sqrt(2.0)

# One-qubit Pauli eigenstates addressable by a single character
SINGLE_QUBIT_LABELS = {
    "0": np.array([1, 0], dtype=np.complex128),
    "1": np.array([0, 1], dtype=np.complex128),
    "+": np.array([1, 1], dtype=np.complex128) / SQRT2,
    "-": np.array([1, -1], dtype=np.complex128) / SQRT2,
    "r": np.array([1, 1j], dtype=np.complex128) / SQRT2,
    "l": np.array([1, -1j], dtype=np.complex128) / SQRT2,
}


class FamilyKind(str, Enum):
    PRODUCT_PLUS = "plusprod"
    PRODUCT = "product"
    GHZ = "ghz"
    W = "w"
    BELL_DIMER = "belldimer"
    HAAR = "haar"
    CHAIN = "chain"
    DEPOLARIZED = "depol"
    SCHMIDT = "schmidt"


def _bits(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    return np.stack([(idx >> (n - 1 - q)) & 1 for q in range(n)], axis=1)


# ==================== PURE FAMILIES ====================

def make_ghz(n: int) -> PureState:
    if n < 1:
        raise ArgumentError("GHZ state needs n >= 1")
    check_dense_cap(n)
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[0] = amps[-1] = 1 / SQRT2
    return PureState(amps)


def make_w(n: int) -> PureState:
    if n < 1:
        raise ArgumentError("W state needs n >= 1")
    check_dense_cap(n)
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[[1 << (n - 1 - q) for q in range(n)]] = 1 / np.sqrt(n)
    return PureState(amps)


def make_product(labels: str) -> PureState:
    if not labels or any(ch not in SINGLE_QUBIT_LABELS for ch in labels):
        raise ArgumentError(f"Product labels must be drawn from {''.join(SINGLE_QUBIT_LABELS)}, got {labels!r}")
    check_dense_cap(len(labels))
    amps = np.ones(1, dtype=np.complex128)
    for ch in labels:
        amps = np.kron(amps, SINGLE_QUBIT_LABELS[ch])
    return PureState(amps)


def make_plus_product(n: int) -> PureState:
    return make_product("+" * n)


# The odd-n filler qubit is fixed to |0> so closed-form checks stay deterministic
def make_bell_dimer(n: int) -> PureState:
    if n < 1:
        raise ArgumentError("Bell-dimer state needs n >= 1")
    check_dense_cap(n)
    bell = np.array([1, 0, 0, 1], dtype=np.complex128) / SQRT2
    amps = np.ones(1, dtype=np.complex128)
    for _ in range(n // 2):
        amps = np.kron(amps, bell)
    if n % 2:
        amps = np.kron(amps, SINGLE_QUBIT_LABELS["0"])
    return PureState(amps)


def make_chain_graph(n: int, m: int) -> PureState:
    """CZ gates on edges (j, j+1), j < m, applied to |+>^n."""
    if n < 1 or not 0 <= m <= n - 1:
        raise ArgumentError(f"Chain graph needs 0 <= m <= n-1, got n={n}, m={m}")
    check_dense_cap(n)
    bits = _bits(n)
    phase = np.zeros(2**n, dtype=np.int64)
    for j in range(m):
        phase += bits[:, j] * bits[:, j + 1]
    amps = ((-1.0) ** phase) / 2 ** (n / 2)
    return PureState(amps.astype(np.complex128))


def make_schmidt_pair(lam: float) -> PureState:
    if not 0.0 <= lam <= 1.0:
        raise ArgumentError(f"Schmidt weight must lie in [0, 1], got {lam}")
    return PureState(np.array([np.sqrt(lam), 0, 0, np.sqrt(1 - lam)], dtype=np.complex128))


# Normalized vector of independent standard complex Gaussians
def make_haar_random_pure(n: int, seed: int) -> PureState:
    check_dense_cap(n)
    rng = np.random.default_rng(seed)
    vec = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return PureState.from_amplitudes(vec)


# ==================== NOISE ====================

def depolarize_local(state: State, p: float) -> DensityOperator:
    """Apply (1-p) tau + p tr[tau] I/2 independently to every qubit."""
    if not 0.0 <= p <= 1.0:
        raise ArgumentError(f"Depolarizing strength must lie in [0, 1], got {p}")
    rho = as_density(state)
    n = rho.n
    t = rho.matrix.reshape((2,) * (2 * n))
    half_identity = np.eye(2) / 2
    for q in range(n):
        traced = np.trace(t, axis1=q, axis2=q + n)
        mixed = np.moveaxis(np.multiply.outer(traced, half_identity), [-2, -1], [q, q + n])
        t = (1 - p) * t + p * mixed
    matrix = t.reshape(2**n, 2**n)
    return DensityOperator((matrix + matrix.conj().T) / 2)


# ==================== FAMILY DESCRIPTIONS ====================

class StateFamily(BaseModel):
    kind: FamilyKind
    n: int = Field(..., ge=1, description="Qubit count")
    m: Optional[int] = Field(None, ge=0, description="Number of chain edges")
    p: Optional[float] = Field(None, ge=0.0, le=1.0, description="Local depolarizing strength")
    lam: Optional[float] = Field(None, ge=0.0, le=1.0, description="Schmidt weight")
    seed: Optional[int] = Field(None, ge=0, description="Seed of a Haar-random draw")
    labels: Optional[str] = Field(None, description="Per-qubit labels of a product state")
    base: Optional["StateFamily"] = None

    @model_validator(mode="after")
    def _check_parameters(self):
        if self.kind == FamilyKind.CHAIN and (self.m is None or self.m > self.n - 1):
            raise ValueError("chain family needs 0 <= m <= n-1")
        if self.kind == FamilyKind.DEPOLARIZED:
            if self.p is None or self.base is None:
                raise ValueError("depolarized family needs a base family and p")
            if self.base.n != self.n:
                raise ValueError("depolarized family must match the base qubit count")
        if self.kind == FamilyKind.SCHMIDT and (self.lam is None or self.n != 2):
            raise ValueError("schmidt family needs lam and n = 2")
        if self.kind == FamilyKind.PRODUCT and (not self.labels or len(self.labels) != self.n):
            raise ValueError("product family needs one label per qubit")
        return self

    @property
    def label(self) -> str:
        k = self.kind
        if k == FamilyKind.CHAIN:
            return f"chain:{self.n}:{self.m}"
        if k == FamilyKind.DEPOLARIZED:
            return f"depol:{self.base.label}:{self.p:g}"
        if k == FamilyKind.SCHMIDT:
            return f"schmidt:{self.lam:g}"
        if k == FamilyKind.PRODUCT:
            return f"product:{self.labels}"
        if k == FamilyKind.HAAR:
            return f"haar:{self.n}:{self.seed or 0}"
        return f"{k.value}:{self.n}"

    @property
    def is_pure(self) -> bool:
        return self.kind != FamilyKind.DEPOLARIZED or self.p == 0

    def pure_state(self) -> PureState:
        k = self.kind
        if k == FamilyKind.PRODUCT_PLUS:
            return make_plus_product(self.n)
        if k == FamilyKind.PRODUCT:
            return make_product(self.labels)
        if k == FamilyKind.GHZ:
            return make_ghz(self.n)
        if k == FamilyKind.W:
            return make_w(self.n)
        if k == FamilyKind.BELL_DIMER:
            return make_bell_dimer(self.n)
        if k == FamilyKind.HAAR:
            return make_haar_random_pure(self.n, self.seed or 0)
        if k == FamilyKind.CHAIN:
            return make_chain_graph(self.n, self.m)
        if k == FamilyKind.SCHMIDT:
            return make_schmidt_pair(self.lam)
        if k == FamilyKind.DEPOLARIZED and self.p == 0:
            return self.base.pure_state()
        raise ArgumentError(f"Family {self.label} is not pure")

    def build(self) -> State:
        if self.kind == FamilyKind.DEPOLARIZED:
            return depolarize_local(self.base.build(), self.p)
        return self.pure_state()

    def product_factors(self) -> Optional[List[State]]:
        """Single-qubit factors when the family is a product state, else None."""
        k = self.kind
        if k == FamilyKind.PRODUCT_PLUS:
            return [PureState(SINGLE_QUBIT_LABELS["+"])] * self.n
        if k == FamilyKind.PRODUCT:
            return [PureState(SINGLE_QUBIT_LABELS[ch]) for ch in self.labels]
        if k == FamilyKind.CHAIN and self.m == 0:
            return [PureState(SINGLE_QUBIT_LABELS["+"])] * self.n
        if k == FamilyKind.BELL_DIMER and self.n == 1:
            return [PureState(SINGLE_QUBIT_LABELS["0"])]
        if k in (FamilyKind.GHZ, FamilyKind.W) and self.n == 1:
            return [self.pure_state()]
        if k == FamilyKind.SCHMIDT and self.lam in (0.0, 1.0):
            ch = "0" if self.lam == 1.0 else "1"
            return [PureState(SINGLE_QUBIT_LABELS[ch])] * 2
        if k == FamilyKind.DEPOLARIZED:
            base = self.base.product_factors()
            if base is not None:
                return [depolarize_local(f, self.p) for f in base]
        return None


StateFamily.model_rebuild()


def _parse_int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ArgumentError(f"Expected an integer for {what}, got {text!r}") from None


def _parse_float(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ArgumentError(f"Expected a number for {what}, got {text!r}") from None


# This parses family strings; n fills in the qubit count when the string omits it
def parse_family(text: str, n: Optional[int] = None) -> StateFamily:
    parts = [p.strip() for p in text.strip().split(":")]
    try:
        kind = FamilyKind(parts[0].lower())
    except ValueError:
        known = ", ".join(k.value for k in FamilyKind)
        raise ArgumentError(f"Unknown state family {parts[0]!r} (known: {known})") from None
    args = parts[1:]
    try:
        if kind == FamilyKind.DEPOLARIZED:
            if len(args) < 2:
                raise ArgumentError("depol family needs a base family and p, e.g. depol:plusprod:4:0.3")
            base = parse_family(":".join(args[:-1]), n)
            return StateFamily(kind=kind, n=base.n, p=_parse_float(args[-1], "p"), base=base)
        if kind == FamilyKind.SCHMIDT:
            if len(args) != 1:
                raise ArgumentError("schmidt family takes exactly one weight, e.g. schmidt:0.25")
            return StateFamily(kind=kind, n=2, lam=_parse_float(args[0], "lambda"))
        if kind == FamilyKind.PRODUCT:
            if len(args) != 1:
                raise ArgumentError("product family takes one label string, e.g. product:0+r")
            return StateFamily(kind=kind, n=len(args[0]), labels=args[0])
        if kind == FamilyKind.CHAIN:
            if len(args) == 1 and n is not None:
                return StateFamily(kind=kind, n=n, m=_parse_int(args[0], "m"))
            if len(args) != 2:
                raise ArgumentError("chain family needs n and m, e.g. chain:5:3")
            return StateFamily(kind=kind, n=_parse_int(args[0], "n"), m=_parse_int(args[1], "m"))
        if kind == FamilyKind.HAAR:
            if not args and n is not None:
                return StateFamily(kind=kind, n=n, seed=0)
            if len(args) not in (1, 2):
                raise ArgumentError("haar family takes n and an optional seed, e.g. haar:3:7")
            seed = _parse_int(args[1], "seed") if len(args) == 2 else 0
            return StateFamily(kind=kind, n=_parse_int(args[0], "n"), seed=seed)
        if not args:
            if n is None:
                raise ArgumentError(f"Family {kind.value} needs a qubit count, e.g. {kind.value}:4")
            return StateFamily(kind=kind, n=n)
        if len(args) != 1:
            raise ArgumentError(f"Family {kind.value} takes a single qubit count")
        return StateFamily(kind=kind, n=_parse_int(args[0], "n"))
    except ArgumentError:
        raise
    except ValueError as e:
        raise ArgumentError(f"Invalid family {text!r}: {e}") from None


def build_family(text: str, n: Optional[int] = None) -> State:
    return parse_family(text, n).build()
