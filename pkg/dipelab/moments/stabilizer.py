# This module evaluates fourth moments of stabilizer states directly on their stabilizer groups
# For rho = sigma = |S><S| the Pauli weights are +-1 on the 2^n group elements and 0 elsewhere
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..config import get_settings
from ..errors import ArgumentError, SizeError, VerificationError
from ..qcore import PAULI_LABELS, PureState, State, check_dense_cap, pauli_coefficients
from ..qcore.paulis import _PRODUCT_LETTER, PauliString
from .coefficients import KAPPA, Ensemble, clifford_fourth_moment, coeff_B
from .operators import ReplicaLabel, replica_operator

logger = logging.getLogger(__name__)

ENUMERATION_CAP = 3
HAAR_STABILIZER_CAP = 6
PAIR_CHUNK = 1 << 20

# Label -> (letter, sign) of the single-qubit stabilizer generator
_LABEL_GENERATORS = {"0": ("Z", 1), "1": ("Z", -1), "+": ("X", 1), "-": ("X", -1), "r": ("Y", 1), "l": ("Y", -1)}


@dataclass(frozen=True)
class StabilizerSupport:
    """The 2^n signed Pauli strings stabilizing an n-qubit stabilizer state."""

    n: int
    generators: Tuple[PauliString, ...]
    elements: Tuple[PauliString, ...]

    @classmethod
    def from_generators(cls, generators: Sequence[PauliString]) -> "StabilizerSupport":
        generators = tuple(generators)
        if not generators:
            raise ArgumentError("A stabilizer group needs at least one generator")
        n = generators[0].n
        if len(generators) != n or any(g.n != n for g in generators):
            raise ArgumentError(f"Expected {n} generators on {n} qubits")
        for a, b in itertools.combinations(generators, 2):
            if not a.commutes_with(b):
                raise ArgumentError(f"Generators {a} and {b} anticommute")
        elements = [PauliString("I" * n)]
        for g in generators:
            elements += [e * g for e in elements]
        if len({e.letters for e in elements}) != 2**n:
            raise ArgumentError("Generators are not independent")
        return cls(n=n, generators=generators, elements=tuple(elements))

    def letters_array(self) -> np.ndarray:
        return np.array([e.codes for e in self.elements], dtype=np.int64)

    def signs(self) -> np.ndarray:
        return np.array([e.sign for e in self.elements], dtype=float)

    def sign_lookup(self) -> Dict[int, int]:
        return {e.index: e.sign for e in self.elements}

    def is_product(self) -> bool:
        # product iff every qubit carries a weight-one element
        covered = set()
        for e in self.elements:
            support = [q for q, ch in enumerate(e.letters) if ch != "I"]
            if len(support) == 1:
                covered.add(support[0])
        return len(covered) == self.n

    def pauli_weights(self) -> np.ndarray:
        """Dense 4^n vector of tr[rho P]; only for n within the dense cap."""
        check_dense_cap(self.n)
        out = np.zeros(4**self.n)
        for e in self.elements:
            out[e.index] = e.sign
        return out

    def density(self) -> np.ndarray:
        check_dense_cap(self.n)
        return sum(e.matrix() for e in self.elements) / 2**self.n


# ==================== CONSTRUCTORS ====================

def support_from_generators(texts: Sequence[str]) -> StabilizerSupport:
    return StabilizerSupport.from_generators([PauliString.parse(t) for t in texts])


def product_stabilizer_support(labels: str) -> StabilizerSupport:
    n = len(labels)
    gens = []
    for q, ch in enumerate(labels):
        if ch not in _LABEL_GENERATORS:
            raise ArgumentError(f"Unknown single-qubit label {ch!r}")
        letter, sign = _LABEL_GENERATORS[ch]
        gens.append(PauliString("I" * q + letter + "I" * (n - q - 1), sign))
    return StabilizerSupport.from_generators(gens)


def chain_graph_support(n: int, m: int) -> StabilizerSupport:
    """K_j = X_j prod_{k ~ j} Z_k for the chain with edges (j, j+1), j < m."""
    if n < 1 or not 0 <= m <= n - 1:
        raise ArgumentError(f"Chain graph needs 0 <= m <= n-1, got n={n}, m={m}")
    gens = []
    for j in range(n):
        letters = ["I"] * n
        letters[j] = "X"
        if j >= 1 and j - 1 < m:
            letters[j - 1] = "Z"
        if j + 1 < n and j < m:
            letters[j + 1] = "Z"
        gens.append(PauliString("".join(letters)))
    return StabilizerSupport.from_generators(gens)


def stabilizer_support_from_state(state: State, atol: float = 1e-9) -> StabilizerSupport:
    """Recover the group from the Pauli spectrum; fails for non-stabilizer states."""
    coeffs = pauli_coefficients(state)
    n = state.n
    hits = np.flatnonzero(np.abs(np.abs(coeffs) - 1.0) < atol)
    if hits.size != 2**n:
        raise ArgumentError(f"State is not a stabilizer state ({hits.size} unit Pauli weights, expected {2**n})")
    elements = tuple(PauliString.from_index(int(k), n, int(np.sign(coeffs[k]))) for k in hits)
    # pick n independent generators greedily
    gens: List[PauliString] = []
    span = {"I" * n}
    for e in elements:
        if e.letters in span:
            continue
        gens.append(e)
        span |= {_strip_sign_product(s, e.letters) for s in span}
        if len(gens) == n:
            break
    support = StabilizerSupport.from_generators(gens)
    if sorted(e.index for e in support.elements) != sorted(int(k) for k in hits):
        raise VerificationError("Recovered stabilizer group does not match the Pauli spectrum")
    return support


def _strip_sign_product(a: str, b: str) -> str:
    return "".join(PAULI_LABELS[_PRODUCT_LETTER[PAULI_LABELS.index(x), PAULI_LABELS.index(y)]] for x, y in zip(a, b))


# ==================== ENUMERATION ====================

def _symplectic_to_letters(mask: int, n: int) -> str:
    x, z = mask >> n, mask & ((1 << n) - 1)
    out = []
    for q in range(n):
        bit = 1 << (n - 1 - q)
        out.append("IZXY"[((x & bit) > 0) * 2 + ((z & bit) > 0)])
    return "".join(out)


def _symplectic_commute(a: int, b: int, n: int) -> bool:
    low = (1 << n) - 1
    return bin(((a >> n) & (b & low)) ^ ((a & low) & (b >> n))).count("1") % 2 == 0


def _span(masks: Sequence[int]) -> frozenset:
    out = {0}
    for g in masks:
        out |= {e ^ g for e in out}
    return frozenset(out)


def enumerate_stabilizer_states(n: int) -> List[StabilizerSupport]:
    """Every n-qubit stabilizer state (6, 60 and 1080 of them for n = 1, 2, 3)."""
    if not 1 <= n <= ENUMERATION_CAP:
        raise SizeError(f"Stabilizer enumeration is capped at n <= {ENUMERATION_CAP}")
    masks = range(1, 4**n)
    groups = {}
    for combo in itertools.combinations(masks, n):
        if not all(_symplectic_commute(a, b, n) for a, b in itertools.combinations(combo, 2)):
            continue
        span = _span(combo)
        if len(span) == 2**n and span not in groups:
            groups[span] = combo
    out = []
    for combo in groups.values():
        letters = [_symplectic_to_letters(g, n) for g in combo]
        for signs in itertools.product((1, -1), repeat=n):
            out.append(StabilizerSupport.from_generators([PauliString(l, s) for l, s in zip(letters, signs)]))
    logger.debug("enumerated %d stabilizer states on %d qubits", len(out), n)
    return out


# ==================== FOURTH MOMENTS ON THE GROUP ====================

def _clifford_pair_sum(letters: np.ndarray) -> float:
    """4^-n sum_{P,Q in S} prod_q kappa(P_q, Q_q)."""
    size, n = letters.shape
    total = 0.0
    rows = max(1, PAIR_CHUNK // max(1, size * n))
    for start in range(0, size, rows):
        block = letters[start : start + rows]
        total += float(KAPPA[block[:, None, :], letters[None, :, :]].prod(axis=-1).sum())
    return total / 4**n


def _haar_triple_sum(support: StabilizerSupport) -> float:
    # the Haar tensor vanishes unless the four letters multiply to a multiple of I on every qubit,
    # so P4 is fixed by (P1, P2, P3) and lies in S
    t = replica_operator(ReplicaLabel.R4_HAAR).pauli_tensor()
    letters = support.letters_array()
    signs = support.signs()
    n = support.n
    lookup = np.zeros(4**n)
    for e in support.elements:
        lookup[e.index] = e.sign
    powers = 4 ** np.arange(n - 1, -1, -1)
    b = letters[:, None, :]
    c = letters[None, :, :]
    pair_sign = signs[:, None] * signs[None, :]
    total = 0.0
    for a_row, a_sign in zip(letters, signs):
        ab = _PRODUCT_LETTER[a_row[None, None, :], b]
        d = _PRODUCT_LETTER[ab, c]
        local = t[np.broadcast_to(a_row, d.shape), np.broadcast_to(b, d.shape), np.broadcast_to(c, d.shape), d]
        weight = a_sign * pair_sign * lookup[d @ powers]
        total += float(np.sum(weight * local.prod(axis=-1)))
    return total


@lru_cache(maxsize=None)
def _haar_path_validated() -> bool:
    """Cross-check the group-sum Haar path against the generic contraction on small entangled states."""
    from ..states import make_chain_graph, make_ghz

    bell = support_from_generators(["XX", "ZZ"])
    cases = [
        (bell, PureState(np.array([1, 0, 0, 1]) / np.sqrt(2))),
        (support_from_generators(["XXX", "ZZI", "IZZ"]), make_ghz(3)),
        (chain_graph_support(3, 2), make_chain_graph(3, 2)),
    ]
    for support, psi in cases:
        fast = _haar_triple_sum(support)
        slow = coeff_B(psi, psi, Ensemble.HAAR, allow_large=True)
        if abs(fast - slow) > 1e-9:
            logger.error("stabilizer Haar path disagrees with the generic contraction (%.12g vs %.12g)", fast, slow)
            return False
    return True


def coeff_B_stabilizer(support: StabilizerSupport, ensemble: Ensemble) -> float:
    """B_{n,E} for rho = sigma = the stabilizer state of `support`."""
    ensemble = Ensemble(ensemble)
    if ensemble == Ensemble.CLIFFORD:
        if support.n <= get_settings().dense_cap:
            return clifford_fourth_moment(support.pauli_weights() ** 2)
        return _clifford_pair_sum(support.letters_array())
    if support.n > HAAR_STABILIZER_CAP:
        raise SizeError(f"Stabilizer Haar path is capped at n <= {HAAR_STABILIZER_CAP}")
    if _haar_path_validated():
        return _haar_triple_sum(support)
    logger.warning("falling back to the generic Haar contraction for n=%d", support.n)
    psi = PureState.from_amplitudes(_ground_vector(support))
    return coeff_B(psi, psi, Ensemble.HAAR, allow_large=True)


def coeff_A_stabilizer(support: StabilizerSupport) -> float:
    """sum_{P in S} 2.5^(#I) 0.5^(weight) for rho = sigma."""
    letters = support.letters_array()
    identities = (letters == 0).sum(axis=1)
    return float(np.sum(2.5**identities * 0.5 ** (support.n - identities)))


def _ground_vector(support: StabilizerSupport) -> np.ndarray:
    rho = support.density()
    vals, vecs = np.linalg.eigh(rho)
    return vecs[:, -1]


def stabilizer_pure_state(support: StabilizerSupport) -> PureState:
    return PureState.from_amplitudes(_ground_vector(support))


def clifford_pair_sum(support: StabilizerSupport) -> float:
    """Chunked pair sum over S x S; the path used beyond the dense cap."""
    return _clifford_pair_sum(support.letters_array())
