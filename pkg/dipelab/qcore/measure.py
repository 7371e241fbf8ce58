# This module computes exact outcome distributions of locally rotated states
# and the product-kernel quadratic forms evaluated on them
from typing import Sequence

import numpy as np

from ..errors import ArgumentError
from .linalg import DensityOperator, PureState, State, qubit_count

# Basis-change unitaries U with U^dagger Z U equal to X, Y and Z respectively
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
S_DAG = np.diag([1, -1j]).astype(np.complex128)
BASIS_CHANGE = np.stack([HADAMARD, HADAMARD @ S_DAG, np.eye(2, dtype=np.complex128)])
BASIS_CHANGE.setflags(write=False)

# Single-bit factor of the unique unbiased kernel, 3*delta(s, t) - 1
KERNEL_FACTOR = np.array([[2.0, -1.0], [-1.0, 2.0]])
WALSH_FACTOR = np.array([[1.0, 1.0], [1.0, -1.0]])


def _apply_to_axes(t: np.ndarray, local: np.ndarray, axes: Sequence[int], conj: bool = False) -> np.ndarray:
    for axis, u in zip(axes, local):
        u = u.conj() if conj else u
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [axis])), 0, axis)
    return t


def rotated_probabilities(state: State, unitaries: Sequence[np.ndarray]) -> np.ndarray:
    """p(s) = <s| U rho U^dagger |s> for U = unitaries[0] x ... x unitaries[n-1]."""
    n = state.n
    if len(unitaries) != n:
        raise ArgumentError(f"Expected {n} single-qubit unitaries, got {len(unitaries)}")
    if isinstance(state, PureState):
        t = _apply_to_axes(state.amplitudes.reshape((2,) * n), unitaries, range(n))
        probs = np.abs(t.reshape(-1)) ** 2
    elif isinstance(state, DensityOperator):
        t = state.matrix.reshape((2,) * (2 * n))
        t = _apply_to_axes(t, unitaries, range(n))
        t = _apply_to_axes(t, unitaries, range(n, 2 * n), conj=True)
        probs = np.real(np.diagonal(t.reshape(2**n, 2**n)))
    else:
        raise ArgumentError(f"Unsupported state type {type(state).__name__}")
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def apply_bitwise(vector: np.ndarray, local: np.ndarray) -> np.ndarray:
    """Apply the same 2x2 matrix to every bit of a length-2**n vector."""
    n = qubit_count(vector.size)
    t = np.asarray(vector).reshape((2,) * n)
    t = _apply_to_axes(t, [local] * n, range(n))
    return t.reshape(-1)


def walsh_hadamard(vector: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform, hat p(S) = sum_s (-1)^{S.s} p(s)."""
    return apply_bitwise(vector, WALSH_FACTOR)


def kernel_form(p: np.ndarray, q: np.ndarray) -> float:
    """sum_{s,t} p(s) q(t) prod_l (3 delta(s_l, t_l) - 1)"""
    return float(np.dot(p, apply_bitwise(q, KERNEL_FACTOR)))


def kernel_form_walsh(p: np.ndarray, q: np.ndarray) -> float:
    """Same quantity as kernel_form, evaluated as sum_S 3^|S| 2^-n hat p(S) hat q(S)."""
    n = qubit_count(p.size)
    weights = apply_bitwise(np.ones(1 << n), np.diag([1.0, 3.0]))
    return float(np.sum(weights * walsh_hadamard(p) * walsh_hadamard(q)) / 2**n)
