"""Closed-form QFI predictions for ergodic dynamics and the depth witness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spin import Kind, Operator


@dataclass(frozen=True)
class Prediction:
    """Leading two-term QFI value on a K-dimensional space.

    ``remainder_scale`` is Tr[O^2]/K^2, the order of the neglected term.
    """

    K: int
    trace_O2: float
    trace_O: float
    leading_value: float
    remainder_scale: float

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "trace_O2": self.trace_O2,
            "trace_O": self.trace_O,
            "leading_value": self.leading_value,
            "remainder_scale": self.remainder_scale,
        }


def prediction_from_traces(dim: int, trace_o2: float, trace_o: float) -> Prediction:
    if dim < 1:
        raise ValueError("dimension must be positive")
    lead = 4 * trace_o2 / dim - 4 * trace_o**2 / dim**2
    return Prediction(int(dim), float(trace_o2), float(trace_o), float(lead), abs(trace_o2) / dim**2)


def universal_qfi(op: Operator) -> Prediction:
    """Prediction for an operator already restricted to the Krylov space."""
    if op.kind is not Kind.HERMITIAN:
        raise ValueError("the generator must be Hermitian")
    m = op.matrix
    # Tr[O^2] = sum |O_ij|^2 for Hermitian O, without forming the product
    return prediction_from_traces(op.dim, float(np.sum(np.abs(m) ** 2)), float(np.trace(m).real))


def symmetric_prediction(n_qubits: int) -> float:
    """N(N+2)/3, the leading terms for K = N + 1."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    return n_qubits * (n_qubits + 2) / 3


def full_space_prediction(n_qubits: int) -> float:
    """Exactly N: Tr[J^2] = N 2^(N-2) over K = 2^N and Tr[J] = 0."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    return float(n_qubits)


def producibility_bound(n_qubits: int, k: int) -> int:
    """s k^2 + r^2 with s = floor(N/k), r = N - s k."""
    s, r = divmod(n_qubits, k)
    return s * k * k + r * r


def entanglement_depth(qfi: float, n_qubits: int) -> int:
    """Smallest certified cluster size: one more than the largest k whose
    k-producible bound is strictly exceeded, or 1 if none is."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    if qfi < 0 or qfi > n_qubits**2:
        raise ValueError(f"QFI {qfi} is outside [0, N^2] for N = {n_qubits}")
    depth = 1
    for k in range(1, n_qubits + 1):
        if qfi > producibility_bound(n_qubits, k):
            depth = k + 1
    return min(depth, n_qubits)
