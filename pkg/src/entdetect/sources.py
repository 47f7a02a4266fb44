"""Measurement sources: answer correlation queries exactly or with shot noise.

A source wraps a hidden density matrix and answers expectation-value
queries for dichotomic observables, either exactly or through the binomial
finite-statistics model. Detection strategies only call the query methods;
the .state property exists for oracles and tests.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from .correlations import CorrelationRecord, Index
from .errors import DimensionMismatch, DomainError
from .linalg import PAULIS, pauli_operator, tensor_product_all
from .schmidt import FilterOp, apply_filter
from .states import DensityMatrix, as_generator


def direction_operator(direction) -> np.ndarray:
    """The single-qubit observable n . sigma for a unit 3-vector n."""
    d = np.asarray(direction, dtype=float)
    if d.shape != (3,):
        raise DimensionMismatch("measurement direction must have 3 components")
    norm = float(np.linalg.norm(d))
    if norm < 1e-12:
        raise DomainError("measurement direction has zero length")
    d = d / norm
    return d[0] * PAULIS["x"] + d[1] * PAULIS["y"] + d[2] * PAULIS["z"]


class MeasurementSource:
    """Exact or shot-noise access to the correlations of a hidden state."""

    def __init__(self, state: DensityMatrix, shots: Optional[int] = None, rng=None):
        if shots is not None and shots < 1:
            raise DomainError(f"shots must be >= 1, got {shots}")
        self._state = state
        self.shots = shots
        self._rng = as_generator(rng) if shots is not None else None
        self.queries = 0

    @property
    def n_qubits(self) -> int:
        return self._state.n_qubits

    @property
    def state(self) -> DensityMatrix:
        return self._state

    def _expectation(self, operator: np.ndarray) -> tuple[float, float]:
        self.queries += 1
        t = float(np.clip(np.einsum("ij,ji->", self._state.matrix, operator).real, -1.0, 1.0))
        if self.shots is None:
            return t, 0.0
        n_plus = int(self._rng.binomial(self.shots, (1.0 + t) / 2.0))
        value = (2 * n_plus - self.shots) / self.shots
        stderr = math.sqrt(max(0.0, 1.0 - value * value) / self.shots)
        return value, stderr

    def measure_index(self, index: Index) -> CorrelationRecord:
        """Correlation along Pauli-labelled axes."""
        index = tuple(index)
        if len(index) != self.n_qubits:
            raise DimensionMismatch(
                f"index length {len(index)} does not match {self.n_qubits} qubits"
            )
        value, stderr = self._expectation(pauli_operator(index))
        return CorrelationRecord(index, value, stderr, self.shots)

    def measure_directions(self, directions: Sequence) -> tuple[float, float]:
        """Correlation along arbitrary local directions (None = identity)."""
        if len(directions) != self.n_qubits:
            raise DimensionMismatch(
                f"got {len(directions)} directions for {self.n_qubits} qubits"
            )
        op = tensor_product_all(
            np.eye(2) if d is None else direction_operator(d) for d in directions
        )
        return self._expectation(op)

    def apply_filter(self, f: FilterOp) -> float:
        """Condition the hidden state on a successful local filter."""
        self._state, p_succ = apply_filter(self._state, f)
        return p_succ
