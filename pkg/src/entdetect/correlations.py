"""Correlation tensors, Bloch vectors, and the running sum-of-squares criterion.

A correlation index is a tuple of per-party Pauli labels from {"0", "x",
"y", "z"}; it is "full" when no party sits at the identity. The criterion
accumulator declares detection as soon as the sum of squared full
correlations exceeds 1 (minus a configurable multiple of the propagated
error in shot mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional, Tuple

import numpy as np

from .config import MAX_QUBITS
from .errors import (
    DimensionMismatch,
    DomainError,
    DuplicateIndex,
    NonFullCorrelation,
    ParseError,
    UnsupportedDimension,
)
from .linalg import PAULI_LABELS, pauli_operator
from .states import DensityMatrix, as_generator

Index = Tuple[str, ...]

# Per-party label order used when enumerating full indices.
_ITER_AXES = ("z", "y", "x")


def parse_index(text: str) -> Index:
    """Parse a concatenated label string like "zz" or "x0y"."""
    labels = tuple(text)
    for c in labels:
        if c not in PAULI_LABELS:
            raise ParseError(f"bad Pauli label {c!r} in index {text!r}")
    return labels


def format_index(index: Index) -> str:
    return "".join(index)


def is_full(index: Index) -> bool:
    """True when no party is at the identity."""
    return all(label != "0" for label in index)


def all_full_indices(n: int) -> list[Index]:
    """All 3^n full correlation indices, lexicographic in (z, y, x)."""
    return [idx for idx in product(_ITER_AXES, repeat=n)]


def _check_index(rho: DensityMatrix, index: Index) -> Index:
    index = tuple(index)
    if len(index) != rho.n_qubits:
        raise DimensionMismatch(
            f"index length {len(index)} does not match {rho.n_qubits} qubits"
        )
    return index


def correlation(rho: DensityMatrix, index: Index) -> float:
    """Exact expectation value Tr[rho * (sigma_k x ... x sigma_l)]."""
    index = _check_index(rho, index)
    value = np.einsum("ij,ji->", rho.matrix, pauli_operator(index)).real
    return float(np.clip(value, -1.0, 1.0))


@dataclass(frozen=True)
class CorrelationRecord:
    """A measured correlation: exact (stderr 0, shots None) or sampled."""

    index: Index
    value: float
    stderr: float = 0.0
    shots: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "index", tuple(self.index))
        if self.stderr < 0:
            raise DomainError("stderr must be non-negative")
        if abs(self.value) > 1.0 + 3.0 * self.stderr + 1e-12:
            raise DomainError(
                f"|value| = {abs(self.value)} exceeds 1 + 3*stderr = {1 + 3 * self.stderr}"
            )


def sampled_correlation(rho: DensityMatrix, index: Index, shots: int, rng) -> CorrelationRecord:
    """Binomial finite-statistics model of a correlation measurement.

    n_plus ~ Binomial(shots, (1+T)/2), value = (n_plus - n_minus)/shots and
    stderr = sqrt((1 - value^2)/shots).
    """
    if shots < 1:
        raise DomainError(f"shots must be >= 1, got {shots}")
    t = correlation(rho, index)
    rng = as_generator(rng)
    n_plus = int(rng.binomial(shots, (1.0 + t) / 2.0))
    value = (2 * n_plus - shots) / shots
    stderr = math.sqrt(max(0.0, 1.0 - value * value) / shots)
    return CorrelationRecord(tuple(index), value, stderr, shots)


def bloch_vector(rho: DensityMatrix, party: int) -> np.ndarray:
    """Local Bloch vector (T_x, T_y, T_z with identities elsewhere)."""
    if not 0 <= party < rho.n_qubits:
        raise DimensionMismatch(f"party {party} out of range for {rho.n_qubits} qubits")
    out = np.zeros(3)
    for i, axis in enumerate(("x", "y", "z")):
        index = tuple(axis if q == party else "0" for q in range(rho.n_qubits))
        out[i] = correlation(rho, index)
    return out


def propagated_error(records: Iterable[CorrelationRecord]) -> float:
    """Standard error of the sum of squared values.

    Uses the Gaussian variance of v^2, namely 4 v^2 sigma^2 + 2 sigma^4;
    the second-order term keeps the error finite when a sampled value lands
    at zero, where the first-order propagation would vanish.
    """
    return math.sqrt(
        sum(4.0 * (r.value * r.stderr) ** 2 + 2.0 * r.stderr**4 for r in records)
    )


@dataclass(frozen=True)
class CriterionState:
    """Immutable accumulator for the sum-of-squares entanglement criterion."""

    records: Tuple[CorrelationRecord, ...] = ()
    running_sum: float = 0.0

    @property
    def measured_indices(self) -> Tuple[Index, ...]:
        return tuple(r.index for r in self.records)


def criterion_add(
    state: CriterionState, record: CorrelationRecord, error_multiplier: float = 1.0
) -> tuple[CriterionState, str]:
    """Add one full-correlation record; returns (new state, verdict).

    Verdict is "detected" when the running sum exceeds 1 after subtracting
    error_multiplier times the propagated error, else "undecided".
    """
    if not is_full(record.index):
        raise NonFullCorrelation(f"index {format_index(record.index)} contains the identity")
    if record.index in state.measured_indices:
        raise DuplicateIndex(f"index {format_index(record.index)} already measured")
    new = CriterionState(state.records + (record,), state.running_sum + record.value**2)
    margin = new.running_sum - error_multiplier * propagated_error(new.records)
    return new, ("detected" if margin > 1.0 else "undecided")


@dataclass(frozen=True, eq=False)
class CorrelationTensor:
    """All 3^n full-correlation values of a state."""

    n_qubits: int
    values: dict

    def __getitem__(self, index) -> float:
        if isinstance(index, str):
            index = parse_index(index)
        return self.values[tuple(index)]

    def items(self):
        return self.values.items()

    def sum_squares(self) -> float:
        return float(sum(v * v for v in self.values.values()))

    def max_abs(self) -> float:
        return float(max(abs(v) for v in self.values.values()))


def full_tensor(rho: DensityMatrix) -> CorrelationTensor:
    """Exact values for every full index (the brute-force oracle's view)."""
    if rho.n_qubits > MAX_QUBITS:
        raise UnsupportedDimension(f"full tensor limited to {MAX_QUBITS} qubits")
    values = {idx: correlation(rho, idx) for idx in all_full_indices(rho.n_qubits)}
    return CorrelationTensor(rho.n_qubits, values)
