"""Ground-truth oracles: PPT separability test and the full-tensor criterion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .correlations import full_tensor
from .errors import UnsupportedDimension
from .linalg import hermitian_eigenvalues
from .states import DensityMatrix


@dataclass(frozen=True)
class EntanglementVerdict:
    entangled: bool
    min_pt_eigenvalue: float


def partial_transpose_second(matrix: np.ndarray) -> np.ndarray:
    """Partial transpose over the second qubit of a two-qubit matrix."""
    return (
        matrix.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    )


def ppt_verdict(rho: DensityMatrix) -> EntanglementVerdict:
    """Peres-Horodecki test; necessary and sufficient at two qubits.

    Eigenvalues within TOL.pt_negativity of zero count as non-negative, so
    boundary states are classified separable.
    """
    if rho.n_qubits != 2:
        raise UnsupportedDimension("PPT verdict implemented for 2 qubits only")
    eigs = hermitian_eigenvalues(partial_transpose_second(rho.matrix))
    min_eig = float(eigs[0])
    return EntanglementVerdict(min_eig < -TOL.pt_negativity, min_eig)


def brute_force_criterion(rho: DensityMatrix) -> tuple[float, bool]:
    """Sum of squares over the complete full-correlation tensor."""
    total = full_tensor(rho).sum_squares()
    return total, total > 1.0
