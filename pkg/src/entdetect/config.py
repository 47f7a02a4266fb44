"""Central numerical tolerances and size limits."""

from dataclasses import dataclass

MAX_QUBITS = 4
MAX_DIM = 2**MAX_QUBITS


@dataclass(frozen=True)
class Tolerances:
    """Absolute tolerances shared across the package.

    equality        matrix / state comparisons and constructor invariants
    spectral        eigen- and singular-value reconstruction budget
    psd             negative-eigenvalue slack allowed on density matrices
    pt_negativity   partial-transpose eigenvalues below -pt_negativity count
                    as genuinely negative (entangled verdict)
    zero_projection norms below this are treated as failed projections
    phase_denominator  minimum value of 1 - |bloch|^2 for phase estimation
    """

    equality: float = 1e-9
    spectral: float = 1e-8
    psd: float = 1e-9
    pt_negativity: float = 1e-10
    zero_projection: float = 1e-12
    phase_denominator: float = 1e-6


TOL = Tolerances()
