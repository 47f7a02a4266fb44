import numpy as np

import entdetect as ed


def purify(rho: ed.DensityMatrix) -> ed.PureState:
    """Dominant eigenvector of a (near-)pure density matrix."""
    _, vecs = np.linalg.eigh(rho.matrix)
    return ed.PureState(rho.n_qubits, vecs[:, -1])


def protocol_target_theta(result: ed.DetectionResult, psi: ed.PureState, rho: ed.DensityMatrix) -> float:
    """Schmidt angle the protocol's sum identity refers to.

    When the run applied a filter, the identity holds for the filtered state;
    reconstruct it by applying the same filter to the input.
    """
    info = result.details.get("filter")
    if info:
        filtered, _ = ed.apply_filter(rho, ed.FilterOp(info["party"], info["eps"]))
        return ed.schmidt_oracle(purify(filtered))[0]
    return ed.schmidt_oracle(psi)[0]
