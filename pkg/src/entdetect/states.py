"""State constructors, random ensembles, local frames, and state file I/O.

Conventions: the computational basis is identified with linear polarization,
|0> = |H> and |1> = |V>, so |+45 deg> = (|0> + |1>)/sqrt(2). The singlet is
(|01> - |10>)/sqrt(2). Random mixed states are drawn from the
Hilbert-Schmidt (Ginibre) ensemble; the rank of the Ginibre factor is
configurable so purity ranges can be populated.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .config import MAX_QUBITS, TOL
from .errors import (
    DimensionMismatch,
    DomainError,
    NotHermitian,
    ZeroProjection,
)
from .linalg import dagger, mat_equal, tensor_product_all


def _check_qubits(n) -> int:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise DomainError(f"qubit count must be an integer in [1, {MAX_QUBITS}], got {n!r}")
    return int(n)


@dataclass(frozen=True, eq=False)
class PureState:
    """An n-qubit pure state as a normalized complex amplitude vector."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        n = _check_qubits(self.n_qubits)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1).copy()
        if amps.size != 2**n:
            raise DimensionMismatch(f"expected {2**n} amplitudes, got {amps.size}")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > TOL.equality:
            raise DomainError(f"state norm {norm} differs from 1 beyond tolerance")
        object.__setattr__(self, "n_qubits", n)
        object.__setattr__(self, "amplitudes", amps)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, np.outer(self.amplitudes, np.conjugate(self.amplitudes)))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix of dimension 2^n."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        n = _check_qubits(self.n_qubits)
        m = np.asarray(self.matrix, dtype=complex).copy()
        d = 2**n
        if m.shape != (d, d):
            raise DimensionMismatch(f"expected shape {(d, d)}, got {m.shape}")
        asym = float(np.max(np.abs(m - dagger(m))))
        if asym > TOL.equality:
            raise NotHermitian(f"asymmetry {asym:.3e} exceeds tolerance")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TOL.equality:
            raise DomainError(f"trace {tr} differs from 1 beyond tolerance")
        min_eig = float(np.linalg.eigvalsh(m)[0])
        if min_eig < -TOL.psd:
            raise DomainError(f"minimum eigenvalue {min_eig:.3e} below -{TOL.psd:.1e}")
        object.__setattr__(self, "n_qubits", n)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_pure(cls, psi: PureState) -> "DensityMatrix":
        return psi.density()

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


@dataclass(frozen=True, eq=False)
class LocalFrame:
    """One single-qubit unitary per party: a choice of local axes."""

    unitaries: tuple

    def __post_init__(self):
        us = tuple(np.asarray(u, dtype=complex).copy() for u in self.unitaries)
        _check_qubits(len(us))
        for i, u in enumerate(us):
            if u.shape != (2, 2):
                raise DimensionMismatch(f"frame factor {i} has shape {u.shape}, expected (2, 2)")
            if not mat_equal(u @ dagger(u), np.eye(2), TOL.equality):
                raise DomainError(f"frame factor {i} is not unitary within tolerance")
        object.__setattr__(self, "unitaries", us)

    @property
    def n_qubits(self) -> int:
        return len(self.unitaries)

    def full_unitary(self) -> np.ndarray:
        return tensor_product_all(self.unitaries)


def ket(bits: str) -> PureState:
    """Computational basis state from a bit string, e.g. ket("01")."""
    n = _check_qubits(len(bits))
    amps = np.zeros(2**n, dtype=complex)
    amps[int(bits, 2)] = 1.0
    return PureState(n, amps)


def bell_phi_plus() -> PureState:
    return PureState(2, np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2))


def singlet() -> PureState:
    return PureState(2, np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2))


def _check_probability(p) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"mixing probability must be in [0, 1], got {p}")
    return p


def make_werner(p) -> DensityMatrix:
    """Singlet mixed with white noise: p |psi-><psi-| + (1-p)/4 * identity."""
    p = _check_probability(p)
    proj = singlet().density().matrix
    return DensityMatrix(2, p * proj + (1.0 - p) * np.eye(4) / 4.0)


def make_colored(p) -> DensityMatrix:
    """Singlet mixed with colored noise: p |psi-><psi-| + (1-p) |01><01|."""
    p = _check_probability(p)
    proj = singlet().density().matrix
    noise = ket("01").density().matrix
    return DensityMatrix(2, p * proj + (1.0 - p) * noise)


def make_dicke(n, k) -> PureState:
    """Equal superposition of all n-bit strings of Hamming weight k."""
    n = _check_qubits(n)
    if not isinstance(k, (int, np.integer)) or not 0 <= k <= n:
        raise DomainError(f"excitation number must satisfy 0 <= k <= {n}, got {k!r}")
    amps = np.zeros(2**n, dtype=complex)
    for ones in combinations(range(n), int(k)):
        amps[sum(1 << (n - 1 - q) for q in ones)] = 1.0
    return PureState(n, amps / np.linalg.norm(amps))


def project_first_qubit(state: PureState, direction) -> PureState:
    """Project the first qubit onto a single-qubit pure state and renormalize.

    Returns the (n-1)-qubit post-measurement state; raises ZeroProjection if
    the outcome has numerically zero probability.
    """
    if state.n_qubits < 2:
        raise DomainError("projection requires at least 2 qubits")
    if isinstance(direction, PureState):
        if direction.n_qubits != 1:
            raise DimensionMismatch("projection direction must be a single-qubit state")
        d = direction.amplitudes
    else:
        d = np.asarray(direction, dtype=complex).reshape(-1)
        if d.size != 2:
            raise DimensionMismatch("projection direction must have 2 amplitudes")
        d = d / np.linalg.norm(d)
    rest = state.amplitudes.reshape(2, -1)
    reduced = np.conjugate(d) @ rest
    norm = float(np.linalg.norm(reduced))
    if norm < TOL.zero_projection:
        raise ZeroProjection("post-measurement norm below 1e-12")
    return PureState(state.n_qubits - 1, reduced / norm)


def make_w() -> PureState:
    """Three-qubit W state, prepared by projecting the first qubit of the
    four-qubit Dicke state (two excitations) onto |1>."""
    return project_first_qubit(make_dicke(4, 2), ket("1"))


def make_g() -> PureState:
    """Three-qubit G state: first qubit of the four-qubit Dicke state
    (two excitations) projected onto |+45 deg> = (|0> + |1>)/sqrt(2)."""
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    return project_first_qubit(make_dicke(4, 2), plus)


def as_generator(seed) -> np.random.Generator:
    """Accept an integer seed, SeedSequence, or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitary(dim: int, rng) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    rng = as_generator(rng)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r).copy()
    phases /= np.abs(phases)
    return q * phases


def random_pure(n, seed) -> PureState:
    """Haar-random pure state: normalized complex Gaussian amplitudes."""
    n = _check_qubits(n)
    rng = as_generator(seed)
    amps = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return PureState(n, amps / np.linalg.norm(amps))


def random_mixed(n, seed, rank=None) -> DensityMatrix:
    """Hilbert-Schmidt (Ginibre) random density matrix.

    rank limits the number of Ginibre columns (rank=1 gives a pure state);
    the default is the full dimension 2^n.
    """
    n = _check_qubits(n)
    d = 2**n
    if rank is None:
        rank = d
    if not 1 <= rank <= d:
        raise DomainError(f"rank must be in [1, {d}], got {rank}")
    rng = as_generator(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ dagger(g)
    return DensityMatrix(n, m / np.trace(m))


def random_frame(n, seed) -> LocalFrame:
    """Independent Haar-random single-qubit unitaries, one per party."""
    n = _check_qubits(n)
    rng = as_generator(seed)
    return LocalFrame(tuple(haar_unitary(2, rng) for _ in range(n)))


def apply_frame(state, frame: LocalFrame):
    """Rotate a state by a local frame: (U1 x ... x Un) acting on the state."""
    if frame.n_qubits != state.n_qubits:
        raise DimensionMismatch(
            f"frame has {frame.n_qubits} parties, state has {state.n_qubits}"
        )
    u = frame.full_unitary()
    if isinstance(state, PureState):
        return PureState(state.n_qubits, u @ state.amplitudes)
    return DensityMatrix(state.n_qubits, u @ state.matrix @ dagger(u))


def purity(rho: DensityMatrix) -> float:
    """Tr rho^2; 1 for pure states, 1/2^n for maximally mixed."""
    return float(np.trace(rho.matrix @ rho.matrix).real)


def _complex_to_pairs(a: np.ndarray):
    return [[float(x.real), float(x.imag)] for x in a]


def state_to_dict(state) -> dict:
    """JSON form: {"n_qubits": n, "matrix": [[[re, im], ...], ...]} row-major
    for density matrices, {"n_qubits": n, "amplitudes": [[re, im], ...]} for
    pure states."""
    if isinstance(state, PureState):
        return {"n_qubits": state.n_qubits, "amplitudes": _complex_to_pairs(state.amplitudes)}
    return {
        "n_qubits": state.n_qubits,
        "matrix": [_complex_to_pairs(row) for row in state.matrix],
    }


def state_from_dict(data: dict):
    if "amplitudes" in data:
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        return PureState(int(data["n_qubits"]), amps)
    if "matrix" in data:
        m = np.array([[complex(re, im) for re, im in row] for row in data["matrix"]])
        return DensityMatrix(int(data["n_qubits"]), m)
    raise DomainError("state dict needs an 'amplitudes' or 'matrix' key")


def save_state(state, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_dict(state), fh)


def load_state(path):
    with open(path, encoding="utf-8") as fh:
        return state_from_dict(json.load(fh))
