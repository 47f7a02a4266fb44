"""Exception types for contract violations across the package."""


class EntDetectError(Exception):
    """Base class for all package-specific errors."""


class DomainError(EntDetectError, ValueError):
    """A parameter is outside its allowed range or an invariant failed."""


class DimensionMismatch(EntDetectError, ValueError):
    """Operands disagree in qubit count or matrix shape."""


class NotHermitian(EntDetectError, ValueError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class ZeroProjection(EntDetectError, ValueError):
    """A projective measurement left a state with (numerically) zero norm."""


class ZeroSuccess(EntDetectError, ValueError):
    """A filter operation has (numerically) zero success probability."""


class DuplicateIndex(EntDetectError, ValueError):
    """A correlation index was added to a criterion accumulator twice."""


class NonFullCorrelation(EntDetectError, ValueError):
    """An identity-containing index was used where a full correlation is required."""


class DegenerateDirection(EntDetectError, ValueError):
    """A Bloch vector is too short to define a measurement basis."""


class DegenerateDenominator(EntDetectError, ValueError):
    """The phase-estimation denominator vanishes (near-product marginal)."""


class UnsupportedDimension(EntDetectError, ValueError):
    """The operation is only defined for a smaller number of qubits."""


class ParseError(EntDetectError, ValueError):
    """A textual spec (state, index, mode) could not be parsed."""
