"""Exception types shared across the package."""


class ModbenchError(Exception):
    """Base class for all domain errors raised by this package."""


class NotHermitian(ModbenchError):
    """Input matrix fails the Hermitian symmetry check."""


class NoConvergence(ModbenchError):
    """Iterative eigensolver exceeded its sweep budget."""


class DomainError(ModbenchError):
    """Scalar function undefined at some eigenvalue."""


class NotPositive(ModbenchError):
    """Density matrix is not positive definite above the faithfulness floor."""


class TraceError(ModbenchError):
    """Density matrix trace deviates from one beyond tolerance."""


class BoundaryCollision(ModbenchError):
    """A spectral-interval endpoint collides with an eigenvalue."""


class NotCentered(ModbenchError):
    """Vector has components outside the central spectral piece."""


class WrongSupport(ModbenchError):
    """Vector leaks outside the claimed spectral piece."""


class SlowConvergence(ModbenchError):
    """Geometric series needed more terms than the budget allows."""


class LambdaOnRay(ModbenchError):
    """Resolvent parameter sits on (or too close to) the nonnegative real ray."""


class DegreeExhausted(ModbenchError):
    """Polynomial fit cannot reach the target error within the degree cap."""


class UnknownTheory(ModbenchError):
    """Requested axiom theory name is not one of the known theories."""


class MissingInterpretation(ModbenchError):
    """An axiom schema refers to a symbol with no backing operator."""
