"""Exception hierarchy.  Every failure mode has its own class so callers and
the CLI can tell usage problems from verification failures."""


class NPGError(Exception):
    """Base class for all library errors."""


class UsageError(NPGError, ValueError):
    """Bad input shape or value supplied by the caller."""


class VerificationError(NPGError):
    """A computed object failed an independent check."""


# fields / Witt vectors
class NotPrime(UsageError):
    pass


class DegreeTooLarge(UsageError):
    pass


class DivisionByZero(NPGError, ZeroDivisionError):
    pass


class FieldMismatch(UsageError):
    pass


class RingMismatch(UsageError):
    pass


class NotAUnit(NPGError, ArithmeticError):
    pass


class WrongField(UsageError):
    pass


class FieldEmbeddingFailed(NPGError):
    pass


# matrices
class ShapeMismatch(UsageError):
    pass


class NotInvertible(NPGError, ArithmeticError):
    pass


class PrecisionTooLow(UsageError):
    pass


class EndpointUnresolved(NPGError):
    pass


# Newton polygons
class NotIntegralBreakpoints(UsageError):
    pass


class NotConvex(UsageError):
    pass


class SlopeOutOfRange(UsageError):
    pass


class Incomparable(UsageError):
    pass


class NotSymmetric(UsageError):
    pass


# displays
class NotNormalForm(UsageError):
    pass


class EntriesNotZeroOrUnit(UsageError):
    pass


class NotCyclic(NPGError):
    pass


class NotLocalLocal(UsageError):
    pass


class FieldTooSmall(NPGError):
    pass


class StageValidationFailed(VerificationError):
    pass


class InternalInconsistency(VerificationError):
    pass


class DegenerateDimensions(UsageError):
    """Raised for d = 0 or c = 0; carries the canonical polygon."""

    def __init__(self, message, polygon=None):
        super().__init__(message)
        self.polygon = polygon


# deformations
class OutOfParallelogram(UsageError):
    pass


class SymmetryViolated(UsageError):
    pass


class PreconditionNotAbove(UsageError):
    pass


class RealizationExhausted(VerificationError):
    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)


class ChainBroken(VerificationError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


# files
class SchemaVersionMismatch(UsageError):
    pass


class MalformedFile(UsageError):
    pass
