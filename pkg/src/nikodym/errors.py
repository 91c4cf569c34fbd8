"""Exception types shared across the package."""


class NikodymError(Exception):
    """Base class for every error raised by this package."""


class InvalidField(NikodymError):
    """p is not an odd prime, or a supplied field polynomial is unusable."""


class CapacityExceeded(NikodymError):
    """The requested tables would exceed the desk-scale memory budget."""


class SubfieldRequired(NikodymError):
    """The operation needs the index-two subfield, so m must be even."""


class ZeroVector(NikodymError):
    """The zero vector has no direction."""


class FieldMismatch(NikodymError):
    """Operands belong to different field contexts."""


class NotNormalized(NikodymError):
    """The quadratic must have constant term one."""


class PrecondViolation(NikodymError):
    """An argument violates a documented precondition."""


class SamplingFailure(NikodymError):
    """Rejection sampling exhausted its retry budget."""


class ParamError(NikodymError):
    """Construction parameters are outside their valid range."""


class ConstructionFailed(NikodymError):
    """All retry attempts produced unverified sets.

    Carries the per-attempt diagnostics as ``trace``.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class InvalidParabolaField(NikodymError):
    """The parabola construction needs a square q whose subfield contains
    a square root of minus one."""


class WitnessError(NikodymError):
    """A claimed witness direction does not certify a contained line."""


class NotNikodym(NikodymError):
    """The set fails the Nikodym property, so witnesses cannot be extracted."""


class CharTooSmall(NikodymError):
    """The polynomial degree must stay below the field characteristic."""


class CorruptFile(NikodymError):
    """The set file is truncated, mislabelled, or internally inconsistent."""
