"""Exception hierarchy shared by all modules."""


class ToricError(Exception):
    """Base class for every error raised by the package."""


class DimensionMismatch(ToricError):
    pass


class DimensionDeficient(ToricError):
    pass


class NotInCone(ToricError):
    pass


class SeriesMismatch(ToricError):
    pass


class NotPrime(ToricError):
    pass


class ReducibleModulus(ToricError):
    pass


class CountMismatch(ToricError):
    pass


class FieldTooLarge(ToricError):
    """Requested field exceeds the enumeration budget."""


class RankOverflow(ToricError):
    pass


class NotConvenient(ToricError):
    def __init__(self, face, message=None):
        self.face = face
        super().__init__(message or f"not convenient: dim of restriction to {face} is too small")


class PoleOnDomain(ToricError):
    pass


class DegreeViolation(ToricError):
    def __init__(self, index, coefficient, message=None):
        self.index = index
        self.coefficient = coefficient
        super().__init__(message or f"nonzero coefficient at T^{index} beyond the expected degree")


class NonIntegralCoefficient(ToricError):
    pass


class WeightOne(ToricError):
    pass


class EmptyDeformation(ToricError):
    pass


class ExtTooLarge(ToricError):
    pass


class DegreeMismatch(ToricError):
    pass


class UnboundedRequest(ToricError):
    pass


class FiberDegenerate(ToricError):
    def __init__(self, point, cause=None):
        self.point = point
        self.cause = cause
        super().__init__(f"fiber at {point} violates nondegeneracy: {cause}")


class UnsupportedOp(ToricError):
    pass


class NoSolution(ToricError):
    pass


class Unverified(ToricError):
    pass


class ValidationError(ToricError):
    """Problem-file validation failure; carries an optional line position."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BudgetExceeded(ToricError):
    pass
