"""Exception hierarchy.

Three families matter to callers (and map to distinct CLI exit codes):
input that cannot be parsed, input that is mathematically invalid, and
internal integrality tripwires that indicate a violated precondition or a bug.
"""


class LgorbError(Exception):
    pass


class ParseError(LgorbError):
    pass


class ValidationError(LgorbError):
    pass


class NotSquare(ValidationError):
    pass


class SingularMatrix(ValidationError):
    pass


class NotAtomicShape(ValidationError):
    pass


class DegenerateType(ValidationError):
    pass


class NonPositiveWeights(ValidationError):
    pass


class NotASymmetry(ValidationError):
    pass


class DoesNotNormalize(ValidationError):
    pass


class GroupTooLarge(ValidationError):
    pass


class IncompatibleLengths(ValidationError):
    pass


class SupportOutsideFixedLocus(ValidationError):
    pass


class DoesNotPreserveLocus(ValidationError):
    pass


class AssumptionViolated(ValidationError):
    def __init__(self, assumption, witness):
        super().__init__(f"assumption {assumption} violated: {witness}")
        self.assumption = assumption
        self.witness = witness


class IntegralityError(LgorbError):
    """A quantity that must be an integer (or polynomial) was not."""


class NonIntegerMilnorNumber(IntegralityError):
    pass


class NonIntegralMolienAverage(IntegralityError):
    pass


class NonIntegralLefschetzExponent(IntegralityError):
    pass


class NonIntegralBurnsideAverage(IntegralityError):
    pass


class NonPolynomialCharacter(IntegralityError):
    pass


class UnexpectedZeroRestriction(IntegralityError):
    pass
