class HbacError(Exception):
    """Base class for every error raised by the toolkit."""


class InvalidParameterError(HbacError, ValueError):
    pass


class DimensionMismatchError(InvalidParameterError):
    pass


class CompositeCapExceededError(InvalidParameterError):
    pass


class PremiseViolationError(HbacError):
    """A no-go premise (R1, R2 or R3) does not hold for the given instance."""

    def __init__(self, message, premises=None):
        super().__init__(message)
        self.premises = premises


class SubspaceCapExceededError(HbacError):
    """An energy subspace is too large for permutation enumeration."""

    def __init__(self, message, size):
        super().__init__(message)
        self.size = size


class ReducibleMatrixError(HbacError):
    """The round matrix has more than one stationary distribution."""

    def __init__(self, message, dimension):
        super().__init__(message)
        self.dimension = dimension


class VerificationFailure(HbacError):
    pass


class CopUndefinedError(HbacError):
    def __init__(self, message, cumulative_work):
        super().__init__(message)
        self.cumulative_work = cumulative_work


class WrongSubsetError(InvalidParameterError):
    """The input's beta-ordering has no closed-form cone; use the vertex fallback."""

    def __init__(self, message, subset):
        super().__init__(message)
        self.subset = subset
