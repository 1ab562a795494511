"""Exception types raised by xsym."""


class XSymError(ValueError):
    """Base class for all xsym input/validation errors."""


class NotDensityMatrix(XSymError):
    pass


class NotXShape(XSymError):
    pass


class InvalidProbabilities(XSymError):
    pass


class InvalidStrength(XSymError):
    pass


class DimensionMismatch(XSymError):
    pass


class BadLayout(XSymError):
    pass


class ComplexCoherence(XSymError):
    """Closed-form discord requested for a state with complex coherences."""


class SingularDenominator(XSymError):
    pass


class UnsupportedCombination(XSymError):
    """No analytic symmetry rule is known for this channel/measure pair."""


class DiscriminationError(XSymError):
    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class Ambiguous(DiscriminationError):
    pass


class NoFit(DiscriminationError):
    pass
