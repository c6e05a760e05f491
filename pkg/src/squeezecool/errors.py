"""Exception hierarchy shared by all squeezecool modules."""


class SqueezecoolError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(SqueezecoolError, ValueError):
    """A physical parameter or configuration value violates its constraint."""


class DegenerateDenominatorError(SqueezecoolError):
    """The squeeze factor sits on the singular manifold r = r_c, where the
    static displacement equation has no finite solution."""


class NoStationaryStateError(SqueezecoolError):
    """The linear model is unstable or marginal; stationary second moments
    do not exist."""


class SingularFrequencyError(SqueezecoolError):
    """The requested frequency coincides with an undamped resonance of the
    drift matrix."""


class DegenerateSteadyStateError(SqueezecoolError):
    """The Liouvillian null space is not one-dimensional at the working
    tolerance."""


class DimensionCapError(SqueezecoolError):
    """The requested Fock truncation exceeds the desk-scale dense-solver cap."""


class AccuracyError(SqueezecoolError):
    """A numerical routine could not reach the requested tolerance.

    Carries the best available estimate and an error bound so callers can
    decide whether the partial result is usable.
    """

    def __init__(self, message, estimate=None, bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.bound = bound
