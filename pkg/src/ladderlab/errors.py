"""Exception types shared across the package."""


class LadderLabError(Exception):
    """Base class for all package-specific failures."""


class EvaluationFailure(LadderLabError):
    """A numerical evaluation produced a non-finite intermediate value."""

    def __init__(self, message, component=None):
        super().__init__(message)
        self.component = component


class DomainError(LadderLabError):
    """A potential was evaluated outside its domain of definition."""


class DegenerateDegreeError(LadderLabError):
    """A polynomial solver received a leading coefficient of zero."""


class ContinuationFailure(LadderLabError):
    """Newton continuation diverged even after grid refinement."""

    def __init__(self, message, last_good_x=None):
        super().__init__(message)
        self.last_good_x = last_good_x


class InconsistentInputError(LadderLabError):
    """Branch and invariant data do not describe the same family."""


class SignResolutionError(LadderLabError):
    """Neither sign of f0 satisfies the coefficient differential equations."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class NotALadderError(LadderLabError):
    """The fitted bracket phase deviates too much from a constant +-i."""

    def __init__(self, message, deviations=None):
        super().__init__(message)
        self.deviations = deviations


class ResonanceError(LadderLabError):
    """m1*omega1 != m2*omega2, so the product integrals do not commute with H."""

    def __init__(self, message, mismatch=None):
        super().__init__(message)
        self.mismatch = mismatch


class AlgebraMismatchError(LadderLabError):
    """Numeric Poisson-algebra relations disagree with the closed form."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DomainExitError(LadderLabError):
    """A trajectory left the potential-branch domain."""

    def __init__(self, message, exit_time=None):
        super().__init__(message)
        self.exit_time = exit_time


class StiffnessError(LadderLabError):
    """The adaptive integrator underflowed its step size."""
