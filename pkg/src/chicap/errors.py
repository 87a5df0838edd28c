"""Exception hierarchy shared by all chicap modules."""


class ChicapError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(ChicapError):
    """Operands act on spaces of different dimensions."""


class NotPositive(ChicapError):
    """An operator required to be positive semidefinite is not."""


class NotStochastic(ChicapError):
    """A matrix required to be column-stochastic is not."""


class NotTracePreserving(ChicapError):
    """Kraus completeness sum deviates from the identity."""

    def __init__(self, deviation: float):
        self.deviation = deviation
        super().__init__(f"sum K^dag K deviates from I by {deviation:.3e}")


class NonState(ChicapError):
    """A matrix required to be a density matrix is not."""


class EmptyEnsemble(ChicapError):
    """An ensemble or measure with no atoms was supplied."""


class InvalidResolution(ChicapError):
    """Discretization resolution must be a positive integer."""


class DegenerateTemperature(ChicapError):
    """Inverse temperature must be strictly positive."""


class ScheduleInfeasible(ChicapError):
    """No projector rank achieves the required mass at this cutoff."""


class Infeasible(ChicapError):
    """The constraint set contains no state."""


class NoRoot(ChicapError):
    """Root finder could not reach the requested residual."""


class MaxItersExceeded(ChicapError):
    """Solver hit the iteration cap; carries the best report found."""

    def __init__(self, report):
        self.report = report
        super().__init__(
            "iteration cap reached with certificate gap "
            f"{report.certificate_gap:.3e}"
        )
