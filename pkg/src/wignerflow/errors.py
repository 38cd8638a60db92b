"""Exception types shared across the package."""


class WignerFlowError(Exception):
    """Base class for all package errors."""


class ConfigError(WignerFlowError, ValueError):
    """Invalid grid, parameter or run configuration."""


class DomainTooSmallError(ConfigError):
    """An initial distribution does not fit inside the grid."""


class ContractError(WignerFlowError, ValueError):
    """A precondition on a field or argument was violated."""


class NumericalError(WignerFlowError, RuntimeError):
    """Base class for failures during time integration."""


class DomainOverflowError(NumericalError):
    """Too much probability reached the edge of the periodic grid."""


class InstabilityError(NumericalError):
    """A non-finite value appeared during a sub-step."""

    def __init__(self, substep, time):
        self.substep = substep
        self.time = time
        super().__init__(f"non-finite values after {substep} sub-step at t={time:.6g}")
