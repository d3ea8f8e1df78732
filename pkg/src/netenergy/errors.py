"""Exception hierarchy.

Validation problems (bad input) and numeric problems (solver failures,
uncontrollable systems) are kept apart so the CLI can map them to
different exit codes.
"""


class NetEnergyError(Exception):
    """Base class for all package errors."""


class ValidationError(NetEnergyError, ValueError):
    """Input failed a precondition check."""


class NumericError(NetEnergyError, ArithmeticError):
    """A numerical computation failed or is undefined."""


class StabilityError(NumericError):
    """Infinite-horizon quantity requested for a network with radius >= 1."""

    def __init__(self, radius: float):
        super().__init__(
            f"infinite horizon requires spectral radius < 1, got {radius:.17g}"
        )
        self.radius = radius


class ConvergenceError(NumericError):
    """Iterative solver hit its iteration cap."""

    def __init__(self, message: str, iterations: int):
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations


class UncontrollableError(NumericError):
    """Gramian is (numerically) singular."""

    def __init__(self, lambda_min: float):
        super().__init__(f"Gramian is singular: lambda_min = {lambda_min:.6g}")
        self.lambda_min = lambda_min


class UnreachableTargetError(NumericError):
    """No energy flows from the driver set into the target node."""
