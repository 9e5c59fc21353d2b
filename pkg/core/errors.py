"""
Saturable Battery Simulator - Error Types

Every failure the simulator can signal derives from BatteryError. The exit_code
attribute is what the command-line front end returns when the error escapes a command.
"""


class BatteryError(Exception):
    """Base class for all simulator errors."""
    exit_code = 2


class ConfigError(BatteryError):
    """Invalid or inconsistent run configuration."""
    exit_code = 1


class InvalidTimeGrid(ConfigError, ValueError):
    """Time grid is empty, negative or not strictly increasing."""


# Linear algebra kernel

class LinalgError(BatteryError):
    """Failure inside the dense linear-algebra kernel."""


class NonHermitianInput(LinalgError):
    pass


class ConvergenceFailure(LinalgError):
    pass


class SingularMatrix(LinalgError):
    pass


class OverflowRisk(LinalgError):
    pass


class NonFiniteEntries(LinalgError, ValueError):
    pass


# Model / shape errors

class DimensionTooSmall(BatteryError, ValueError):
    pass


class DimensionMismatch(BatteryError, ValueError):
    pass


# Time propagation

class IntegrationError(BatteryError):
    """The master-equation integrator could not produce a valid trajectory."""


class StepSizeUnderflow(IntegrationError):
    pass


class InvariantViolation(IntegrationError):
    pass


class TruncationInsufficient(BatteryError):
    """Population in the last retained Fock level is too large for the requested analysis."""

    def __init__(self, tail_population: float, dim: int, tolerance: float):
        self.tail_population = tail_population
        self.dim = dim
        self.tolerance = tolerance
        super().__init__(
            f"Population {tail_population:.3e} in Fock level {dim - 1} exceeds {tolerance:.1e}; "
            f"raise the truncation (dim > {dim}) and rerun"
        )


# Steady states

class SteadyStateError(BatteryError):
    pass


class DegenerateSteadyState(SteadyStateError):
    pass


class NoRelaxation(SteadyStateError):
    pass
