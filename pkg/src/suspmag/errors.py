"""Exception types shared by every module.

Each subclass carries the name of the module that raised it so the CLI can
prefix diagnostics without inspecting tracebacks.
"""


class DomainError(ValueError):
    module = "suspmag"


class DynamicsError(DomainError):
    module = "dynamics"


class ResonanceError(DynamicsError):
    """Closed-form amplitude denominator vanished (undamped resonance)."""


class SimulationError(DomainError):
    module = "simulate"


class InstabilityError(SimulationError):
    pass


class NoSettleError(SimulationError):
    pass


class EmiError(DomainError):
    module = "emi"


class NoFeasibleLengthError(EmiError):
    pass


class EconomicsError(DomainError):
    module = "economics"


class GridError(DomainError):
    module = "grids"


class GridParseError(GridError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class RegistrationError(GridError):
    pass
