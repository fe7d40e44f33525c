"""Exception and warning types shared across the library."""


class AuxeticaError(Exception):
    """Base class for all library errors."""


class InvalidInput(AuxeticaError):
    """Malformed or out-of-contract input data."""


class DomainError(AuxeticaError):
    """Input is outside the mathematical domain of the operation."""


class DimensionError(AuxeticaError):
    """Operation requires a specific ambient dimension."""


class ComplexNodes(AuxeticaError):
    """Node radicand is negative; the point lies outside the validity region."""


class NoAuxeticDirection(AuxeticaError):
    """No nontrivial auxetic tangent exists at the given framework."""


class StepFailure(AuxeticaError):
    """Constraint projection diverged during trajectory integration."""

    def __init__(self, tau, message=None):
        self.tau = tau
        super().__init__(message or f"projection failed at tau={tau}")


class GeneratorStalled(AuxeticaError):
    """Edge-insertion generator ran out of candidates before reaching m = 2n."""


class Undecided(AuxeticaError):
    """Cone feasibility search exhausted its budget without a certified verdict."""

    def __init__(self, message, best_candidate=None):
        self.best_candidate = best_candidate
        super().__init__(message)


class InclusionViolation(AuxeticaError):
    """A sampled point violated the cone inclusion being checked."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class ParseError(AuxeticaError):
    """File could not be parsed; carries line/column when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ValidationFailure(AuxeticaError):
    """Loaded framework failed invariant validation; carries the violation list."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("framework validation failed: " + "; ".join(str(v) for v in violations))


class SingularPointWarning(UserWarning):
    """Constraint rank is numerically ambiguous at this configuration."""
