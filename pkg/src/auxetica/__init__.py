"""Geometric analysis of auxetic and expansive deformations of periodic
bar-and-joint frameworks."""

from . import deformation, framework, planar, study3d, symcone
from .errors import (
    AuxeticaError,
    ComplexNodes,
    DimensionError,
    DomainError,
    GeneratorStalled,
    InclusionViolation,
    InvalidInput,
    NoAuxeticDirection,
    ParseError,
    SingularPointWarning,
    StepFailure,
    Undecided,
    ValidationFailure,
)

__version__ = "0.1.0"
