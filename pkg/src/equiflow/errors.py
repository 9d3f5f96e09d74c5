"""Typed errors raised across the package.

The CLI maps these onto process exit codes: config errors -> 2,
flow/solver errors -> 3, invariant breaches -> 4.
"""


class EquiflowError(Exception):
    """Base class for all package errors."""


# --- geometry ---------------------------------------------------------------

class DegenerateTangent(EquiflowError):
    """|gamma'| fell below tolerance away from the marked origin sample."""


class OriginUndefined(EquiflowError):
    """Normal speed requested at an origin sample; the 0/0 limit is owned by
    the flow modules' origin rules, not by the geometry layer."""


class ShapeError(EquiflowError):
    """Array length does not match the curve sampling."""


# --- boundary frames --------------------------------------------------------

class DegenerateFrame(EquiflowError):
    """Frame too close to a degenerate configuration (|tau|^2 -> 1 or
    <nu,mu>^2 -> 1); the projection identities carry inverse factors there."""


# --- PDE engine -------------------------------------------------------------

class BoundaryRootFailure(EquiflowError):
    """Ghost-value root solve could not bracket or converge."""


class StiffnessFailure(EquiflowError):
    """Time step underflowed dt_min or the linear solve produced non-finite
    values."""


class MaxStepsExceeded(EquiflowError):
    """Step budget exhausted before the requested stop condition."""


class OrderUndetermined(EquiflowError):
    """Richardson order estimate impossible (non-monotone or roundoff-level
    errors)."""


# --- flows ------------------------------------------------------------------

class DegenerateGraph(EquiflowError):
    """|gamma'|^2 below tolerance: the graph parametrisation broke down."""


class InvariantBreach(EquiflowError):
    """A preserved quantity left its admissible band beyond the discretisation
    slack.  Carries the time stamp of the first violation."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class CurvatureUnresolved(EquiflowError):
    """sup|kappa| * h > 1: the grid no longer resolves the profile curvature
    (discrete shadow of a curvature singularity)."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class InsufficientData(EquiflowError):
    """Not enough snapshots for the requested fit."""


class DomainError(EquiflowError):
    """Argument outside the mathematical domain (e.g. rescaling at t >= 0,
    kernel evaluated at or after its centre time)."""


# --- configuration ----------------------------------------------------------

class ConfigError(EquiflowError):
    """Base class for configuration file problems; carries a line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnknownKey(ConfigError):
    pass


class TypeMismatch(ConfigError):
    pass


class InvariantViolation(ConfigError):
    pass
