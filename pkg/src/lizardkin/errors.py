"""Exception hierarchy shared by every mechanism module."""


class KinematicsError(Exception):
    """Base class for all errors raised by lizardkin."""


class NoAssembly(KinematicsError):
    """The input angles place a mechanism out of reach (negative discriminant)."""

    def __init__(self, message, mechanism=None):
        super().__init__(message)
        self.mechanism = mechanism


class DegenerateDenominator(KinematicsError):
    """A half-angle quadratic lost its leading coefficient (fold-back pose)."""


class OutOfWorkspace(KinematicsError):
    """An endpoint lies outside the reach of at least one serial chain."""


class SingularHere(KinematicsError):
    """The velocity Jacobian is not invertible at the queried point."""


class CouplingInfeasible(KinematicsError):
    """A body five-bar cannot satisfy the end angles imposed by the coupling."""

    def __init__(self, message, mechanism=None):
        super().__init__(message)
        self.mechanism = mechanism


class NoUpperRegion(KinematicsError):
    """The maximal inscribed circle has no real centre above the base line."""


class ParameterError(KinematicsError, ValueError):
    """Base for invalid non-dimensional design parameters."""


class SimplexViolation(ParameterError):
    pass


class RangeViolation(ParameterError):
    pass


class AssemblyViolation(ParameterError):
    pass


class BadParams(KinematicsError, ValueError):
    """Invalid gait profile parameters."""


class CommandOutOfRange(KinematicsError, ValueError):
    """An actuator command leaves its configured joint range."""
