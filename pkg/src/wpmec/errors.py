"""Exception types shared across the package."""


class WpmecError(Exception):
    """Base class for all package errors."""


class ParameterError(WpmecError, ValueError):
    """An input violates a documented precondition."""


class InfeasiblePolicyError(ParameterError):
    """The policy asks for something physically impossible (e.g. offloading with no uplink time)."""


class ConvergenceError(WpmecError, RuntimeError):
    """A numerical routine hit its refinement limit before meeting its tolerance."""
