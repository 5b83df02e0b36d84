"""Exception hierarchy shared by every module."""


class KappaError(Exception):
    """Base class for all library errors."""


class ParameterDomainError(KappaError, ValueError):
    """A distribution parameter or argument lies outside its valid domain."""


class DomainError(KappaError, ValueError):
    """The requested quantity is undefined for these inputs."""


class CapabilityError(KappaError):
    """The family does not support the requested operation."""


class FallbackRequired(CapabilityError):
    """No closed form exists; the caller must pick a numerical method."""


class ConfigError(KappaError, ValueError):
    """Monte Carlo or quadrature configuration is invalid or missing."""


class NumericError(KappaError, ArithmeticError):
    """A numerical routine failed to reach its stated accuracy."""
