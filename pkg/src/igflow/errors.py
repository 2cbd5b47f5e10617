"""Exception types shared across the package."""


class IgflowError(Exception):
    """Base class for all igflow errors."""


class ConfigError(IgflowError, ValueError):
    """Invalid configuration, parameters, or input files."""


class DomainError(IgflowError, ValueError):
    """State outside the admissible domain of a model or operation."""


class UnsupportedModelError(ConfigError):
    """Operation needs a built-in model family (no closed form is known)."""


class IntegrationError(IgflowError, RuntimeError):
    """Numerical integration failed.

    Carries the last parameter value and state vector that were still valid,
    so callers can report where the run broke down.
    """

    def __init__(self, message, last_param=None, last_state=None):
        super().__init__(message)
        self.last_param = last_param
        self.last_state = last_state
