"""Exception types shared across the package.

The CLI maps these onto distinct exit codes: configuration / schema
problems exit 2, regime and domain violations exit 3, verification
failures exit 1.
"""


class DomainError(ValueError):
    """An input lies outside the physical domain of an operation."""


class ConfigError(ValueError):
    """A scenario configuration is malformed or violates its schema."""


class RegimeError(RuntimeError):
    """A closed-form approximation is evaluated outside its validity regime."""


class QuadratureError(RuntimeError):
    """Numerical quadrature failed to converge to the requested tolerance."""

    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate


class ExtractionError(RuntimeError):
    """A coherence length could not be extracted from the supplied grids."""
