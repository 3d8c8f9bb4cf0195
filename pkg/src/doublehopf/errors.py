"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: configuration problems exit with 2,
mathematical degeneracies with 3 and numerical failures with 4.
"""


class DoubleHopfError(Exception):
    """Base class for all errors raised by the package."""


class ConfigError(DoubleHopfError, ValueError):
    """Malformed coefficient file, run configuration or argument."""


class InvalidResonanceError(ConfigError):
    """The pair (l1, l2) is not a weak, coprime resonance."""


class DegeneracyError(DoubleHopfError):
    """A mathematical degeneracy prevents the computation."""


class SingularCoefficientsError(DegeneracyError, ZeroDivisionError):
    """The matrix P is singular."""


class DegenerateParameterError(DegeneracyError, ValueError):
    """The parameter point lies on a bifurcation curve."""


class DomainError(DegeneracyError, ValueError):
    """Input outside the domain where the quantity is defined."""


class IntegrationError(DoubleHopfError, RuntimeError):
    """Numerical integration failed."""


class StiffnessError(IntegrationError):
    """Step size underflow."""


class DivergenceError(IntegrationError):
    """The state became non-finite."""
