"""Exception classes shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain of a formula."""


class VacuumError(DomainError):
    """The height field touched or crossed zero."""


class PreconditionError(ValueError):
    """Hypothesis of a theorem or comparison ODE is not met."""


class NoPredictionError(PreconditionError):
    """Neither blow-up criterion applies to the given data."""


class NumericalFailure(RuntimeError):
    """NaN/Inf or a two-sided gradient divergence inside a run."""


class BoundaryContact(RuntimeError):
    """The perturbation support reached the edge of the computational window."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""
