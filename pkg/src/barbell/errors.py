"""Exception types shared across the package."""


class BarbellError(Exception):
    """Base class for all package-specific errors."""


class DomainError(BarbellError, ValueError):
    """A potential was evaluated outside its admissible squared-radius range."""


class DegenerateInput(BarbellError, ValueError):
    """An input is too degenerate to process (e.g. a zero link vector)."""


class ConstraintViolation(BarbellError, ValueError):
    """A state claimed to lie on the constraint manifold does not."""


class LocalizationError(BarbellError, ValueError):
    """Evaluation outside the localization chart (first invariant near zero)."""


class SingularDenominator(BarbellError, ValueError):
    """A closed-form equilibrium expression has a vanishing denominator."""


class NotApplicable(BarbellError, ValueError):
    """An operation's hypotheses are not met by the supplied model."""


class StepSizeUnderflow(BarbellError, RuntimeError):
    """The adaptive integrator could not make progress."""


class ConvergenceFailure(BarbellError, RuntimeError):
    """An iterative numerical routine failed to converge."""


class ConfigError(BarbellError, ValueError):
    """A run configuration is malformed."""
