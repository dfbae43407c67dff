class DomainError(ValueError):
    """An argument lies outside the supported domain of an operation."""


class NumericalError(ArithmeticError):
    """A series or quadrature failed to converge within its budget."""


class SamplingError(RuntimeError):
    """A rejection sampler exhausted its attempt budget."""
