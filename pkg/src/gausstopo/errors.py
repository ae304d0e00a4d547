"""Exception hierarchy.

``DomainError`` subclasses signal a physically meaningful failure of the input
(gap closing, broken symmetry, unconverged path) as opposed to a malformed
request; the CLI maps them to exit code 1.
"""


class DomainError(Exception):
    """Input is well-formed but violates a physical precondition."""


class GapError(DomainError):
    def __init__(self, message: str, k=None, value: float | None = None):
        super().__init__(message)
        self.k = k
        self.value = value


class SymmetryError(DomainError):
    pass


class ConvergenceError(DomainError):
    def __init__(self, message: str, k=None, residual: float | None = None):
        super().__init__(message)
        self.k = k
        self.residual = residual


class DegenerateError(DomainError):
    pass


class ConfigError(ValueError):
    """Malformed configuration, model file or argument combination."""
