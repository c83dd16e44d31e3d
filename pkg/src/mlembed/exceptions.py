"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Shapes or lengths of inputs do not agree."""


class DomainError(ValueError):
    """An input value lies outside its admissible range (e.g. a negative weight)."""


class SingularLaplacianError(ArithmeticError):
    """A Laplacian is (numerically) singular beyond its constant nullspace.

    Raised for disconnected graphs where a pseudoinverse or effective
    resistance is requested.
    """

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class NumericalError(ArithmeticError):
    """A numerical routine failed to converge."""


class RankError(ValueError):
    """A matrix expected to have full column rank does not."""


class ParseError(ValueError):
    """Malformed input file. Carries the file path and 1-based line number."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""
