"""Exception taxonomy shared by the library, the service, and the CLI.

The service maps these onto HTTP status codes and the CLI onto distinct
exit codes, so raising the right class matters at every layer.
"""


class OptscapeError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(OptscapeError):
    """Invalid parameters, dimension mismatches, or unsupported combinations."""


class DataError(OptscapeError):
    """Missing, malformed, or inconsistent data files."""


class NumericalError(OptscapeError):
    """An iterative procedure failed to reach its tolerance.

    ``best`` carries the best iterate found so far, when one exists.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class InfeasibleSolutionError(OptscapeError):
    """A decision vector violates its problem family's constraints."""
