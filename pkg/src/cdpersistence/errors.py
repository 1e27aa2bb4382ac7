"""Exception hierarchy shared by all modules.

Each class carries the CLI exit code used when it escapes a subcommand.
"""


class CDPersistenceError(Exception):
    exit_code = 1


class ConfigError(CDPersistenceError, ValueError):
    exit_code = 2


class InvalidShape(ConfigError):
    pass


class DimensionMismatch(ConfigError):
    pass


class BasisMismatch(ConfigError):
    pass


class InsufficientIntervals(ConfigError):
    pass


class OutOfDomain(ConfigError):
    pass


class NonFiniteValue(ConfigError):
    pass


class InvalidFiltration(ConfigError):
    pass


class DegenerateSampleSet(CDPersistenceError):
    """Moment matrix is (numerically) singular: samples lie on a low-degree hypersurface."""

    exit_code = 3


class ResourceLimit(CDPersistenceError):
    exit_code = 4


class ParseError(CDPersistenceError):
    exit_code = 5
