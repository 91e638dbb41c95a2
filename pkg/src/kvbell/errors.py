"""Exception hierarchy shared across the package.

Each class maps to a distinct CLI exit code so shell callers can tell
bad input, refused problem sizes, and numerical trouble apart.
"""


class KvBellError(Exception):
    """Base class for package-level errors."""

    exit_code = 1


class ValidationError(KvBellError):
    """Arguments are malformed or outside the documented domain."""

    exit_code = 2


class GuardError(KvBellError):
    """The request is well formed but exceeds a documented size guard."""

    exit_code = 3


class NumericalError(KvBellError):
    """A numerical routine lost too much precision to certify its result."""

    exit_code = 4
