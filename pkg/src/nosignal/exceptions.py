"""Exception hierarchy.

Three failure classes are distinguished because the CLI maps them to
different exit codes: malformed structure (shapes, dimensions), values
outside an operation's domain, and violated input contracts.
"""


class NoSignalError(Exception):
    """Base class for all errors raised by this package."""


class StructureError(NoSignalError, ValueError):
    """Shapes or subsystem dimensions do not fit together."""


class SizeError(StructureError):
    """Result would exceed the 16x16 workspace limit."""


class DomainError(NoSignalError, ValueError):
    """A parameter lies outside the operation's domain (e.g. |s| > 1)."""


class ContractError(NoSignalError, ValueError):
    """An input violates a documented precondition (e.g. non-Hermitian, mixed)."""
