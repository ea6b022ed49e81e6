"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: argument/parameter problems exit 2,
enumeration-guard refusals exit 3.
"""


class MtlimitsError(Exception):
    """Base class for all package errors."""


class DomainError(MtlimitsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DimensionError(DomainError):
    """Mismatched support sizes or vector lengths."""


class ParameterError(DomainError):
    """A scenario builder was asked for mathematically invalid parameters
    (for example a probability outside [0, 1])."""


class GuardRefusal(MtlimitsError):
    """An exact enumeration would exceed its configured size guard.

    Carries a human-readable message naming the limit that was hit.
    """


class EmptyIntersectionError(MtlimitsError):
    """Bernstein-ball intersection is empty; carries the full ball report."""

    def __init__(self, report):
        super().__init__("intersection of per-task confidence balls is empty")
        self.report = report
