"""Exception hierarchy shared across the package.

Two broad families matter to callers: input problems (malformed values vs.
values outside the mathematical domain of an operation) and computation
failures (empty strata, zero denominators, failed constructions). The CLI
maps the first family to exit code 2 and the second to exit code 1; the
HTTP service maps them to 400/422 respectively.
"""


class SelBoundsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(SelBoundsError):
    """Malformed input: wrong shape, non-binary column, unparseable file."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class ParameterDomainError(SelBoundsError):
    """Well-formed input outside an operation's domain (e.g. a risk ratio < 1)."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class UnsupportedEstimandError(ParameterDomainError):
    """The requested estimand is not covered by this operation."""


class SharpnessConditionError(ParameterDomainError):
    """Attainment construction rejected: the bounding factor exceeds the
    reciprocal of the control-arm success probability, so the construction's
    outcome probabilities would exceed 1."""


class DegenerateStratumError(SelBoundsError):
    """A conditioning event has probability zero (or an empty data cell)."""


class ZeroProbabilityError(SelBoundsError):
    """A denominator probability is exactly zero; the message names it."""


class ConstructionError(SelBoundsError):
    """The epsilon search for a constructive distribution failed."""
