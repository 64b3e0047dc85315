"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class AsymprodError(Exception):
    """Base class for all errors raised by asymprod."""


class EvaluationDomainError(AsymprodError, ValueError):
    """A function produced a non-finite value, or was called outside its domain."""


class KindMismatchError(AsymprodError, TypeError):
    """An operation received a function of the wrong class (S versus C)."""


class ClosureViolationError(AsymprodError):
    """A combinator produced a function that fails to re-classify as expected."""


class NoValidEpsilonError(AsymprodError):
    """No positive epsilon satisfies positivity and concavity at the scan resolution."""


class InvalidParamsError(AsymprodError, ValueError):
    """Product parameters or an experiment configuration are invalid."""


class PreconditionError(AsymprodError, ValueError):
    """A documented precondition of an operation does not hold."""


class HypothesisViolationError(AsymprodError):
    """The analytic hypotheses (positivity, concavity) fail on the data at hand."""


class ResourceLimitError(AsymprodError):
    """A computation would exceed its configured size cap."""


class UnsupportedInputError(AsymprodError, TypeError):
    """The input type is not supported by an exact computation path."""


class FitError(AsymprodError):
    """A least-squares fit cannot be carried out on the given series."""
