"""Exception hierarchy shared by all kdivlab modules."""

from __future__ import annotations


class KdivError(Exception):
    """Base class for every error raised by kdivlab."""


class NumericalError(KdivError):
    """A numerical routine could not produce a trustworthy answer."""


class NonFinite(NumericalError):
    """An integrand or objective evaluated to NaN or an infinity."""


class Budget(NumericalError):
    """An iteration budget was exhausted before the tolerance was met."""


class NoBracket(NumericalError):
    """A root-finder was handed an interval without a sign change."""


class NoRoot(NumericalError):
    """No sign change was found while scanning for a root."""


class Infeasible(NumericalError):
    """A feasibility bisection failed even at the upper end of its bracket."""


class DomainError(KdivError, ValueError):
    """An argument lies outside the domain of an operation."""


class OutOfDomain(DomainError):
    pass


class BadAlpha(DomainError):
    pass


class BadParam(DomainError):
    pass


class BadInput(DomainError):
    pass


class DomainMismatch(DomainError):
    pass


class DegenerateCase(DomainError):
    pass


class StructureViolation(KdivError):
    """A reconstructed object fails one of its structural postconditions."""
