"""Exception hierarchy shared by all polyspace modules."""


class PolyspaceError(Exception):
    """Base class for every error raised by this package."""


class DomainError(PolyspaceError, ValueError):
    """An argument lies outside the domain of the operation."""


class CapacityError(PolyspaceError):
    """The request exceeds an enumeration or sampling cap."""


class GenericityError(DomainError):
    """A formula that needs a generic length vector got one lying on a wall."""


class EmptinessError(DomainError):
    """The polygon space is empty or degenerate."""
