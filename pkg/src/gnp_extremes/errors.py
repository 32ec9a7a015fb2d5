"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(ValueError):
    """The operation is well defined but its stated guarantee does not apply.

    Raised e.g. for the Uspensky bound when ``npq < 25`` and by the
    enumeration oracle when ``n`` exceeds the cost guard.
    """
