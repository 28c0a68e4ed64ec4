"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class QuadclassError(Exception):
    """Base class for all library errors."""


class DomainError(QuadclassError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class ScaleLimit(QuadclassError):
    """A configured computational bound would be exceeded."""


class NotRepresentable(DomainError):
    """The prime is inert, so no form of that norm exists."""


class CertificationFailure(QuadclassError):
    """The analytic class number interval could not be pinned to one value."""


class InvalidExponent(DomainError):
    """The supplied exponent does not annihilate the element."""
