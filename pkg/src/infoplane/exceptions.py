"""Exception types shared across the package.

All validation-style failures derive from ValueError so callers that follow
the usual numpy/sklearn conventions can catch them without importing this
module.
"""


class ValidationError(ValueError):
    """An argument failed a documented precondition."""


class DimensionError(ValidationError):
    """Array shapes are inconsistent with each other or with a network."""


class SingularityError(ValidationError):
    """A covariance-like matrix has non-positive determinant.

    Raised by the closed-form Gaussian entropy when det(J S J^T + ridge I)
    is not strictly positive; the message suggests increasing the ridge.
    """


class DumpFormatError(ValidationError):
    """A dump directory violates the on-disk format contract."""


class UnsupportedVersionError(DumpFormatError):
    """Manifest version is not one this library can read."""


class DumpCorruptionError(DumpFormatError):
    """A referenced binary file has the wrong byte length."""
