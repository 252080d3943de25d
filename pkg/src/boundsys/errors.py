"""Exception hierarchy.

Two families: :class:`InputError` for malformed or mismatched input, and
:class:`InvariantError` for inputs that are well formed but violate a
mathematical requirement (not Hermitian, not unitary, ...).  The CLI maps
them to exit codes 1 and 2.
"""


class BoundsysError(Exception):
    pass


class InputError(BoundsysError, ValueError):
    pass


class DimensionError(InputError):
    pass


class FieldError(InputError):
    """Raised when real and complex data are mixed in one computation."""


class InvariantError(BoundsysError):
    pass


class ClassificationError(InvariantError):
    """The relation does not have the property an operation requires."""


class ConsistencyError(InvariantError):
    """An internal consistency check failed (should be impossible for valid input)."""


class NotHermitianError(InvariantError):
    pass


class NotUnitaryError(InvariantError):
    pass


class SurjectivityError(InvariantError):
    pass


class CompatibilityError(InvariantError):
    pass


class GraphError(InvariantError):
    pass


class CardinalityError(InvariantError):
    pass


class CommensurabilityError(InvariantError):
    pass
