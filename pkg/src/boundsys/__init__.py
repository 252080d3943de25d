"""Boundary-system calculus for linear relations and Laplacians on metric graphs."""

from boundsys.errors import (
    BoundsysError,
    CardinalityError,
    ClassificationError,
    CommensurabilityError,
    CompatibilityError,
    ConsistencyError,
    DimensionError,
    FieldError,
    GraphError,
    InputError,
    InvariantError,
    NotHermitianError,
    NotUnitaryError,
    SurjectivityError,
)

__version__ = "0.1.0"
