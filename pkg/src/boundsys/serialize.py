"""JSON encoding of matrices.

Matrices are row-major nested lists.  Complex entries are ``[re, im]`` pairs;
the field tag (``"real"`` or ``"complex"``) travels alongside so that empty
matrices and all-real complex data decode to the right dtype.
"""

import json

import numpy as np

from boundsys.errors import FieldError, InputError


def field_of(*arrays):
    return "complex" if any(np.iscomplexobj(a) for a in arrays) else "real"


def dtype_of(field):
    if field == "real":
        return np.float64
    if field == "complex":
        return np.complex128
    raise FieldError(f"unknown field tag {field!r}; expected 'real' or 'complex'")


def encode_matrix(a, field=None):
    a = np.asarray(a)
    field = field or field_of(a)
    if a.ndim != 2:
        raise InputError(f"expected a 2-d matrix, got shape {a.shape}")
    if field == "complex":
        return [[[float(z.real), float(z.imag)] for z in row] for row in a.astype(complex)]
    if np.iscomplexobj(a):
        raise FieldError("complex matrix tagged as real")
    return [[float(x) for x in row] for row in a]


def decode_matrix(obj, field, n_rows=None):
    """Inverse of :func:`encode_matrix`.

    ``n_rows`` is only needed to disambiguate a matrix with zero rows.
    """
    dtype = dtype_of(field)
    if not isinstance(obj, list):
        raise InputError("matrix must be a list of rows")
    if len(obj) == 0:
        return np.zeros((n_rows or 0, 0), dtype=dtype)
    rows = []
    width = None
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise InputError(f"matrix row {i} is not a list")
        if field == "complex":
            vals = []
            for z in row:
                if isinstance(z, (int, float)):
                    vals.append(complex(z))
                elif isinstance(z, list) and len(z) == 2:
                    vals.append(complex(z[0], z[1]))
                else:
                    raise InputError(f"complex entry in row {i} must be [re, im], got {z!r}")
        else:
            vals = []
            for z in row:
                if not isinstance(z, (int, float)) or isinstance(z, bool):
                    raise InputError(f"real entry in row {i} must be a number, got {z!r}")
                vals.append(float(z))
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise InputError(f"ragged matrix: row {i} has {len(vals)} entries, expected {width}")
        rows.append(vals)
    return np.array(rows, dtype=dtype).reshape(len(rows), width)


def load_json(path):
    """Read JSON from ``path``; decode errors become :class:`InputError` with line info."""
    with open(path) as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
