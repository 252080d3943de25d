"""Finite-dimensional subspaces, sesquilinear forms and linear relations.

Everything is represented by orthonormal bases.  A linear relation
``M ⊆ K^n1 ⊕ K^n2`` is a :class:`Subspace` of ``K^(n1+n2)`` whose first
``n1`` coordinates are the first component.

Sesquilinear forms are linear in the first and conjugate-linear in the
second argument, ``w(x, y) = y^H G x``.  With this convention the three
standard forms on ``H ⊕ H`` have Gram matrices

    skew        [[0, -I], [I, 0]]     w((x,y),(u,v)) = <x,v> - <y,u>
    symmetric   [[0,  I], [I, 0]]     w((x,y),(u,v)) = <x,v> + <y,u>
    unitary     [[I,  0], [0, -I]]    w((x,y),(u,v)) = <x,u> - <y,v>

and their self-orthogonal subspaces are exactly the self-adjoint,
skew-self-adjoint and unitary relations.
"""

from dataclasses import dataclass, field as dc_field
from enum import Enum
from itertools import combinations

import numpy as np

from boundsys.errors import (
    ClassificationError,
    CompatibilityError,
    ConsistencyError,
    DimensionError,
    FieldError,
    InputError,
    NotHermitianError,
    SurjectivityError,
)
from boundsys.serialize import decode_matrix, dtype_of, encode_matrix

DEFAULT_TOL = 1e-10
_EPS = np.finfo(float).eps


class ScalarField(str, Enum):
    REAL = "real"
    COMPLEX = "complex"

    @classmethod
    def of(cls, *arrays):
        return cls.COMPLEX if any(np.iscomplexobj(a) for a in arrays) else cls.REAL

    @property
    def dtype(self):
        return dtype_of(self.value)


def _rank(s, shape, tol):
    if s.size == 0 or s[0] == 0.0:
        return 0
    cutoff = max(tol, max(shape) * _EPS) * s[0]
    return int(np.count_nonzero(s > cutoff))


def null_space(a, tol=DEFAULT_TOL):
    """Orthonormal basis of ``ker a`` (columns)."""
    a = np.asarray(a)
    m, n = a.shape
    if m == 0 or n == 0:
        return np.eye(n, dtype=a.dtype if n else float)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    r = _rank(s, a.shape, tol)
    return vh[r:].conj().T


def _herm(a):
    return a.conj().T


def _require_same_field(*objs):
    fields = {o.field for o in objs}
    if len(fields) > 1:
        raise FieldError("cannot mix real and complex data in one computation")


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace of ``K^m`` held as an ``m x k`` orthonormal basis."""

    basis: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        b = np.array(self.basis)
        if b.ndim != 2 or b.shape[0] < 1:
            raise DimensionError(f"basis must be a 2-d array with at least one row, got {b.shape}")
        if not np.issubdtype(b.dtype, np.complexfloating):
            b = b.astype(float)
        k = b.shape[1]
        if k > b.shape[0]:
            raise DimensionError("more basis vectors than ambient dimension")
        if k:
            err = np.abs(_herm(b) @ b - np.eye(k)).max()
            if err > max(self.tol, 1e-12):
                raise InputError(f"basis is not orthonormal (deviation {err:.2e})")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @classmethod
    def span(cls, vectors, rcond=None, tol=DEFAULT_TOL, field=None):
        """Subspace spanned by the columns of ``vectors``.

        The rank cutoff is ``rcond * sigma_max`` with ``rcond`` defaulting to
        ``max(shape) * eps``.
        """
        a = np.asarray(vectors)
        if field is not None:
            a = a.astype(ScalarField(field).dtype)
        elif not np.iscomplexobj(a):
            a = a.astype(float)
        if a.ndim == 1:
            a = a[:, None]
        m, k = a.shape
        if k == 0:
            return cls(np.zeros((m, 0), dtype=a.dtype), tol)
        u, s, _ = np.linalg.svd(a, full_matrices=False)
        if rcond is None:
            r = _rank(s, a.shape, 0.0)
        else:
            r = int(np.count_nonzero(s > rcond * s[0])) if s[0] > 0 else 0
        return cls(u[:, :r], tol)

    @classmethod
    def zero(cls, m, field="real"):
        return cls(np.zeros((m, 0), dtype=ScalarField(field).dtype))

    @classmethod
    def full(cls, m, field="real"):
        return cls(np.eye(m, dtype=ScalarField(field).dtype))

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def field(self):
        return ScalarField.of(self.basis)

    def projector(self):
        return self.basis @ _herm(self.basis)

    def residual(self, vectors):
        """Spectral norm of the part of ``vectors`` outside this subspace."""
        v = np.asarray(vectors)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[1] == 0:
            return 0.0
        r = v - self.basis @ (_herm(self.basis) @ v)
        return float(np.linalg.norm(r, 2))

    def contains(self, other, tol=None):
        tol = self.tol if tol is None else tol
        _check_ambient(self, other)
        return self.residual(other.basis) <= tol

    def distance(self, other):
        """Sine of the largest principal angle; 1.0 when dimensions differ."""
        _check_ambient(self, other)
        if self.dim != other.dim:
            return 1.0
        if self.dim == 0:
            return 0.0
        return max(self.residual(other.basis), other.residual(self.basis))

    def equals(self, other, tol=None):
        tol = self.tol if tol is None else tol
        return self.distance(other) <= tol

    def complement(self):
        """Orthogonal complement with respect to the standard inner product."""
        if self.dim == 0:
            return Subspace(np.eye(self.ambient_dim, dtype=self.basis.dtype), self.tol)
        return Subspace(null_space(_herm(self.basis), self.tol), self.tol)

    def intersect(self, other):
        _check_ambient(self, other)
        _require_same_field(self, other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim, self.field)
        stacked = np.hstack([self.basis, -other.basis])
        coeffs = null_space(stacked, self.tol)
        return Subspace.span(self.basis @ coeffs[: self.dim], tol=self.tol)

    def sum(self, other):
        _check_ambient(self, other)
        _require_same_field(self, other)
        return Subspace.span(np.hstack([self.basis, other.basis]), rcond=self.tol, tol=self.tol)

    def image(self, matrix):
        matrix = np.asarray(matrix)
        if matrix.shape[1] != self.ambient_dim:
            raise DimensionError(f"matrix has {matrix.shape[1]} columns, subspace lives in K^{self.ambient_dim}")
        if self.dim == 0:
            return Subspace.zero(matrix.shape[0], ScalarField.of(matrix, self.basis))
        return Subspace.span(matrix @ self.basis, rcond=self.tol, tol=self.tol)

    def preimage(self, matrix):
        """``{x : matrix @ x in self}``."""
        matrix = np.asarray(matrix)
        if matrix.shape[0] != self.ambient_dim:
            raise DimensionError(f"matrix has {matrix.shape[0]} rows, subspace lives in K^{self.ambient_dim}")
        outside = np.eye(self.ambient_dim) - self.projector()
        return Subspace(null_space(outside @ matrix, self.tol), self.tol)

    def to_dict(self):
        return {
            "type": "Subspace",
            "field": self.field.value,
            "ambient_dim": self.ambient_dim,
            "basis": encode_matrix(self.basis, self.field.value),
        }

    @classmethod
    def from_dict(cls, d, tol=DEFAULT_TOL):
        field = d.get("field", "real")
        m = int(d["ambient_dim"])
        basis = decode_matrix(d["basis"], field, n_rows=m)
        if basis.shape[0] != m:
            raise DimensionError(f"basis has {basis.shape[0]} rows, ambient_dim is {m}")
        if d.get("orthonormal", True):
            return cls(basis, tol)
        return cls.span(basis, tol=tol, field=field)


def _check_ambient(a, b):
    if a.ambient_dim != b.ambient_dim:
        raise DimensionError(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")


@dataclass(frozen=True, eq=False)
class SesquilinearForm:
    """``w(x, y) = y^H @ gram @ x``."""

    gram: np.ndarray
    kind: str = "general"  # "general" | "symmetric" | "skew"
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        g = np.array(self.gram)
        if not np.iscomplexobj(g):
            g = g.astype(float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimensionError(f"Gram matrix must be square, got {g.shape}")
        if self.kind == "symmetric" and np.abs(g - _herm(g)).max(initial=0) > self.tol:
            raise NotHermitianError("form declared symmetric but Gram matrix is not Hermitian")
        if self.kind == "skew" and np.abs(g + _herm(g)).max(initial=0) > self.tol:
            raise NotHermitianError("form declared skew-symmetric but Gram matrix is not skew-Hermitian")
        if self.kind not in ("general", "symmetric", "skew"):
            raise InputError(f"unknown form kind {self.kind!r}")
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)

    @property
    def dim(self):
        return self.gram.shape[0]

    @property
    def field(self):
        return ScalarField.of(self.gram)

    def __call__(self, x, y):
        return np.vdot(y, self.gram @ x)

    @classmethod
    def standard_skew(cls, n, field="real"):
        dt = ScalarField(field).dtype
        i, z = np.eye(n, dtype=dt), np.zeros((n, n), dtype=dt)
        return cls(np.block([[z, -i], [i, z]]), "skew")

    @classmethod
    def standard_symmetric(cls, n, field="real"):
        dt = ScalarField(field).dtype
        i, z = np.eye(n, dtype=dt), np.zeros((n, n), dtype=dt)
        return cls(np.block([[z, i], [i, z]]), "symmetric")

    @classmethod
    def standard_unitary(cls, n1, n2=None, field="real"):
        n2 = n1 if n2 is None else n2
        dt = ScalarField(field).dtype
        g = np.zeros((n1 + n2, n1 + n2), dtype=dt)
        g[:n1, :n1] = np.eye(n1)
        g[n1:, n1:] = -np.eye(n2)
        return cls(g, "symmetric")

    def to_dict(self):
        return {
            "type": "SesquilinearForm",
            "field": self.field.value,
            "kind": self.kind,
            "gram": encode_matrix(self.gram, self.field.value),
        }

    @classmethod
    def from_dict(cls, d, tol=DEFAULT_TOL):
        field = d.get("field", "real")
        return cls(decode_matrix(d["gram"], field), d.get("kind", "general"), tol)


def _check_form(u, w):
    if u.ambient_dim != w.dim:
        raise DimensionError(f"subspace lives in K^{u.ambient_dim}, form acts on K^{w.dim}")
    if u.field != w.field:
        raise FieldError("subspace and form are over different fields")


def form_orthogonal_complement(u, w):
    """``{x : w(x, y) = 0 for all y in u}``, the kernel of ``basis^H @ gram``."""
    _check_form(u, w)
    if u.dim == 0:
        return Subspace.full(u.ambient_dim, u.field)
    return Subspace(null_space(_herm(u.basis) @ w.gram, u.tol), u.tol)


def is_self_orthogonal(u, w, tol=None):
    return form_orthogonal_complement(u, w).equals(u, tol)


def is_self_orthogonal_within(u, ambient, w, tol=None):
    """Self-orthogonality of ``u`` inside ``ambient`` for the restriction of ``w``.

    True iff ``u ⊆ ambient`` and ``u^{⊥w} ∩ ambient = u``.
    """
    if not ambient.contains(u, tol):
        return False
    return form_orthogonal_complement(u, w).intersect(ambient).equals(u, tol)


@dataclass(frozen=True, eq=False)
class LinearRelation:
    """Subspace of ``K^n1 ⊕ K^n2``."""

    dims: tuple
    space: Subspace

    def __post_init__(self):
        n1, n2 = (int(d) for d in self.dims)
        if n1 < 0 or n2 < 0:
            raise DimensionError("relation dimensions must be nonnegative")
        if self.space.ambient_dim != n1 + n2:
            raise DimensionError(f"space lives in K^{self.space.ambient_dim}, expected K^{n1 + n2}")
        object.__setattr__(self, "dims", (n1, n2))

    @classmethod
    def from_pairs(cls, first, second, tol=DEFAULT_TOL):
        """Relation spanned by the pairs ``(first[:, j], second[:, j])``."""
        first, second = np.atleast_2d(first), np.atleast_2d(second)
        if first.shape[1] != second.shape[1]:
            raise DimensionError("need as many first components as second components")
        stacked = np.vstack([first, second])
        return cls((first.shape[0], second.shape[0]), Subspace.span(stacked, tol=tol))

    @classmethod
    def graph(cls, a, tol=DEFAULT_TOL):
        """``{(x, a x)}``."""
        a = np.atleast_2d(np.asarray(a))
        n2, n1 = a.shape
        return cls.from_pairs(np.eye(n1, dtype=a.dtype), a, tol)

    @classmethod
    def multivalued_part(cls, n, field="real", tol=DEFAULT_TOL):
        """``{0} ⊕ K^n``."""
        dt = ScalarField(field).dtype
        return cls.from_pairs(np.zeros((n, n), dtype=dt), np.eye(n, dtype=dt), tol)

    @property
    def basis(self):
        return self.space.basis

    @property
    def first(self):
        return self.basis[: self.dims[0]]

    @property
    def second(self):
        return self.basis[self.dims[0]:]

    @property
    def field(self):
        return self.space.field

    @property
    def tol(self):
        return self.space.tol

    @property
    def is_square(self):
        return self.dims[0] == self.dims[1]

    def equals(self, other, tol=None):
        return self.dims == other.dims and self.space.equals(other.space, tol)

    def contains(self, other, tol=None):
        return self.dims == other.dims and self.space.contains(other.space, tol)

    def _with_basis(self, basis, dims=None):
        return LinearRelation(dims or self.dims, Subspace(basis, self.tol))

    def to_dict(self):
        d = self.space.to_dict()
        d.update(type="LinearRelation", dims=list(self.dims))
        return d

    @classmethod
    def from_dict(cls, d, tol=DEFAULT_TOL):
        field = d.get("field", "real")
        if "graph_of" in d:
            return cls.graph(decode_matrix(d["graph_of"], field), tol)
        n1, n2 = (int(x) for x in d["dims"])
        sub = Subspace.from_dict({**d, "ambient_dim": n1 + n2}, tol)
        return cls((n1, n2), sub)


def relation_inverse(m):
    n1, _ = m.dims
    return m._with_basis(np.vstack([m.basis[n1:], m.basis[:n1]]), m.dims[::-1])


def relation_orthogonal(m):
    return LinearRelation(m.dims, m.space.complement())


def s_multiply(m):
    """Apply ``S = diag(1, -1)``, i.e. negate the second component."""
    if not m.is_square:
        raise DimensionError(f"S acts on H ⊕ H only; relation has dims {m.dims}")
    n1, _ = m.dims
    b = m.basis.copy()
    b[n1:] *= -1
    return m._with_basis(b)


def relation_adjoint(m):
    """``M* = {(y, x) : <y, v> = <x, u> for all (u, v) in M}``.

    Computed directly from the defining equations: each basis pair
    ``(u, v)`` contributes the row ``[v^H, -u^H]`` acting on ``(y, x)``.
    """
    n1, n2 = m.dims
    dt = m.basis.dtype
    if m.space.dim == 0:
        return LinearRelation((n2, n1), Subspace(np.eye(n1 + n2, dtype=dt), m.tol))
    rows = np.hstack([_herm(m.second), -_herm(m.first)])
    return LinearRelation((n2, n1), Subspace(null_space(rows, m.tol), m.tol))


def _second_component_part(m):
    """``{y : (0, y) in M}`` as a subspace of ``K^n2``."""
    n1, n2 = m.dims
    dt = m.basis.dtype
    axis = np.vstack([np.zeros((n1, n2), dtype=dt), np.eye(n2, dtype=dt)])
    inter = m.space.intersect(Subspace(axis, m.tol))
    return Subspace.span(inter.basis[n1:], rcond=m.tol, tol=m.tol) if inter.dim else Subspace.zero(n2, m.field)


@dataclass(frozen=True)
class Classification:
    """Flags for a linear relation.

    The four flags that only make sense on ``H ⊕ H`` are ``None`` for
    non-square relations; :meth:`require` raises in that case.
    """

    symmetric: object
    self_adjoint: object
    skew_symmetric: object
    skew_self_adjoint: object
    unitary: bool
    is_operator_graph: bool
    domain_dim: int
    # self-orthogonality under the three standard forms, computed independently
    self_orthogonal_skew: object
    self_orthogonal_symmetric: object
    self_orthogonal_unitary: bool

    def require(self, name):
        value = getattr(self, name)
        if value is None:
            raise DimensionError(f"flag {name!r} needs a relation on H ⊕ H")
        return value

    def flags(self):
        names = ("symmetric", "self_adjoint", "skew_symmetric", "skew_self_adjoint", "unitary", "is_operator_graph")
        return {n: getattr(self, n) for n in names if getattr(self, n) is not None}


def classify(m, tol=None):
    tol = m.tol if tol is None else tol
    adj = relation_adjoint(m)
    inv = relation_inverse(m)
    n1, n2 = m.dims
    unitary = adj.equals(inv, tol)
    mv = _second_component_part(m)
    domain_dim = int(np.linalg.matrix_rank(m.first, tol=tol)) if m.space.dim and n1 else 0
    so_unit = is_self_orthogonal(m.space, SesquilinearForm.standard_unitary(n1, n2, m.field.value), tol)
    if m.is_square:
        s_adj = s_multiply(adj)
        sym = adj.contains(m, tol)
        sa = adj.equals(m, tol)
        skew_sym = s_adj.contains(m, tol)
        ssa = s_adj.equals(m, tol)
        so_skew = is_self_orthogonal(m.space, SesquilinearForm.standard_skew(n1, m.field.value), tol)
        so_sym = is_self_orthogonal(m.space, SesquilinearForm.standard_symmetric(n1, m.field.value), tol)
    else:
        sym = sa = skew_sym = ssa = so_skew = so_sym = None
    return Classification(
        symmetric=sym,
        self_adjoint=sa,
        skew_symmetric=skew_sym,
        skew_self_adjoint=ssa,
        unitary=unitary,
        is_operator_graph=mv.dim == 0,
        domain_dim=domain_dim,
        self_orthogonal_skew=so_skew,
        self_orthogonal_symmetric=so_sym,
        self_orthogonal_unitary=so_unit,
    )


FLAVORS = ("self_adjoint", "skew_self_adjoint")


@dataclass(frozen=True, eq=False)
class LagrangianData:
    """``(X, L)`` with ``U = G(L) ⊕ ({0} ⊕ X^⊥)``; ``L`` is given in X-basis coordinates."""

    X: Subspace
    L: np.ndarray
    flavor: str = "self_adjoint"

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise InputError(f"flavor must be one of {FLAVORS}, got {self.flavor!r}")
        d = self.X.dim
        L = np.asarray(self.L)
        if L.size != d * d:
            raise DimensionError(f"L must be {d}x{d} to act on X, got shape {L.shape}")
        L = np.array(L, dtype=np.result_type(L, self.X.basis, float)).reshape(d, d)
        sign = 1 if self.flavor == "self_adjoint" else -1
        scale = max(1.0, float(np.abs(L).max(initial=0.0)))
        if np.abs(L - sign * _herm(L)).max(initial=0.0) > self.X.tol * scale:
            what = "Hermitian" if sign == 1 else "skew-Hermitian"
            raise NotHermitianError(f"L is not {what} (flavor {self.flavor})")
        L.setflags(write=False)
        object.__setattr__(self, "L", L)

    @property
    def field(self):
        return ScalarField.of(self.X.basis, self.L)

    def to_dict(self):
        f = self.field.value
        x = self.X.to_dict()
        if f == "complex" and x["field"] == "real":
            x = Subspace(self.X.basis.astype(complex)).to_dict()
        return {"type": "LagrangianData", "field": f, "flavor": self.flavor, "X": x, "L": encode_matrix(self.L, f)}

    @classmethod
    def from_dict(cls, d, tol=DEFAULT_TOL):
        field = d.get("field", "real")
        x = Subspace.from_dict(d["X"], tol)
        L = decode_matrix(d["L"], field, n_rows=x.dim)
        return cls(x, L, d.get("flavor", "self_adjoint"))


def arens_decompose(u, flavor="self_adjoint", tol=None):
    """Split a (skew-)self-adjoint relation into ``(X, L)``.

    ``X`` is the orthogonal complement of the multivalued part
    ``{y : (0, y) in U}`` and ``L`` is the operator whose graph is
    ``U ∩ (X ⊕ X)``.
    """
    if flavor not in FLAVORS:
        raise InputError(f"flavor must be one of {FLAVORS}, got {flavor!r}")
    if not u.is_square:
        raise DimensionError(f"relation must live in H ⊕ H, has dims {u.dims}")
    tol = u.tol if tol is None else tol
    cls = classify(u, tol)
    if not getattr(cls, flavor):
        raise ClassificationError(f"relation is not {flavor.replace('_', '-')}")
    n = u.dims[0]
    X = _second_component_part(u).complement()
    bx = X.basis
    d = X.dim
    z = np.zeros_like(bx)
    xx = Subspace(np.block([[bx, z], [z, bx]]), u.tol) if d else Subspace.zero(2 * n, u.field)
    g = u.space.intersect(xx)
    if g.dim != d:
        raise ConsistencyError(f"U ∩ (X ⊕ X) has dimension {g.dim}, expected dim X = {d}")
    if d == 0:
        return LagrangianData(X, np.zeros((0, 0), dtype=u.basis.dtype), flavor)
    a = _herm(bx) @ g.basis[:n]
    b = _herm(bx) @ g.basis[n:]
    L = np.linalg.solve(a.T, b.T).T
    sign = 1 if flavor == "self_adjoint" else -1
    L = 0.5 * (L + sign * _herm(L))
    return LagrangianData(X, L, flavor)


def arens_compose(data, n=None):
    """``G(L) ⊕ ({0} ⊕ X^⊥)`` as a relation in ``K^n ⊕ K^n``."""
    X = data.X
    if n is not None and n != X.ambient_dim:
        raise DimensionError(f"X lives in K^{X.ambient_dim}, requested ambient {n}")
    n = X.ambient_dim
    dt = np.result_type(X.basis, data.L, float)
    bx = X.basis.astype(dt)
    perp = X.complement().basis.astype(dt)
    graph_part = np.vstack([bx, bx @ data.L])
    mv_part = np.vstack([np.zeros_like(perp), perp])
    return LinearRelation((n, n), Subspace.span(np.hstack([graph_part, mv_part]), tol=X.tol))


def unitary_extract(u, tol=None):
    """Matrix ``L`` with ``U = G(L)`` for a self-orthogonal ``U`` under the unitary form."""
    tol = u.tol if tol is None else tol
    n1, n2 = u.dims
    w = SesquilinearForm.standard_unitary(n1, n2, u.field.value)
    if not is_self_orthogonal(u.space, w, tol):
        raise ClassificationError("relation is not self-orthogonal for the standard unitary form")
    if n1 != n2 or u.space.dim != n1:
        raise ConsistencyError(f"self-orthogonal relation with dims {u.dims} and dimension {u.space.dim}")
    L = np.linalg.solve(u.first.T, u.second.T).T
    err = np.linalg.norm(_herm(L) @ L - np.eye(n1), 2)
    if err > max(tol, 1e-8):
        raise ConsistencyError(f"extracted operator is not unitary (deviation {err:.2e})")
    return L


CAYLEY_VARIANTS = ("real_skew", "complex_symmetric")


def cayley_block(n, variant="real_skew"):
    """The unitary ``2n x 2n`` block matrix used by :func:`cayley_map`."""
    i = np.eye(n)
    if variant == "real_skew":
        return np.block([[i, i], [-i, i]]) / np.sqrt(2)
    if variant == "complex_symmetric":
        return np.block([[i, -1j * i], [-i, -1j * i]]) / np.sqrt(2)
    raise InputError(f"variant must be one of {CAYLEY_VARIANTS}, got {variant!r}")


def cayley_map(u, variant="real_skew"):
    """Apply the Cayley block matrix to ``U``.

    ``real_skew``: ``U`` skew-self-adjoint iff the image is a unitary graph.
    ``complex_symmetric`` (complex field only): ``U`` self-adjoint iff the
    image is a unitary graph.
    """
    if not u.is_square:
        raise DimensionError(f"Cayley map acts on H ⊕ H, relation has dims {u.dims}")
    if variant == "complex_symmetric" and u.field is not ScalarField.COMPLEX:
        raise FieldError("the self-adjoint Cayley correspondence needs a complex space")
    c = cayley_block(u.dims[0], variant)
    basis = c @ u.basis
    return LinearRelation(u.dims, Subspace(basis, u.tol))


def is_unitary_graph(m, tol=None):
    c = classify(m, tol)
    return bool(c.unitary and c.is_operator_graph)


def pullback(v, f, w1, w2, tol=DEFAULT_TOL):
    """``F^{-1}(V)`` for a surjective ``F`` intertwining ``w1`` and ``w2``."""
    f = np.asarray(f)
    if f.shape != (w2.dim, w1.dim):
        raise DimensionError(f"F must be {w2.dim}x{w1.dim}, got {f.shape}")
    if v.ambient_dim != w2.dim:
        raise DimensionError("V does not live in the target of F")
    s = np.linalg.svd(f, compute_uv=False)
    if _rank(s, f.shape, tol) < f.shape[0]:
        raise SurjectivityError(f"F has rank {_rank(s, f.shape, tol)} < {f.shape[0]}")
    res = compatibility_residual(f, w1, w2)
    if res > tol * max(1.0, float(np.abs(w1.gram).max(initial=0))):
        raise CompatibilityError(f"F^H w2 F differs from w1 by {res:.2e}")
    return v.preimage(f)


def compatibility_residual(f, w1, w2):
    return float(np.abs(_herm(f) @ w2.gram @ f - w1.gram).max(initial=0.0))


@dataclass(frozen=True)
class PullbackReport:
    passed: bool
    relation: frozenset
    self_orthogonal_source: list
    self_orthogonal_target: list
    preimages: list


def r_complement(u, points, relation):
    return frozenset(x for x in points if all((x, y) in relation for y in u))


def _subsets(points):
    pts = list(points)
    for k in range(len(pts) + 1):
        for c in combinations(pts, k):
            yield frozenset(c)


def finite_set_pullback_check(x1, x2, r2, f):
    """Brute-force check of the set-theoretic pullback statement.

    ``f`` maps ``x1`` onto ``x2``; ``R1 = (f x f)^{-1}(R2)``.  Every subset
    of ``x1`` and ``x2`` is enumerated.
    """
    x1, x2, r2 = list(x1), list(x2), set(r2)
    if len(x1) > 12 or len(x2) > 12:
        raise InputError("brute-force check is limited to 12 points per set")
    if any(x not in f for x in x1):
        raise InputError("F must be defined on every point of X1")
    if set(f[x] for x in x1) != set(x2):
        raise SurjectivityError("F is not surjective onto X2")
    r1 = frozenset((x, y) for x in x1 for y in x1 if (f[x], f[y]) in r2)
    so1 = [u for u in _subsets(x1) if r_complement(u, x1, r1) == u]
    so2 = [v for v in _subsets(x2) if r_complement(v, x2, r2) == v]
    pre = [frozenset(x for x in x1 if f[x] in v) for v in so2]
    return PullbackReport(set(so1) == set(pre), r1, so1, so2, pre)


@dataclass(frozen=True, eq=False)
class BoundarySystem:
    """Finite-dimensional stand-in for ``(Omega, G1, G2, F, omega)``."""

    Omega: SesquilinearForm
    F: np.ndarray
    omega: SesquilinearForm
    split: tuple

    def __post_init__(self):
        f = np.asarray(self.F)
        g1, g2 = self.split
        if f.shape != (g1 + g2, self.Omega.dim) or self.omega.dim != g1 + g2:
            raise DimensionError(f"F has shape {f.shape}; expected ({g1 + g2}, {self.Omega.dim})")
        object.__setattr__(self, "F", f)

    def F1(self):
        return self.F[: self.split[0]]

    def F2(self):
        return self.F[self.split[0]:]


@dataclass(frozen=True)
class BoundarySystemReport:
    rank: int
    required_rank: int
    compatibility_residual: float
    surjective: bool
    compatible: bool

    @property
    def ok(self):
        return self.surjective and self.compatible


def boundary_system_verify(bs, tol=DEFAULT_TOL):
    s = np.linalg.svd(bs.F, compute_uv=False)
    r = _rank(s, bs.F.shape, tol)
    res = compatibility_residual(bs.F, bs.Omega, bs.omega)
    scale = max(1.0, float(np.abs(bs.Omega.gram).max(initial=0)))
    return BoundarySystemReport(r, bs.F.shape[0], res, r == bs.F.shape[0], res <= tol * scale)


_TYPES = {
    "Subspace": Subspace,
    "LinearRelation": LinearRelation,
    "SesquilinearForm": SesquilinearForm,
    "LagrangianData": LagrangianData,
}


def from_dict(d, tol=DEFAULT_TOL):
    """Decode any of the serializable linrel types by its ``type`` tag."""
    try:
        cls = _TYPES[d["type"]]
    except (KeyError, TypeError):
        raise InputError(f"expected an object with 'type' in {sorted(_TYPES)}") from None
    try:
        return cls.from_dict(d, tol)
    except KeyError as exc:
        raise InputError(f"{d['type']} is missing field {exc.args[0]!r}") from None
