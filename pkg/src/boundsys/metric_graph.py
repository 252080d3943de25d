"""Metric graphs, boundary index sets and boundary-condition specifications."""

import math
import warnings
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Optional

import numpy as np

from boundsys.errors import CardinalityError, DimensionError, GraphError, InputError, NotHermitianError, NotUnitaryError
from boundsys.linrel import DEFAULT_TOL, LagrangianData, Subspace, arens_compose
from boundsys.serialize import decode_matrix, encode_matrix, field_of

DEFAULT_L_MIN = 1e-9


@dataclass(frozen=True)
class Edge:
    id: str
    a: float
    b: float
    gamma0: Optional[Hashable] = None
    gamma1: Optional[Hashable] = None

    @property
    def left_finite(self):
        return math.isfinite(self.a)

    @property
    def right_finite(self):
        return math.isfinite(self.b)

    @property
    def length(self):
        return self.b - self.a

    @property
    def compact(self):
        return self.left_finite and self.right_finite


@dataclass(frozen=True)
class MetricGraph:
    vertices: tuple
    edges: tuple
    l_min: float = DEFAULT_L_MIN

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))

    def edge(self, edge_id):
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)

    @property
    def left_edges(self):
        """``E_l``: edges with a finite start point."""
        return [e for e in self.edges if e.left_finite]

    @property
    def right_edges(self):
        """``E_r``: edges with a finite end point."""
        return [e for e in self.edges if e.right_finite]

    @property
    def compact(self):
        return all(e.compact for e in self.edges)


@dataclass(frozen=True)
class GraphReport:
    l: float
    n_left: int
    n_right: int
    n_boundary: int
    degrees: dict


def validate_graph(g):
    """Check all graph invariants; raise :class:`GraphError` listing every offender."""
    problems = []
    vset = set(g.vertices)
    if len(vset) != len(g.vertices):
        problems.append("duplicate vertex identifiers")
    seen = set()
    for e in g.edges:
        if e.id in seen:
            problems.append(f"edge {e.id!r}: duplicate id")
        seen.add(e.id)
        if math.isnan(e.a) or math.isnan(e.b):
            problems.append(f"edge {e.id!r}: endpoint is NaN")
            continue
        if e.a == e.b:
            problems.append(f"edge {e.id!r}: zero length (a = b = {e.a})")
        elif e.a > e.b:
            problems.append(f"edge {e.id!r}: a = {e.a} > b = {e.b}")
        elif e.length < g.l_min:
            problems.append(f"edge {e.id!r}: length {e.length} below l_min = {g.l_min}")
        if e.left_finite != (e.gamma0 is not None):
            problems.append(f"edge {e.id!r}: gamma0 must be set iff a is finite")
        if e.right_finite != (e.gamma1 is not None):
            problems.append(f"edge {e.id!r}: gamma1 must be set iff b is finite")
        for tag, v in (("gamma0", e.gamma0), ("gamma1", e.gamma1)):
            if v is not None and v not in vset:
                problems.append(f"edge {e.id!r}: {tag} = {v!r} is not a vertex")
    if problems:
        raise GraphError("invalid metric graph:\n  " + "\n  ".join(problems))
    degrees = {v: 0 for v in g.vertices}
    for e in g.edges:
        if e.left_finite:
            degrees[e.gamma0] += 1
        if e.right_finite:
            degrees[e.gamma1] += 1
    l = min((e.length for e in g.edges), default=math.inf)
    n_left, n_right = len(g.left_edges), len(g.right_edges)
    return GraphReport(l, n_left, n_right, n_left + n_right, degrees)


@dataclass(frozen=True)
class BoundaryIndex:
    """Ordered ``E'``: per edge in declaration order, ``(e, 0)`` before ``(e, 1)``."""

    entries: tuple
    _pos: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_pos", {p: i for i, p in enumerate(self.entries)})

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def position(self, edge_id, flag):
        return self._pos[(edge_id, flag)]


def build_boundary_index(g):
    entries = []
    for e in g.edges:
        if e.left_finite:
            entries.append((e.id, 0))
        if e.right_finite:
            entries.append((e.id, 1))
    return BoundaryIndex(tuple(entries))


def endpoint_vertex(g, edge_id, flag):
    e = g.edge(edge_id)
    return e.gamma0 if flag == 0 else e.gamma1


@dataclass(frozen=True, eq=False)
class SelfAdjointBC:
    """``X ⊆ l2(E')`` and a Hermitian ``L`` on ``X`` (in X-basis coordinates)."""

    X: Subspace
    L: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        L = np.asarray(self.L)
        d = self.X.dim
        if L.shape != (d, d):
            raise DimensionError(f"L must be {d}x{d} to act on X, got {L.shape}")
        dev = float(np.abs(L - L.conj().T).max(initial=0.0))
        if dev > self.tol * max(1.0, float(np.abs(L).max(initial=0.0))):
            raise NotHermitianError(f"boundary operator L is not Hermitian (deviation {dev:.2e})")
        object.__setattr__(self, "L", L)

    @property
    def field(self):
        return field_of(self.X.basis, self.L)

    def check_graph(self, g):
        n = len(build_boundary_index(g))
        if self.X.ambient_dim != n:
            raise DimensionError(f"X lives in K^{self.X.ambient_dim}, graph has |E'| = {n}")

    def relation(self):
        """The self-adjoint relation in ``l2(E') ⊕ l2(E')`` encoded by ``(X, L)``."""
        return arens_compose(LagrangianData(self.X, self.L, "self_adjoint"))


@dataclass(frozen=True, eq=False)
class SkewCoupling:
    """Unitary ``L: l2(E_r) -> l2(E_l)``, stored as an ``|E_l| x |E_r|`` matrix."""

    L: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        L = np.atleast_2d(np.asarray(self.L))
        if L.shape[0] != L.shape[1]:
            raise CardinalityError(
                f"E_r and E_l cardinalities differ: coupling is {L.shape[0]}x{L.shape[1]}; "
                "a unitary coupling needs |E_r| = |E_l|"
            )
        dev = float(np.linalg.norm(L.conj().T @ L - np.eye(L.shape[0]), 2)) if L.size else 0.0
        if dev > self.tol:
            raise NotUnitaryError(f"coupling L is not unitary (|L^H L - I| = {dev:.2e})")
        object.__setattr__(self, "L", L)

    @property
    def field(self):
        return field_of(self.L)

    def check_graph(self, g):
        n_l, n_r = len(g.left_edges), len(g.right_edges)
        if n_l != n_r:
            raise CardinalityError(
                f"E_r and E_l cardinalities differ (|E_r| = {n_r}, |E_l| = {n_l}); "
                "skew-self-adjoint realizations need |E_r| = |E_l|"
            )
        if self.L.shape != (n_l, n_r):
            raise DimensionError(f"coupling must be {n_l}x{n_r}, got {self.L.shape}")


SHORTHANDS = ("dirichlet", "neumann", "kirchhoff", "delta")


@dataclass(frozen=True)
class Shorthand:
    name: str
    alpha: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in SHORTHANDS:
            raise InputError(f"unknown boundary shorthand {self.name!r}; expected one of {SHORTHANDS}")


def shorthand_to_XL(g, spec, field="real"):
    """Expand a named boundary condition into ``(X, L)`` data.

    ``delta`` with coupling ``alpha_v`` imposes continuity at ``v`` and

        -sum_{p at v} (strace f')(p) = alpha_v f(v),

    the sign used in the nearest-neighbour Z-graph example
    (``-f_n'(n) + f_{n-1}'(n) = 2n f_n(n)``).  In the normalized indicator
    basis ``chi_v / sqrt(d_v)`` this makes ``L`` diagonal with entries
    ``-alpha_v / d_v``.  ``kirchhoff`` is ``delta`` with zero coupling.
    """
    validate_graph(g)
    idx = build_boundary_index(g)
    n = len(idx)
    dt = np.complex128 if field == "complex" else np.float64
    if spec.name == "dirichlet":
        return SelfAdjointBC(Subspace.zero(n, field), np.zeros((0, 0), dtype=dt))
    if spec.name == "neumann":
        return SelfAdjointBC(Subspace.full(n, field), np.zeros((n, n), dtype=dt))
    incident = {}
    for i, (eid, flag) in enumerate(idx):
        v = endpoint_vertex(g, eid, flag)
        if v is None:
            raise GraphError(f"endpoint ({eid!r}, {flag}) is not attached to a vertex")
        incident.setdefault(v, []).append(i)
    unknown = set(spec.alpha) - set(g.vertices)
    if unknown:
        raise InputError(f"coupling given for unknown vertices {sorted(map(str, unknown))}")
    if spec.name == "kirchhoff" and any(a != 0 for a in spec.alpha.values()):
        raise InputError("kirchhoff conditions take no coupling; use 'delta'")
    cols, diag = [], []
    for v in g.vertices:
        pts = incident.get(v)
        if not pts:
            if spec.alpha.get(v, 0):
                warnings.warn(f"vertex {v!r} has no incident endpoints; its coupling is ignored")
            continue
        chi = np.zeros(n, dtype=dt)
        chi[pts] = 1.0 / np.sqrt(len(pts))
        cols.append(chi)
        diag.append(-float(spec.alpha.get(v, 0.0)) / len(pts))
    X = Subspace(np.column_stack(cols) if cols else np.zeros((n, 0), dtype=dt))
    return SelfAdjointBC(X, np.diag(np.array(diag, dtype=dt)))


def as_self_adjoint(g, bc, field="real"):
    if isinstance(bc, Shorthand):
        return shorthand_to_XL(g, bc, field)
    if isinstance(bc, SelfAdjointBC):
        bc.check_graph(g)
        return bc
    raise InputError(f"expected self-adjoint boundary data, got {type(bc).__name__}")


def z_graph(n_trunc, coupling=lambda n: 2.0 * n):
    """Nearest-neighbour graph on ``{-N, ..., N}`` with delta couplings at each vertex."""
    vertices = tuple(str(v) for v in range(-n_trunc, n_trunc + 1))
    edges = tuple(Edge(f"e{n}", float(n), float(n + 1), str(n), str(n + 1)) for n in range(-n_trunc, n_trunc))
    g = MetricGraph(vertices, edges)
    alpha = {str(v): coupling(v) for v in range(-n_trunc, n_trunc + 1)}
    return g, Shorthand("delta", alpha)


def star_graph(lengths, center="c"):
    vertices = (center,) + tuple(f"v{i}" for i in range(len(lengths)))
    edges = tuple(Edge(f"e{i}", 0.0, float(l), center, f"v{i}") for i, l in enumerate(lengths))
    return MetricGraph(vertices, edges)


def cycle_graph(lengths):
    m = len(lengths)
    vertices = tuple(f"v{i}" for i in range(m))
    edges = tuple(Edge(f"e{i}", 0.0, float(l), f"v{i}", f"v{(i + 1) % m}") for i, l in enumerate(lengths))
    return MetricGraph(vertices, edges)


def interval_graph(a, b):
    return MetricGraph(("L", "R"), (Edge("e", float(a), float(b), "L", "R"),))


# --- JSON -----------------------------------------------------------------

def _decode_endpoint(x, name):
    if x in ("inf", "+inf"):
        return math.inf
    if x == "-inf":
        return -math.inf
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return float(x)
    raise InputError(f"edge endpoint {name} must be a number or 'inf'/'-inf', got {x!r}")


def _encode_endpoint(x):
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return x


def _vid(v):
    return None if v is None else str(v)


def graph_from_dict(d):
    try:
        vertices = tuple(str(v) for v in d["vertices"])
        edges = []
        for i, ed in enumerate(d["edges"]):
            edges.append(Edge(str(ed.get("id", f"e{i}")), _decode_endpoint(ed["a"], "a"),
                              _decode_endpoint(ed["b"], "b"), _vid(ed.get("gamma0")), _vid(ed.get("gamma1"))))
    except KeyError as exc:
        raise InputError(f"graph JSON is missing field {exc.args[0]!r}") from None
    except (TypeError, AttributeError):
        raise InputError("graph JSON must have 'vertices' (list) and 'edges' (list of objects)") from None
    return MetricGraph(vertices, tuple(edges), float(d.get("l_min", DEFAULT_L_MIN)))


def graph_to_dict(g):
    edges = []
    for e in g.edges:
        ed = {"id": e.id, "a": _encode_endpoint(e.a), "b": _encode_endpoint(e.b)}
        if e.gamma0 is not None:
            ed["gamma0"] = e.gamma0
        if e.gamma1 is not None:
            ed["gamma1"] = e.gamma1
        edges.append(ed)
    return {"vertices": list(g.vertices), "edges": edges, "l_min": g.l_min}


def bc_from_dict(d, g=None):
    """Decode the ``"bc"`` block of a graph file."""
    if not isinstance(d, dict) or "type" not in d:
        raise InputError("bc must be an object with a 'type'")
    kind = d["type"]
    field = d.get("field", "real")
    if kind in SHORTHANDS:
        return Shorthand(kind, {str(k): float(v) for k, v in d.get("alpha", {}).items()})
    if kind == "self_adjoint":
        X = Subspace.from_dict(d["X"])
        return SelfAdjointBC(X, decode_matrix(d["L"], field, n_rows=X.dim))
    if kind == "skew_coupling":
        return SkewCoupling(decode_matrix(d["L"], field))
    raise InputError(f"unknown bc type {kind!r}")


def bc_to_dict(bc):
    if isinstance(bc, Shorthand):
        out = {"type": bc.name}
        if bc.alpha:
            out["alpha"] = dict(bc.alpha)
        return out
    if isinstance(bc, SelfAdjointBC):
        f = bc.field
        X = bc.X if f == "real" or bc.X.field.value == f else Subspace(bc.X.basis.astype(complex))
        return {"type": "self_adjoint", "field": f, "X": X.to_dict(), "L": encode_matrix(bc.L, f)}
    if isinstance(bc, SkewCoupling):
        return {"type": "skew_coupling", "field": bc.field, "L": encode_matrix(bc.L, bc.field)}
    raise InputError(f"cannot encode {type(bc).__name__}")
