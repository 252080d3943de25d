"""Finite-difference realizations on metric graphs.

Grid functions are concatenated edge by edge (declaration order) into one
vector of length ``N``.  The Laplacian is discretized through its quadratic
form: trapezoidal mass ``M`` and stiffness ``D1^H W D1`` built from forward
difference quotients, plus the boundary term ``T^H Sd`` from Green's
identity.  Boundary conditions are imposed as hard linear constraints and the
eigenproblem is solved by Rayleigh-Ritz on the constraint kernel.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from numpy.polynomial import legendre

from boundsys.errors import DimensionError, GraphError, InputError
from boundsys.linrel import BoundarySystem, SesquilinearForm, null_space
from boundsys.metric_graph import (
    SkewCoupling,
    as_self_adjoint,
    build_boundary_index,
    validate_graph,
)

MAX_POINTS = 20_000


@dataclass(frozen=True)
class EdgeGrid:
    edge_id: str
    a: float
    b: float
    n: int
    # flags (0 = start, 1 = end) of endpoints created by truncation
    artificial: tuple = ()

    def __post_init__(self):
        if self.n < 3:
            raise InputError(f"edge {self.edge_id!r}: need at least 3 grid points for the stencils, got {self.n}")
        if not self.b > self.a:
            raise InputError(f"edge {self.edge_id!r}: empty grid interval")

    @property
    def h(self):
        return (self.b - self.a) / (self.n - 1)

    @property
    def x(self):
        return np.linspace(self.a, self.b, self.n)


@dataclass(frozen=True)
class TruncationRecord:
    edge_id: str
    side: int
    length: float


@dataclass(frozen=True, eq=False)
class Discretization:
    graph: object
    grids: tuple
    truncations: tuple = ()
    offsets: tuple = field(default=None, repr=False)

    def __post_init__(self):
        off = np.concatenate([[0], np.cumsum([gr.n for gr in self.grids])])
        object.__setattr__(self, "offsets", tuple(int(o) for o in off))

    @property
    def N(self):
        return self.offsets[-1]

    @property
    def h_max(self):
        return max(gr.h for gr in self.grids)

    def node(self, edge_pos, flag):
        """Global index of the start (flag 0) or end (flag 1) node of an edge."""
        return self.offsets[edge_pos] if flag == 0 else self.offsets[edge_pos + 1] - 1

    def sample(self, funcs):
        """Evaluate one callable per edge (or one for all edges) on the grids."""
        if callable(funcs):
            funcs = [funcs] * len(self.grids)
        return np.concatenate([np.asarray(f(gr.x)) * np.ones(gr.n) for f, gr in zip(funcs, self.grids)])

    def split(self, vec):
        return [vec[self.offsets[i]:self.offsets[i + 1]] for i in range(len(self.grids))]


def make_grids(g, n, truncate=None):
    """Uniform grids with ``n`` points per edge (int or mapping edge id -> int).

    Semi-infinite edges are cut to length ``truncate``; the artificial end is
    recorded and later gets a Dirichlet condition.
    """
    validate_graph(g)
    grids, records = [], []
    for e in g.edges:
        ne = n[e.id] if isinstance(n, dict) else int(n)
        a, b, art = e.a, e.b, []
        if not e.compact:
            if truncate is None:
                raise GraphError(f"edge {e.id!r} is semi-infinite; pass a truncation length")
            if not e.left_finite and not e.right_finite:
                a, b, art = -truncate, truncate, [0, 1]
            elif not e.left_finite:
                a, art = b - truncate, [0]
            else:
                b, art = a + truncate, [1]
            for side in art:
                records.append(TruncationRecord(e.id, side, truncate))
        grids.append(EdgeGrid(e.id, a, b, ne, tuple(art)))
    if records:
        warnings.warn(f"{len(records)} semi-infinite edge end(s) truncated at length {truncate} with Dirichlet closure")
    disc = Discretization(g, tuple(grids), tuple(records))
    if disc.N > MAX_POINTS:
        raise InputError(f"{disc.N} grid points exceed the dense-solver cap of {MAX_POINTS}")
    return disc


@dataclass(frozen=True, eq=False)
class TraceOperators:
    T: np.ndarray
    Sd: np.ndarray
    T_l: np.ndarray
    T_r: np.ndarray


def build_trace_operators(disc):
    """Endpoint evaluation ``T``, signed derivative trace ``Sd`` and ``T_l``, ``T_r``.

    ``Sd`` uses the second-order one-sided stencils
    ``f'(a) ~ (-3 f0 + 4 f1 - f2) / 2h`` and the mirror image at ``b``, with
    the sign flipped at right endpoints.
    """
    g = disc.graph
    idx = build_boundary_index(g)
    pos = {e.id: i for i, e in enumerate(g.edges)}
    N = disc.N
    T = np.zeros((len(idx), N))
    Sd = np.zeros((len(idx), N))
    for r, (eid, flag) in enumerate(idx):
        i = pos[eid]
        gr = disc.grids[i]
        j = disc.node(i, flag)
        T[r, j] = 1.0
        if flag == 0:
            Sd[r, j:j + 3] = np.array([-3.0, 4.0, -1.0]) / (2 * gr.h)
        else:
            Sd[r, j - 2:j + 1] = -np.array([1.0, -4.0, 3.0]) / (2 * gr.h)
    left = [idx.position(e.id, 0) for e in g.left_edges]
    right = [idx.position(e.id, 1) for e in g.right_edges]
    return TraceOperators(T, Sd, T[left], T[right])


def mass_matrix(disc):
    w = []
    for gr in disc.grids:
        wi = np.full(gr.n, gr.h)
        wi[[0, -1]] = gr.h / 2
        w.append(wi)
    return sp.diags(np.concatenate(w))


def stiffness_matrix(disc):
    """``D1^H W D1`` per edge: the discrete form ``int f' conj(g')``."""
    blocks = []
    for gr in disc.grids:
        d1 = sp.diags([-np.ones(gr.n - 1), np.ones(gr.n - 1)], [0, 1], shape=(gr.n - 1, gr.n)) / gr.h
        blocks.append(d1.T @ (gr.h * d1))
    return sp.block_diag(blocks, format="csr")


def derivative_form(disc):
    """``W D`` for the summation-by-parts first derivative.

    Central differences inside, first-order one-sided closure at both ends, so
    that ``Q + Q^T = diag(-1, 0, ..., 0, 1)`` on every edge.
    """
    blocks = []
    for gr in disc.grids:
        n = gr.n
        q = sp.diags([-0.5 * np.ones(n - 1), 0.5 * np.ones(n - 1)], [-1, 1], shape=(n, n)).tolil()
        q[0, 0], q[n - 1, n - 1] = -0.5, 0.5
        blocks.append(q.tocsr())
    return sp.block_diag(blocks, format="csr")


def second_derivative(disc):
    """Second-order accurate ``f''``: central inside, 4-point one-sided at the ends."""
    blocks = []
    for gr in disc.grids:
        n, h = gr.n, gr.h
        if n < 4:
            raise InputError(f"edge {gr.edge_id!r}: second derivative needs at least 4 points")
        d = sp.diags([np.ones(n - 1), -2 * np.ones(n), np.ones(n - 1)], [-1, 0, 1], shape=(n, n)).tolil()
        d[0, :4] = [2.0, -5.0, 4.0, -1.0]
        d[n - 1, n - 4:] = [-1.0, 4.0, -5.0, 2.0]
        blocks.append(d.tocsr() / h**2)
    return sp.block_diag(blocks, format="csr")


def first_derivative(disc):
    """Second-order accurate ``f'``: central inside, 3-point one-sided at the ends."""
    blocks = []
    for gr in disc.grids:
        n, h = gr.n, gr.h
        d = sp.diags([-np.ones(n - 1), np.ones(n - 1)], [-1, 1], shape=(n, n)).tolil()
        d[0, :3] = [-3.0, 4.0, -1.0]
        d[n - 1, n - 3:] = [1.0, -4.0, 3.0]
        blocks.append(d.tocsr() / (2 * h))
    return sp.block_diag(blocks, format="csr")


def _artificial_rows(disc):
    rows = []
    for i, gr in enumerate(disc.grids):
        for flag in gr.artificial:
            r = np.zeros(disc.N)
            r[disc.node(i, flag)] = 1.0
            rows.append(r)
    return rows


@dataclass(frozen=True, eq=False)
class ConstraintKernel:
    Z: sp.csr_matrix
    rows: int
    rank: int

    @property
    def rank_deficient(self):
        return self.rank < self.rows

    @property
    def dim(self):
        return self.Z.shape[1]


def constraint_kernel(C, tol=1e-10):
    """Orthonormal basis of ``ker C`` exploiting that ``C`` touches few columns.

    Columns of ``C`` that are identically zero carry unit vectors; the kernel
    of the remaining dense block is computed by SVD.
    """
    C = np.atleast_2d(C)
    rows, N = C.shape
    touched = np.flatnonzero(np.abs(C).max(axis=0) > 0) if rows else np.array([], dtype=int)
    free = np.setdiff1d(np.arange(N), touched)
    ker = null_space(C[:, touched], tol) if touched.size else np.zeros((0, 0))
    rank = touched.size - ker.shape[1]
    dt = np.result_type(C, float)
    n_free = free.size
    ri = np.concatenate([free, np.repeat(touched, ker.shape[1])])
    ci = np.concatenate([np.arange(n_free), np.tile(np.arange(ker.shape[1]), touched.size) + n_free])
    vals = np.concatenate([np.ones(n_free, dtype=dt), ker.ravel().astype(dt)])
    Z = sp.csr_matrix((vals, (ri, ci)), shape=(N, n_free + ker.shape[1]))
    return ConstraintKernel(Z, rows, rank)


def laplacian_constraints(disc, bc, traces=None):
    """Rows of ``C f = 0``: ``P_{X-perp} T f = 0`` and ``L x(T f) - Q Sd f = 0``."""
    tr = traces or build_trace_operators(disc)
    bx = bc.X.basis
    perp = bc.X.complement().basis
    rows = [perp.conj().T @ tr.T, bc.L @ (bx.conj().T @ tr.T) - bx.conj().T @ tr.Sd]
    rows += [np.atleast_2d(r) for r in _artificial_rows(disc)]
    return np.vstack(rows)


@dataclass(frozen=True)
class FDSpectrum:
    eigenvalues: np.ndarray
    residuals: np.ndarray
    symmetry_residual: float
    h_max: float
    constraint_rows: int
    constraint_rank: int
    constrained_dim: int
    truncations: tuple

    @property
    def symmetric_ok(self):
        return self.symmetry_residual <= 10 * self.h_max

    @property
    def rank_deficient(self):
        return self.constraint_rank < self.constraint_rows


def assemble_laplacian_eig(disc, bc, k, field="real"):
    """The ``k`` smallest eigenvalues of the constrained Laplacian (Rayleigh-Ritz)."""
    bc = as_self_adjoint(disc.graph, bc, field)
    tr = build_trace_operators(disc)
    C = laplacian_constraints(disc, bc, tr)
    ker = constraint_kernel(C)
    if ker.rank_deficient:
        warnings.warn(f"boundary constraints are rank deficient ({ker.rank} < {ker.rows})")
    if k > ker.dim:
        raise InputError(f"requested {k} eigenvalues but the constrained space has dimension {ker.dim}")
    Z = ker.Z
    A = stiffness_matrix(disc) + sp.csr_matrix(tr.T.T) @ sp.csr_matrix(tr.Sd)
    K = (Z.conj().T @ A @ Z).toarray()
    Mz = (Z.conj().T @ mass_matrix(disc) @ Z).toarray()
    nrm = np.linalg.norm(K)
    sym = float(np.linalg.norm(K - K.conj().T) / nrm) if nrm else 0.0
    K = 0.5 * (K + K.conj().T)
    Mz = 0.5 * (Mz + Mz.conj().T)
    lam, vec = scipy.linalg.eigh(K, Mz, subset_by_index=[0, k - 1])
    res = np.linalg.norm(K @ vec - (Mz @ vec) * lam, axis=0) / np.maximum(1.0, np.abs(lam))
    return FDSpectrum(lam, res, sym, disc.h_max, ker.rows, ker.rank, ker.dim, disc.truncations)


def laplacian_domain_basis(disc, bc, field="real"):
    """Basis ``Z`` (sparse, orthonormal columns) of grid functions satisfying the constraints."""
    bc = as_self_adjoint(disc.graph, bc, field)
    return constraint_kernel(laplacian_constraints(disc, bc)).Z


def _inner(w, u, v):
    return np.sum(w * u * np.conj(v))


def boundary_system_residual(disc, f, g, operator="laplace"):
    """Defect of the discrete Green identity for two sampled edge functions.

    ``laplace``: ``(<f, Hg> - <Hf, g>) - (<tr f, str g'> - <str f', tr g>)``
    with ``H = -d^2/dx^2``.
    ``derivative``: ``(<f, g'> + <f', g>) - (<tr_r f, tr_r g> - <tr_l f, tr_l g>)``.
    Trapezoidal quadrature and second-order differences; the result is
    ``O(h^2)`` for smooth inputs.
    """
    if not disc.graph.compact or disc.truncations:
        raise GraphError("the boundary identity is only evaluated on compact graphs")
    f, g = np.asarray(f), np.asarray(g)
    if f.shape != (disc.N,) or g.shape != (disc.N,):
        raise DimensionError(f"sampled functions must have length {disc.N}")
    w = mass_matrix(disc).diagonal()
    tr = build_trace_operators(disc)
    if operator == "laplace":
        d2 = second_derivative(disc)
        lhs = _inner(w, f, -(d2 @ g)) - _inner(w, -(d2 @ f), g)
        rhs = np.vdot(tr.Sd @ g, tr.T @ f) - np.vdot(tr.T @ g, tr.Sd @ f)
    elif operator == "derivative":
        d1 = first_derivative(disc)
        lhs = _inner(w, f, d1 @ g) + _inner(w, d1 @ f, g)
        rhs = np.vdot(tr.T_r @ g, tr.T_r @ f) - np.vdot(tr.T_l @ g, tr.T_l @ f)
    else:
        raise InputError(f"operator must be 'laplace' or 'derivative', got {operator!r}")
    return float(abs(lhs - rhs))


def trace_operator_norm(l, n):
    """Norm of ``f -> (f(0), f(l))`` from discrete ``W^1_2(0, l)`` to ``K^2``.

    The discrete Sobolev Gram matrix is ``M + D1^H W D1``; the norm is the
    square root of the largest eigenvalue of ``T G^{-1} T^H``.
    """
    if l <= 0:
        raise InputError("interval length must be positive")
    if n < 3:
        raise InputError("need at least 3 grid points")
    from boundsys.metric_graph import interval_graph

    disc = make_grids(interval_graph(0.0, l), n)
    G = (mass_matrix(disc) + stiffness_matrix(disc)).tocsc()
    T = np.zeros((disc.N, 2))
    T[0, 0] = T[-1, 1] = 1.0
    K = T.T @ spla.spsolve(G, T)
    return float(np.sqrt(np.linalg.eigvalsh(0.5 * (K + K.T))[-1]))


def trace_norm_closed_form(l):
    return math.sqrt((math.cosh(l) + 1) / math.sinh(l))


@dataclass(frozen=True)
class DerivativeCheck:
    skew_residual: float
    dirac_residual: object
    h_max: float
    constrained_dim: int

    @property
    def tolerance(self):
        return 10 * self.h_max

    @property
    def ok(self):
        return self.skew_residual <= self.tolerance


def assemble_derivative_check(disc, bc, skip_validation=False):
    """Skew-Hermiticity of the first-derivative form on ``{L tr_r f = tr_l f}``.

    With ``skip_validation`` a raw (possibly non-unitary) coupling matrix is
    accepted; used for negative controls.
    """
    g = disc.graph
    if skip_validation:
        L = np.atleast_2d(np.asarray(bc.L if isinstance(bc, SkewCoupling) else bc))
        n_l, n_r = len(g.left_edges), len(g.right_edges)
        if L.shape != (n_l, n_r):
            raise DimensionError(f"coupling must be {n_l}x{n_r}, got {L.shape}")
    else:
        if not isinstance(bc, SkewCoupling):
            bc = SkewCoupling(bc)
        bc.check_graph(g)
        L = bc.L
    if disc.truncations:
        raise GraphError("derivative check needs a compact graph")
    tr = build_trace_operators(disc)
    C = L @ tr.T_r - tr.T_l
    ker = constraint_kernel(C)
    Z = ker.Z
    K = (Z.conj().T @ derivative_form(disc) @ Z).toarray()
    nrm = np.linalg.norm(K, 2)
    skew = float(np.linalg.norm(K + K.conj().T, 2) / nrm) if nrm else 0.0
    dirac = None
    if np.iscomplexobj(L):
        H = -1j * K
        dirac = float(np.linalg.norm(H - H.conj().T, 2) / nrm) if nrm else 0.0
    return DerivativeCheck(skew, dirac, disc.h_max, ker.dim)


def polynomial_boundary_system(g, degree=5, operator="laplace"):
    """Exact finite-dimensional boundary system on edgewise polynomials.

    The space is polynomials of degree ``<= degree`` on every edge (Legendre
    coefficients).  For ``laplace`` ``F = (tr f, str f')`` and both forms are
    standard skew-symmetric; for ``derivative`` ``F = (tr_r f, tr_l f)``,
    ``Omega`` is the standard symmetric form on the operator graph and
    ``omega`` the standard unitary form.  Quadrature is exact.
    """
    validate_graph(g)
    if not g.compact:
        raise GraphError("polynomial boundary system needs a compact graph")
    p = int(degree)
    if p < (3 if operator == "laplace" else 1):
        raise InputError("degree too small for the boundary map to be surjective")
    m = len(g.edges)
    nb = p + 1
    N = nb * m
    xg, wg = legendre.leggauss(p + 2)
    eye = np.eye(nb)
    vals = legendre.legval(xg, eye.T).T  # (points, nb)
    M = np.zeros((N, N))
    H = np.zeros((N, N))
    idx = build_boundary_index(g)
    ends = {}
    for i, e in enumerate(g.edges):
        s = slice(i * nb, (i + 1) * nb)
        scale = 2.0 / e.length
        M[s, s] = (vals * (wg * e.length / 2)[:, None]).T @ vals
        if operator == "laplace":
            dmat = np.column_stack([np.pad(legendre.legder(c, 2), (0, 2)) for c in eye]) * scale**2
            H[s, s] = -dmat
        else:
            dmat = np.column_stack([np.pad(legendre.legder(c, 1), (0, 1)) for c in eye]) * scale
            H[s, s] = dmat
        d1 = np.array([legendre.legval(np.array([-1.0, 1.0]), legendre.legder(c)) for c in eye]).T * scale
        ends[e.id] = (legendre.legval(np.array([-1.0, 1.0]), eye.T).T, d1, s)
    def row(eid, flag, deriv):
        r = np.zeros(N)
        v, d1, s = ends[eid]
        r[s] = (d1 if deriv else v)[flag]
        return r
    if operator == "laplace":
        T = np.array([row(eid, fl, False) for eid, fl in idx])
        S = np.array([row(eid, fl, True) * (1 if fl == 0 else -1) for eid, fl in idx])
        F = np.vstack([T, S])
        Omega = SesquilinearForm(H.T @ M - M @ H, "skew")
        omega = SesquilinearForm.standard_skew(len(idx))
        split = (len(idx), len(idx))
    elif operator == "derivative":
        Tr = np.array([row(e.id, 1, False) for e in g.right_edges])
        Tl = np.array([row(e.id, 0, False) for e in g.left_edges])
        F = np.vstack([Tr, Tl])
        Omega = SesquilinearForm(H.T @ M + M @ H, "symmetric")
        omega = SesquilinearForm.standard_unitary(len(Tr), len(Tl))
        split = (len(Tr), len(Tl))
    else:
        raise InputError(f"operator must be 'laplace' or 'derivative', got {operator!r}")
    return BoundarySystem(Omega, F, omega, split)
