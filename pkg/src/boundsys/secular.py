"""Exact eigenvalues of constrained Laplacians on compact graphs.

On each edge a solution of ``-f'' = lam f`` is fixed by two coefficients.
Imposing the boundary conditions on ``(tr f, str f')`` gives a square matrix
``M(lam)`` of size ``2|E|`` that is singular exactly at eigenvalues.  We scan
its smallest singular value and refine local minima by golden-section search.
"""

import math
from dataclasses import dataclass

import numpy as np

from boundsys.errors import GraphError, InputError
from boundsys.metric_graph import as_self_adjoint, build_boundary_index, validate_graph

SERIES_SWITCH = 1e-6
_GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class EdgeFundamental:
    """Endpoint data at ``x = len`` of ``c, s`` with ``c(0)=1, c'(0)=0, s(0)=0, s'(0)=1``."""

    c: complex
    dc: complex
    s: complex
    ds: complex


def _series(lam, x, terms=12):
    z = -lam * x * x
    c = s = 0.0
    tc = 1.0
    ts = 1.0
    for j in range(terms):
        c += tc
        s += ts
        tc *= z / ((2 * j + 1) * (2 * j + 2))
        ts *= z / ((2 * j + 2) * (2 * j + 3))
    return c, s * x


def edge_fundamental(lam, length, series=None):
    """Fundamental solutions of ``-f'' = lam f`` evaluated at ``length``.

    ``series`` forces (True) or forbids (False) the power-series branch; by
    default it is used when ``|lam| length^2 < 1e-6``.
    """
    if length <= 0:
        raise InputError("edge length must be positive")
    if series is None:
        series = abs(lam) * length**2 < SERIES_SWITCH
    if series:
        c, s = _series(lam, length)
        return EdgeFundamental(c, -lam * s, s, c)
    if np.iscomplexobj(lam) and np.imag(lam) != 0:
        k = np.sqrt(complex(lam))
        c, sn = np.cos(k * length), np.sin(k * length)
        return EdgeFundamental(c, -k * sn, sn / k, c)
    lam = float(np.real(lam))
    if lam > 0:
        k = math.sqrt(lam)
        c, sn = math.cos(k * length), math.sin(k * length)
        return EdgeFundamental(c, -k * sn, sn / k, c)
    kappa = math.sqrt(-lam)
    ch, sh = math.cosh(kappa * length), math.sinh(kappa * length)
    return EdgeFundamental(ch, kappa * sh, sh / kappa, ch)


@dataclass(frozen=True, eq=False)
class SecularProblem:
    graph: object
    bc: object
    lam_min: float = 0.0
    lam_max: float = 50.0
    n_grid: int = 2000
    threshold: float = 1e-6
    field: str = "real"

    def __post_init__(self):
        validate_graph(self.graph)
        if not self.graph.compact:
            raise GraphError("secular equation needs a compact graph (all edges finite)")
        object.__setattr__(self, "bc", as_self_adjoint(self.graph, self.bc, self.field))
        if not self.lam_max > self.lam_min:
            raise InputError("empty scan range")
        if self.n_grid < 3:
            raise InputError("scan grid needs at least 3 points")


def _edge_endpoint_maps(lam, length, balanced):
    """4x2 map from edge coefficients to ``(f(a), f'(a), f(b), f'(b))``.

    Unbalanced: coefficients are ``(f(a), f'(a))``.  Balanced (used for
    ``Re lam < 0`` with large ``kappa * length``): coefficients of
    ``exp(-kappa (x - a))`` and ``exp(-kappa (b - x))``, which stay O(1).
    """
    if balanced:
        kappa = np.sqrt(-complex(lam)) if np.iscomplexobj(lam) else math.sqrt(-lam)
        q = np.exp(-kappa * length)
        return np.array([[1, q], [-kappa, kappa * q], [q, 1], [-kappa * q, kappa]])
    fe = edge_fundamental(lam, length)
    return np.array([[1, 0], [0, 1], [fe.c, fe.s], [fe.dc, fe.ds]])


def _endpoint_rows(prob, lam, balanced):
    g = prob.graph
    idx = build_boundary_index(g)
    m = len(g.edges)
    dt = complex if (np.iscomplexobj(lam) or prob.bc.field == "complex") else float
    T = np.zeros((len(idx), 2 * m), dtype=dt)
    S = np.zeros((len(idx), 2 * m), dtype=dt)
    for i, e in enumerate(g.edges):
        use_bal = balanced and np.real(lam) < 0 and math.sqrt(abs(lam)) * e.length > 1
        E = _edge_endpoint_maps(lam, e.length, use_bal)
        cols = slice(2 * i, 2 * i + 2)
        r0, r1 = idx.position(e.id, 0), idx.position(e.id, 1)
        T[r0, cols], S[r0, cols] = E[0], E[1]
        T[r1, cols], S[r1, cols] = E[2], -E[3]
    return T, S


def secular_matrix(prob, lam, balanced=False):
    """``M(lam)`` acting on per-edge coefficients, rows from the boundary conditions.

    Rows: ``P_{X-perp} tr f = 0`` and ``L x(tr f) - Q str f' = 0``.  With
    ``balanced=False`` the unknowns are ``(f_e(a_e), f_e'(a_e))``.
    """
    T, S = _endpoint_rows(prob, lam, balanced)
    return _assemble(prob, T, S)


def _assemble(prob, T, S):
    bx = prob.bc.X.basis
    perp = prob.bc.X.complement().basis
    return np.vstack([perp.conj().T @ T, prob.bc.L @ (bx.conj().T @ T) - bx.conj().T @ S])


def secular_svd(prob, lam, balanced=True):
    """Singular values of ``M(lam)`` and the reference scale ``||[T; S]||``.

    The reference is the norm of the coefficient-to-boundary-data map, which
    is at least 1; ``||M||`` itself vanishes wherever every boundary row is
    degenerate (e.g. double eigenvalues on a single loop).
    """
    T, S = _endpoint_rows(prob, lam, balanced)
    s = np.linalg.svd(_assemble(prob, T, S), compute_uv=False)
    ref = float(np.linalg.norm(np.vstack([T, S]), 2))
    return s, ref


def scaled_sigma_min(prob, lam, balanced=True):
    s, ref = secular_svd(prob, lam, balanced)
    return float(s[-1] / ref)


def golden_section(fun, a, b, xtol):
    """Minimize a unimodal ``fun`` on ``[a, b]`` to bracket width ``xtol(x)``."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(300):
        if abs(b - a) <= xtol(0.5 * (a + b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
    return (c, fc) if fc < fd else (d, fd)


@dataclass(frozen=True)
class SecularEigenvalue:
    value: float
    multiplicity: int
    sigma_min: float
    norm: float


def eigenvalue_scan(prob, accept=1e-8):
    """Eigenvalues in ``[lam_min, lam_max]`` with multiplicity estimates.

    The scan grid must separate neighbouring eigenvalues; that is the
    caller's responsibility.  A refined minimum is accepted when
    ``sigma_min <= accept * ref`` (see :func:`secular_svd`); multiplicity
    counts singular values below ``threshold * ref``.
    """
    lams = np.linspace(prob.lam_min, prob.lam_max, prob.n_grid)
    sig = np.array([scaled_sigma_min(prob, lam) for lam in lams])
    brackets = []
    for i in range(len(lams)):
        left = sig[i - 1] if i > 0 else np.inf
        right = sig[i + 1] if i + 1 < len(lams) else np.inf
        if sig[i] <= left and sig[i] < right or sig[i] < left and sig[i] <= right:
            brackets.append((lams[max(i - 1, 0)], lams[min(i + 1, len(lams) - 1)]))
    found = []
    for a, b in brackets:
        lam, _ = golden_section(lambda x: scaled_sigma_min(prob, x), a, b, lambda x: 1e-10 * (1 + abs(x)))
        s, ref = secular_svd(prob, lam)
        if s[-1] <= accept * ref:
            mult = int(np.count_nonzero(s <= prob.threshold * ref))
            found.append(SecularEigenvalue(float(lam), mult, float(s[-1]), ref))
    found.sort(key=lambda ev: ev.value)
    merged = []
    for ev in found:
        if merged and abs(ev.value - merged[-1].value) <= 1e-8 * (1 + abs(ev.value)):
            if ev.sigma_min < merged[-1].sigma_min:
                merged[-1] = ev
            continue
        merged.append(ev)
    return merged


def expand_multiplicities(eigs):
    out = []
    for ev in eigs:
        out.extend([ev.value] * ev.multiplicity)
    return np.array(out)
