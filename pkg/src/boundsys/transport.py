"""Exact characteristics scheme for ``u_t = u_x`` on a graph with unitary coupling.

All edge lengths must be integer multiples of the step ``h``.  Edge ``e``
carries ``m_e = len_e / h`` samples at ``a_e + j h`` (left-closed grid).  One
step moves every profile one slot toward ``a_e``; the values leaving through
the start points form a vector ``v`` indexed by ``E_l`` and re-enter at the end
points as ``L^H v``, which keeps ``L tr_r u = tr_l u``.  The update is a
permutation composed with a unitary block, so the discrete norm is conserved
to rounding.
"""

from dataclasses import dataclass, replace

import numpy as np

from boundsys.errors import CardinalityError, CommensurabilityError, DimensionError, GraphError
from boundsys.metric_graph import SkewCoupling, validate_graph

COMMENSURABILITY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class TransportState:
    graph: object
    h: float
    samples: tuple
    L: np.ndarray
    steps: int = 0

    @property
    def t(self):
        return self.steps * self.h

    @property
    def vector(self):
        return np.concatenate(self.samples) if self.samples else np.zeros(0)

    def norm(self):
        return float(np.sqrt(self.h) * np.linalg.norm(self.vector))


def slot_counts(graph, h):
    counts = []
    for e in graph.edges:
        m = e.length / h
        if not np.isfinite(m) or abs(m - round(m)) > COMMENSURABILITY_RTOL * max(1.0, m) or round(m) < 1:
            raise CommensurabilityError(f"edge {e.id!r}: length {e.length} is not an integer multiple of h = {h}")
        counts.append(int(round(m)))
    return counts


def make_state(graph, coupling, h, initial, validate=True):
    """Build a state; ``initial`` is one callable per edge, one for all, or sample arrays.

    ``validate=False`` skips the unitarity check on ``coupling`` (negative
    controls only); cardinality is always enforced.
    """
    validate_graph(graph)
    n_l, n_r = len(graph.left_edges), len(graph.right_edges)
    if n_l != n_r:
        raise CardinalityError(
            f"E_r and E_l cardinalities differ (|E_r| = {n_r}, |E_l| = {n_l}); "
            "unitary couplings need |E_r| = |E_l|"
        )
    if not graph.compact:
        raise GraphError("transport needs a compact graph")
    if isinstance(coupling, SkewCoupling):
        L = coupling.L
    elif validate:
        L = SkewCoupling(coupling).L
    else:
        L = np.atleast_2d(np.asarray(coupling))
    if L.shape != (n_l, n_r):
        raise DimensionError(f"coupling must be {n_l}x{n_r}, got {L.shape}")
    counts = slot_counts(graph, h)
    if callable(initial):
        initial = [initial] * len(graph.edges)
    samples = []
    for e, m, f in zip(graph.edges, counts, initial):
        if callable(f):
            vals = np.asarray(f(e.a + h * np.arange(m)))
        else:
            vals = np.asarray(f)
            if vals.shape != (m,):
                raise DimensionError(f"edge {e.id!r}: expected {m} samples, got {vals.shape}")
        samples.append(np.array(vals, dtype=np.result_type(vals, L, float)))
    dt = np.result_type(L, *samples) if samples else float
    return TransportState(graph, float(h), tuple(s.astype(dt) for s in samples), L)


def step(state):
    """Advance by ``h``: shift toward ``a_e`` and re-inject ``L^H v`` at ``b_e``."""
    if not state.samples:
        return replace(state, steps=state.steps + 1)
    exiting = np.array([s[0] for s in state.samples])
    injected = state.L.conj().T @ exiting
    new = tuple(np.append(s[1:], inj) for s, inj in zip(state.samples, injected))
    return replace(state, samples=new, steps=state.steps + 1)


def step_back(state):
    """Inverse of :func:`step`: shift toward ``b_e`` and re-inject ``L w`` at ``a_e``."""
    if not state.samples:
        return replace(state, steps=state.steps - 1)
    leaving = np.array([s[-1] for s in state.samples])
    injected = state.L @ leaving
    new = tuple(np.insert(s[:-1], 0, inj) for s, inj in zip(state.samples, injected))
    return replace(state, samples=new, steps=state.steps - 1)


def n_steps(state, t_target):
    k = (t_target - state.t) / state.h
    if abs(k - round(k)) > 1e-9 * max(1.0, abs(k)):
        raise CommensurabilityError(f"t_target - t = {t_target - state.t} is not a multiple of h = {state.h}")
    return int(round(k))


def evolve(state, t_target, record=None):
    """Run to ``t_target`` (forward or backward).  ``record(state)`` is called after each step."""
    k = n_steps(state, t_target)
    move = step if k >= 0 else step_back
    for _ in range(abs(k)):
        state = move(state)
        if record is not None:
            record(state)
    return state


def trajectory(state, t_target, stride=1):
    """States at every ``stride``-th step, including the initial and final state."""
    out = [state]
    k = abs(n_steps(state, t_target))
    counter = iter(range(1, k + 1))

    def keep(s):
        i = next(counter)
        if i % stride == 0 or i == k:
            out.append(s)

    evolve(state, t_target, keep)
    return out


def update_matrix(state):
    """Explicit matrix of one :func:`step` on the concatenated sample vector."""
    sizes = [len(s) for s in state.samples]
    off = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    n = off[-1]
    U = np.zeros((n, n), dtype=np.result_type(state.L, float))
    for i, m in enumerate(sizes):
        for j in range(m - 1):
            U[off[i] + j, off[i] + j + 1] = 1.0
        for k in range(len(sizes)):
            U[off[i] + m - 1, off[k]] = np.conj(state.L[k, i])
    return U


@dataclass(frozen=True)
class NormReport:
    series: list
    max_deviation: float
    max_relative_deviation: float


def norm_report(states):
    if not states:
        return NormReport([], 0.0, 0.0)
    series = [(s.t, s.norm()) for s in states]
    n0 = series[0][1]
    dev = max(abs(n - n0) for _, n in series)
    return NormReport(series, dev, dev / n0 if n0 else dev)
