"""Random instances for property tests and experiments.

Generators take a ``numpy.random.Generator`` and return relations with a
known structure, built without going through the classification code.
"""

import numpy as np

from boundsys.linrel import LagrangianData, LinearRelation, Subspace, arens_compose


def random_matrix(rng, shape, field="real"):
    a = rng.standard_normal(shape)
    if field == "complex":
        a = a + 1j * rng.standard_normal(shape)
    return a


def random_unitary(rng, n, field="real"):
    q, r = np.linalg.qr(random_matrix(rng, (n, n), field))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_hermitian(rng, n, field="real"):
    a = random_matrix(rng, (n, n), field)
    return (a + a.conj().T) / 2


def random_skew(rng, n, field="real"):
    a = random_matrix(rng, (n, n), field)
    return (a - a.conj().T) / 2


def random_subspace(rng, m, k, field="real"):
    return Subspace.span(random_matrix(rng, (m, k), field))


def random_relation(rng, n1, n2, k=None, field="real"):
    k = rng.integers(0, n1 + n2 + 1) if k is None else k
    return LinearRelation((n1, n2), random_subspace(rng, n1 + n2, k, field))


def random_lagrangian_data(rng, n, d=None, field="real", flavor="self_adjoint"):
    d = rng.integers(0, n + 1) if d is None else d
    X = random_subspace(rng, n, d, field)
    L = random_hermitian(rng, d, field) if flavor == "self_adjoint" else random_skew(rng, d, field)
    return LagrangianData(X, L, flavor)


def random_self_adjoint(rng, n, field="real"):
    """Self-adjoint relation from a unitary, without the (X, L) route.

    Real case: span of ``[Re Q; Im Q]`` for a complex unitary ``Q``.
    Complex case: ``{((I - W) z, i (I + W) z)}`` for a unitary ``W``.
    """
    if field == "real":
        q = random_unitary(rng, n, "complex")
        return LinearRelation.from_pairs(q.real, q.imag)
    w = random_unitary(rng, n, "complex")
    i = np.eye(n)
    return LinearRelation.from_pairs(i - w, 1j * (i + w))


def random_skew_self_adjoint(rng, n, field="real"):
    """Skew-self-adjoint relation ``{((W + I) z, (W - I) z)}`` for a unitary ``W``.

    The pairs satisfy ``<x, v> + <y, u> = 0`` and span an ``n``-dimensional
    subspace, so they are self-orthogonal for the standard symmetric form.
    """
    w = random_unitary(rng, n, field)
    i = np.eye(n)
    return LinearRelation.from_pairs(w + i, w - i)


def with_multivalued_part(rng, n, field="real", flavor="self_adjoint"):
    """(Skew-)self-adjoint relation with a nontrivial multivalued part."""
    d = int(rng.integers(0, n))
    return arens_compose(random_lagrangian_data(rng, n, d, field, flavor))


def perturb(rng, m, eps=1e-3):
    noise = random_matrix(rng, m.basis.shape, m.field.value)
    return LinearRelation(m.dims, Subspace.span(m.basis + eps * noise))


def relation_zoo(rng, n, field="real"):
    """One relation of each structural kind, for sweeping classification."""
    kinds = {
        "generic": random_relation(rng, n, n, field=field),
        "generic_n": random_relation(rng, n, n, k=n, field=field),
        "self_adjoint": random_self_adjoint(rng, n, field),
        "self_adjoint_mv": with_multivalued_part(rng, n, field),
        "skew_self_adjoint": random_skew_self_adjoint(rng, n, field),
        "skew_self_adjoint_mv": with_multivalued_part(rng, n, field, "skew_self_adjoint"),
        "unitary": LinearRelation.graph(random_unitary(rng, n, field)),
        "hermitian_graph": LinearRelation.graph(random_hermitian(rng, n, field)),
        "skew_graph": LinearRelation.graph(random_skew(rng, n, field)),
        "multivalued": LinearRelation.multivalued_part(n, field),
    }
    kinds["near_self_adjoint"] = perturb(rng, kinds["self_adjoint"])
    kinds["near_unitary"] = perturb(rng, kinds["unitary"])
    return kinds
