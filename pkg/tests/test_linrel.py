import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boundsys import linrel as lr
from boundsys import sampling
from boundsys.errors import (
    ClassificationError,
    CompatibilityError,
    DimensionError,
    FieldError,
    InputError,
    NotHermitianError,
    SurjectivityError,
)
from conftest import fields, seeds

S = lr.SesquilinearForm


# ---------------------------------------------------------------- Subspace

def test_span_orthonormalizes_and_drops_dependent_columns():
    u = lr.Subspace.span(np.array([[1.0, 2.0, 0.0], [0.0, 0.0, 1.0], [1.0, 2.0, 0.0]]))
    assert u.dim == 2
    assert np.allclose(u.basis.T @ u.basis, np.eye(2))


def test_non_orthonormal_basis_rejected():
    with pytest.raises(InputError):
        lr.Subspace(np.array([[1.0], [1.0]]))


def test_too_many_columns_rejected():
    with pytest.raises(DimensionError):
        lr.Subspace(np.eye(2, 3))


def test_basis_is_read_only():
    u = lr.Subspace.full(2)
    with pytest.raises(ValueError):
        u.basis[0, 0] = 5.0


def test_distance_is_sine_of_largest_principal_angle():
    t = 0.3
    a = lr.Subspace(np.array([[1.0], [0.0]]))
    b = lr.Subspace(np.array([[np.cos(t)], [np.sin(t)]]))
    assert a.distance(b) == pytest.approx(np.sin(t), abs=1e-15)
    assert a.distance(lr.Subspace.full(2)) == 1.0


@given(seeds, fields, st.integers(1, 6), st.integers(0, 6), st.integers(0, 6))
def test_intersection_and_sum_dimensions(seed, field, m, k1, k2):
    rng = np.random.default_rng(seed)
    a = sampling.random_subspace(rng, m, min(k1, m), field)
    b = sampling.random_subspace(rng, m, min(k2, m), field)
    # generic position: dim(a + b) = min(m, k1 + k2)
    assert a.sum(b).dim == min(m, a.dim + b.dim)
    assert a.intersect(b).dim == max(0, a.dim + b.dim - m)
    assert a.sum(b).dim + a.intersect(b).dim == a.dim + b.dim


@given(seeds, fields, st.integers(1, 6), st.integers(0, 6))
def test_complement_is_involution(seed, field, m, k):
    rng = np.random.default_rng(seed)
    u = sampling.random_subspace(rng, m, min(k, m), field)
    c = u.complement()
    assert c.dim == m - u.dim
    assert np.abs(c.basis.conj().T @ u.basis).max(initial=0) < 1e-12
    assert c.complement().equals(u)


def test_preimage_of_zero_is_kernel():
    f = np.array([[1.0, 1.0, 0.0]])
    k = lr.Subspace.zero(1).preimage(f)
    assert k.equals(lr.Subspace.span(np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])))


def test_subspace_json_roundtrip():
    rng = np.random.default_rng(1)
    for field in ("real", "complex"):
        u = sampling.random_subspace(rng, 5, 2, field)
        v = lr.from_dict(u.to_dict())
        assert v.equals(u, 1e-15)
        assert v.field == u.field


# ---------------------------------------------------------------- forms

def test_form_convention_linear_in_first_slot():
    w = S(np.array([[2.0, 1j], [-1j, 1.0]]), "symmetric")
    x, y = np.array([1.0, 1j]), np.array([2.0, -1.0])
    assert w(1j * x, y) == pytest.approx(1j * w(x, y))
    assert w(x, 1j * y) == pytest.approx(-1j * w(x, y))


def test_standard_skew_form_value():
    w = S.standard_skew(1)
    # <x, v> - <y, u>
    assert w(np.array([2.0, 3.0]), np.array([5.0, 7.0])) == pytest.approx(2 * 7 - 3 * 5)


def test_declared_kinds_validated():
    with pytest.raises(NotHermitianError):
        S(np.array([[0.0, 1.0], [0.0, 0.0]]), "skew")
    with pytest.raises(NotHermitianError):
        S(np.array([[0.0, 1.0], [0.0, 0.0]]), "symmetric")


def test_form_orthogonal_complement_examples():
    w = S.standard_skew(1)
    assert form_dim(lr.Subspace.full(2), w) == 0
    diag = lr.LinearRelation.graph(np.eye(1)).space
    assert lr.form_orthogonal_complement(diag, w).equals(diag)
    vert = lr.LinearRelation.multivalued_part(1).space
    assert lr.form_orthogonal_complement(vert, w).equals(vert)


def form_dim(u, w):
    return lr.form_orthogonal_complement(u, w).dim


def test_form_field_mismatch():
    with pytest.raises(FieldError):
        lr.form_orthogonal_complement(lr.Subspace.full(2, "complex"), S.standard_skew(1))


# ---------------------------------------------------------------- relations

def brute_force_adjoint(m):
    """``{(y, x) : <y, v> = <x, u>}`` via the nullspace of the stacked conditions, by SVD."""
    n1, n2 = m.dims
    rows = []
    for j in range(m.space.dim):
        u, v = m.first[:, j], m.second[:, j]
        rows.append(np.concatenate([v.conj(), -u.conj()]))
    a = np.array(rows).reshape(len(rows), n1 + n2)
    if a.shape[0] == 0:
        return lr.Subspace.full(n1 + n2, m.field.value)
    _, s, vh = np.linalg.svd(a)
    r = int(np.sum(s > 1e-10))
    return lr.Subspace(vh[r:].conj().T)


def test_adjoint_of_graph_is_graph_of_conjugate_transpose():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    adj = lr.relation_adjoint(lr.LinearRelation.graph(a))
    assert adj.dims == (3, 2)
    assert adj.equals(lr.LinearRelation.graph(a.conj().T))


def test_adjoint_of_hermitian_graph_is_itself():
    a = np.array([[2.0, 1 - 1j], [1 + 1j, 3.0]])
    m = lr.LinearRelation.graph(a)
    assert lr.relation_adjoint(m).equals(m)


def test_adjoint_of_multivalued_part():
    m = lr.LinearRelation.multivalued_part(3)
    assert lr.relation_adjoint(m).equals(m)


@given(seeds, fields, st.integers(0, 4), st.integers(0, 4))
def test_adjoint_matches_brute_force(seed, field, n1, n2):
    if n1 + n2 == 0:
        return
    rng = np.random.default_rng(seed)
    m = sampling.random_relation(rng, n1, n2, field=field)
    assert lr.relation_adjoint(m).space.equals(brute_force_adjoint(m), 1e-9)


@given(seeds, fields, st.integers(1, 3))
def test_adjoint_inverse_orthogonal_identity_chain(seed, field, n):
    rng = np.random.default_rng(seed)
    m = sampling.random_relation(rng, n, n, field=field)
    adj = lr.relation_adjoint(m)
    inv, orth, sm = lr.relation_inverse, lr.relation_orthogonal, lr.s_multiply
    chain = [
        inv(sm(orth(m))),
        inv(orth(sm(m))),
        orth(inv(sm(m))),
        orth(sm(inv(m))),
        sm(orth(inv(m))),
    ]
    for c in chain:
        assert adj.equals(c)
    assert lr.relation_adjoint(adj).equals(m)


@given(seeds, fields, st.integers(1, 4), st.integers(1, 4))
def test_inverse_is_involution(seed, field, n1, n2):
    m = sampling.random_relation(np.random.default_rng(seed), n1, n2, field=field)
    assert lr.relation_inverse(lr.relation_inverse(m)).equals(m, 1e-14)


def test_inverse_of_invertible_graph():
    a = np.array([[2.0, 1.0], [1.0, 1.0]])
    assert lr.relation_inverse(lr.LinearRelation.graph(a)).equals(lr.LinearRelation.graph(np.linalg.inv(a)))


def test_s_multiply_needs_square():
    with pytest.raises(DimensionError):
        lr.s_multiply(lr.LinearRelation.graph(np.ones((2, 3))))


def test_relation_json_roundtrip_and_graph_of():
    m = lr.from_dict({"type": "LinearRelation", "field": "real", "graph_of": [[1.0, 2.0], [3.0, 4.0]]})
    assert m.equals(lr.LinearRelation.graph(np.array([[1.0, 2.0], [3.0, 4.0]])))
    assert lr.from_dict(m.to_dict()).equals(m, 1e-14)


# ---------------------------------------------------------------- classify

def test_classify_hermitian_diagonal():
    c = lr.classify(lr.LinearRelation.graph(np.diag([1.0, 2.0]).astype(complex)))
    assert c.flags() == {
        "symmetric": True, "self_adjoint": True, "skew_symmetric": False,
        "skew_self_adjoint": False, "unitary": False, "is_operator_graph": True,
    }


def test_classify_rotation_generator():
    c = lr.classify(lr.LinearRelation.graph(np.array([[0.0, 1.0], [-1.0, 0.0]])))
    assert c.skew_symmetric and c.skew_self_adjoint and c.is_operator_graph
    assert not c.self_adjoint
    # [[0,1],[-1,0]] is also orthogonal
    assert c.unitary


def test_classify_random_unitary():
    q = sampling.random_unitary(np.random.default_rng(5), 3, "complex")
    m = lr.LinearRelation.graph(q)
    c = lr.classify(m)
    assert c.unitary and c.is_operator_graph
    assert not c.self_adjoint and not c.skew_self_adjoint
    assert lr.is_self_orthogonal(m.space, S.standard_unitary(3, 3, "complex"))


def test_square_only_flags_none_for_rectangular():
    c = lr.classify(lr.LinearRelation.graph(np.ones((2, 3))))
    assert c.self_adjoint is None
    with pytest.raises(DimensionError):
        c.require("self_adjoint")


@given(seeds, fields, st.integers(1, 6))
def test_zoo_flags_match_self_orthogonality(seed, field, n):
    for kind, m in sampling.relation_zoo(np.random.default_rng(seed), n, field).items():
        c = lr.classify(m)
        assert c.self_adjoint == c.self_orthogonal_skew, kind
        assert c.skew_self_adjoint == c.self_orthogonal_symmetric, kind
        assert c.unitary == c.self_orthogonal_unitary, kind


@given(seeds, fields, st.integers(1, 5))
def test_graph_criterion_for_self_adjoint(seed, field, n):
    rng = np.random.default_rng(seed)
    m = sampling.with_multivalued_part(rng, n, field) if seed % 2 else sampling.random_self_adjoint(rng, n, field)
    c = lr.classify(m)
    assert c.self_adjoint
    assert c.is_operator_graph == (c.domain_dim == n)


@given(seeds, fields, st.integers(1, 5))
def test_unitary_self_orthogonal_preserves_norm(seed, field, n):
    rng = np.random.default_rng(seed)
    m = lr.LinearRelation.graph(sampling.random_unitary(rng, n, field))
    z = m.basis @ sampling.random_matrix(rng, (m.space.dim,), field)
    assert np.linalg.norm(z[:n]) == pytest.approx(np.linalg.norm(z[n:]), rel=1e-12)


# ---------------------------------------------------------------- Arens

def test_arens_multivalued_part_gives_empty_x():
    d = lr.arens_decompose(lr.LinearRelation.multivalued_part(3))
    assert d.X.dim == 0 and d.L.shape == (0, 0)


def test_arens_hermitian_graph():
    a = np.array([[1.0, 2.0, 0.0], [2.0, 0.0, 1.0], [0.0, 1.0, -1.0]])
    d = lr.arens_decompose(lr.LinearRelation.graph(a))
    assert d.X.dim == 3
    assert np.allclose(d.X.basis @ d.L @ d.X.basis.T, a)


def test_arens_compose_examples():
    u = lr.arens_compose(lr.LagrangianData(lr.Subspace.zero(2), np.zeros((0, 0))))
    assert u.equals(lr.LinearRelation.multivalued_part(2))
    u = lr.arens_compose(lr.LagrangianData(lr.Subspace.full(2), np.zeros((2, 2))))
    assert u.equals(lr.LinearRelation.graph(np.zeros((2, 2))))
    x = lr.Subspace(np.array([[1.0], [1.0]]) / np.sqrt(2))
    u = lr.arens_compose(lr.LagrangianData(x, np.array([[2.0]])))
    assert u.space.dim == 2
    w = S.standard_skew(2)
    assert lr.form_orthogonal_complement(u.space, w).equals(u.space)
    assert lr.classify(u).self_adjoint


@given(seeds, fields, st.integers(1, 8), st.sampled_from(lr.FLAVORS))
def test_arens_roundtrip(seed, field, n, flavor):
    rng = np.random.default_rng(seed)
    data = sampling.random_lagrangian_data(rng, n, field=field, flavor=flavor)
    u = lr.arens_compose(data)
    assert getattr(lr.classify(u), flavor)
    back = lr.arens_decompose(u, flavor)
    assert back.X.equals(data.X)
    assert lr.arens_compose(back).space.distance(u.space) <= 1e-10


def test_arens_rejects_non_self_adjoint():
    with pytest.raises(ClassificationError):
        lr.arens_decompose(lr.LinearRelation.graph(np.array([[1.0, 2.0], [0.0, 1.0]])))


def test_lagrangian_data_checks_flavor():
    with pytest.raises(NotHermitianError):
        lr.LagrangianData(lr.Subspace.full(2), np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NotHermitianError):
        lr.LagrangianData(lr.Subspace.full(1), np.array([[1.0]]), "skew_self_adjoint")


# ---------------------------------------------------------------- unitary / Cayley

def test_unitary_extract_examples():
    assert np.allclose(lr.unitary_extract(lr.LinearRelation.graph(np.eye(3))), np.eye(3))
    t = 0.4
    r = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
    assert np.allclose(lr.unitary_extract(lr.LinearRelation.graph(r)), r, atol=1e-12)
    q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((4, 4)))
    assert np.abs(lr.unitary_extract(lr.LinearRelation.graph(q)) - q).max() < 1e-10


def test_unitary_extract_rejects_non_self_orthogonal():
    with pytest.raises(ClassificationError):
        lr.unitary_extract(lr.LinearRelation.graph(2 * np.eye(2)))


def test_cayley_of_zero_operator():
    cu = lr.cayley_map(lr.LinearRelation.graph(np.zeros((2, 2))))
    assert cu.equals(lr.LinearRelation.graph(-np.eye(2)))


def test_cayley_of_skew_matrix():
    a = np.array([[0.0, 1.0], [-1.0, 0.0]])
    i = np.eye(2)
    expected = (a - i) @ np.linalg.inv(a + i)
    cu = lr.cayley_map(lr.LinearRelation.graph(a))
    assert cu.equals(lr.LinearRelation.graph(expected))
    assert lr.is_unitary_graph(cu)


def test_cayley_complex_of_hermitian():
    a = np.array([[1.0, 2 - 1j], [2 + 1j, -0.5]])
    i = np.eye(2)
    expected = (a - 1j * i) @ np.linalg.inv(a + 1j * i)
    cu = lr.cayley_map(lr.LinearRelation.graph(a), "complex_symmetric")
    assert cu.equals(lr.LinearRelation.graph(expected))


def test_cayley_complex_variant_needs_complex_field():
    with pytest.raises(FieldError):
        lr.cayley_map(lr.LinearRelation.graph(np.eye(2)), "complex_symmetric")


@given(seeds, st.integers(1, 5))
def test_cayley_block_intertwines_forms(seed, n):
    rng = np.random.default_rng(seed)
    c = lr.cayley_block(n)
    ws, wu = S.standard_symmetric(n), S.standard_unitary(n)
    x, y = rng.standard_normal(2 * n), rng.standard_normal(2 * n)
    assert ws(x, y) == pytest.approx(wu(c @ x, c @ y), abs=1e-12)
    assert np.allclose(c.T @ c, np.eye(2 * n), atol=1e-14)
    cc = lr.cayley_block(n, "complex_symmetric")
    wk = S.standard_skew(n, "complex")
    xc = x + 1j * rng.standard_normal(2 * n)
    yc = y + 1j * rng.standard_normal(2 * n)
    # complex variant matches i * skew form up to the unitary form
    assert 1j * wk(xc, yc) == pytest.approx(wu(cc @ xc, cc @ yc), abs=1e-12)


# ---------------------------------------------------------------- pullback

def random_compatible_triple(rng, n, k, field):
    """F: K^{n+k} -> K^n surjective with kernel of dim k; w1 = F^H w2 F."""
    w2 = S.standard_skew(n // 2, field)
    m = w2.dim
    base = sampling.random_matrix(rng, (m, m), field)
    while abs(np.linalg.det(base)) < 1e-3:
        base = sampling.random_matrix(rng, (m, m), field)
    f = np.hstack([base, np.zeros((m, k))]) @ sampling.random_unitary(rng, m + k, field)
    w1 = S(f.conj().T @ w2.gram @ f)
    return f, w1, w2


def test_pullback_identity_map():
    w = S.standard_skew(1)
    v = lr.LinearRelation.graph(np.eye(1)).space
    assert lr.pullback(v, np.eye(2), w, w).equals(v)


def test_pullback_of_zero_is_kernel():
    f = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    w2 = S.standard_skew(1)
    w1 = S(f.T @ w2.gram @ f)
    res = lr.pullback(lr.Subspace.zero(2), f, w1, w2)
    assert res.equals(lr.Subspace(np.array([[0.0], [0.0], [1.0]])))


def test_pullback_errors():
    w = S.standard_skew(1)
    with pytest.raises(SurjectivityError):
        lr.pullback(lr.Subspace.zero(2), np.array([[1.0, 0.0], [0.0, 0.0]]), w, w)
    with pytest.raises(CompatibilityError):
        lr.pullback(lr.Subspace.zero(2), 2 * np.eye(2), w, w)


@given(seeds, fields, st.sampled_from([2, 4]), st.integers(0, 2))
def test_pullback_preserves_self_orthogonality(seed, field, n, k):
    rng = np.random.default_rng(seed)
    f, w1, w2 = random_compatible_triple(rng, n, k, field)
    half = w2.dim // 2
    lag = sampling.random_self_adjoint(rng, half, field).space
    other = sampling.random_subspace(rng, w2.dim, int(rng.integers(0, w2.dim + 1)), field)
    for v in (lag, other):
        u = lr.pullback(v, f, w1, w2)
        assert lr.is_self_orthogonal(v, w2) == lr.is_self_orthogonal(u, w1)


def test_finite_set_examples():
    r = lr.finite_set_pullback_check(["a"], ["a"], {("a", "a")}, {"a": "a"})
    assert r.passed and r.self_orthogonal_source == [frozenset({"a"})]
    r = lr.finite_set_pullback_check([1, 2], ["a"], {("a", "a")}, {1: "a", 2: "a"})
    assert r.passed
    assert r.self_orthogonal_source == [frozenset({1, 2})]


def test_finite_set_needs_surjection():
    with pytest.raises(SurjectivityError):
        lr.finite_set_pullback_check([1], ["a", "b"], set(), {1: "a"})


@given(seeds, st.integers(1, 5), st.integers(1, 4))
def test_finite_set_random(seed, n1, n2):
    rng = np.random.default_rng(seed)
    n2 = min(n1, n2)
    x1, x2 = list(range(n1)), [f"y{i}" for i in range(n2)]
    f = {x: x2[x] if x < n2 else x2[int(rng.integers(n2))] for x in x1}
    r2 = {(a, b) for a in x2 for b in x2 if rng.random() < 0.5}
    assert lr.finite_set_pullback_check(x1, x2, r2, f).passed


# ---------------------------------------------------------------- Lemma (symmetric restriction)

@given(seeds, fields, st.integers(1, 4))
def test_lagrangian_between_symmetric_and_adjoint(seed, field, n):
    rng = np.random.default_rng(seed)
    a = sampling.random_self_adjoint(rng, n, field)
    k = int(rng.integers(0, n + 1))
    m0 = lr.LinearRelation((n, n), lr.Subspace.span(a.basis @ sampling.random_matrix(rng, (n, k), field)))
    m0_star = lr.relation_adjoint(m0)
    assert m0_star.contains(m0)
    w = S.standard_skew(n, field)
    # the self-adjoint extension is Lagrangian inside M0*
    assert lr.is_self_orthogonal_within(a.space, m0_star.space, w)
    # random intermediate subspaces: Lagrangian-in-M0* iff self-adjoint
    for _ in range(4):
        extra = m0_star.basis @ sampling.random_matrix(rng, (m0_star.space.dim, int(rng.integers(0, 3))), field)
        u = lr.Subspace.span(np.hstack([m0.basis, extra]))
        assert lr.is_self_orthogonal_within(u, m0_star.space, w) == bool(
            lr.classify(lr.LinearRelation((n, n), u)).self_adjoint
        )


# ---------------------------------------------------------------- boundary systems

def test_boundary_system_identity():
    w = S.standard_skew(2)
    r = lr.boundary_system_verify(lr.BoundarySystem(w, np.eye(4), w, (2, 2)))
    assert r.ok and r.compatibility_residual == 0.0


def test_boundary_system_rank_failure():
    w = S.standard_skew(2)
    f = np.eye(4)
    f[3, 3] = 0.0
    r = lr.boundary_system_verify(lr.BoundarySystem(w, f, w, (2, 2)))
    assert not r.surjective and r.rank == 3


def test_boundary_system_shape_check():
    w = S.standard_skew(2)
    with pytest.raises(DimensionError):
        lr.BoundarySystem(w, np.eye(3), w, (2, 2))


@settings(max_examples=20)
@given(seeds)
def test_random_lagrangian_subspace_pulls_back_under_boundary_map(seed):
    rng = np.random.default_rng(seed)
    f, w1, w2 = random_compatible_triple(rng, 2, 1, "real")
    bs = lr.BoundarySystem(w1, f, w2, (1, 1))
    assert lr.boundary_system_verify(bs).ok
