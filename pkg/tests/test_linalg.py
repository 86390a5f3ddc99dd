"""Exact linear algebra tests against the sympy-based oracles."""

from fractions import Fraction as Fr

import pytest
from hypothesis import assume, given, settings, strategies as st

from shadowlab import linalg as la
from shadowlab.errors import DegenerateBasisError, DimensionError, ParameterError
from oracles import oracle_det, oracle_rank, oracle_solve_gram

rat = st.fractions(
    min_value=-8, max_value=8, max_denominator=6
)
small_int = st.integers(min_value=-9, max_value=9)


def vec_st(d):
    return st.lists(rat, min_size=d, max_size=d).map(tuple)


def mat_st(rows, cols):
    return st.lists(vec_st(cols), min_size=rows, max_size=rows).map(tuple)


def test_det_identity():
    assert la.det(la.identity(3)) == 1


def test_det_repeated_row():
    m = la.as_mat([[1, 2], [1, 2]])
    assert la.det(m) == 0


def test_det_non_square_raises():
    with pytest.raises(DimensionError):
        la.det(la.as_mat([[1, 2, 3], [4, 5, 6]]))


def test_det_rational_entries():
    m = la.as_mat([[Fr(1, 2), Fr(1, 3)], [Fr(1, 5), Fr(1, 7)]])
    assert la.det(m) == Fr(1, 2) * Fr(1, 7) - Fr(1, 3) * Fr(1, 5)


@settings(deadline=None)
@given(st.integers(min_value=1, max_value=4).flatmap(lambda n: mat_st(n, n)))
def test_det_matches_oracle(m):
    assert la.det(m) == oracle_det(m)


@settings(deadline=None)
@given(
    st.integers(min_value=1, max_value=4).flatmap(
        lambda n: st.tuples(mat_st(n, n), st.just(n))
    ),
    st.data(),
)
def test_det_alternating(pair, data):
    m, n = pair
    i = data.draw(st.integers(min_value=0, max_value=n - 1))
    j = data.draw(st.integers(min_value=0, max_value=n - 1))
    assume(i != j)
    rows = list(m)
    rows[i], rows[j] = rows[j], rows[i]
    assert la.det(tuple(rows)) == -la.det(m)


@settings(deadline=None)
@given(st.integers(min_value=1, max_value=4).flatmap(lambda n: mat_st(n, n)), rat, st.data())
def test_det_multilinear_in_a_row(m, c, data):
    i = data.draw(st.integers(min_value=0, max_value=len(m) - 1))
    scaled = tuple(la.scale(r, c) if k == i else r for k, r in enumerate(m))
    assert la.det(scaled) == c * la.det(m)


def test_rank_examples():
    assert la.rank(la.as_mat([[0, 0, 0], [0, 0, 0]])) == 0
    assert la.rank(la.identity(4)) == 4
    assert la.rank(la.as_mat([[1, 2, 3], [2, 4, 6]])) == 1


@settings(deadline=None)
@given(
    st.integers(min_value=1, max_value=4).flatmap(
        lambda r: st.integers(min_value=1, max_value=4).flatmap(
            lambda c: mat_st(r, c)
        )
    )
)
def test_rank_matches_oracle(m):
    assert la.rank(m) == oracle_rank(m)


def test_orth_project_onto_axis():
    s = la.Subspace([(1, 0, 0)])
    assert la.orth_project((1, 1, 0), s) == la.as_vec((1, 0, 0))


def test_orth_project_fixed_point():
    s = la.Subspace([(1, 1, 0), (0, 0, 1)])
    v = la.as_vec((2, 2, 5))
    assert la.orth_project(v, s) == v


def test_orth_project_derived_example():
    # frozen from the Gram-solve oracle
    s = la.Subspace([(1, 1, 0), (0, 0, 1)])
    got = la.orth_project((1, 2, 3), s)
    assert got == (Fr(3, 2), Fr(3, 2), Fr(3))
    coords = oracle_solve_gram(s.basis, la.as_vec((1, 2, 3)))
    rebuilt = la.add(la.scale(s.basis[0], coords[0]), la.scale(s.basis[1], coords[1]))
    assert rebuilt == got


def test_orth_project_dependent_basis_raises():
    with pytest.raises(DegenerateBasisError):
        la.orth_project((1, 2), [(1, 1), (2, 2)])


@settings(deadline=None)
@given(vec_st(4), vec_st(4), st.lists(vec_st(4), min_size=1, max_size=3))
def test_orth_project_idempotent_and_self_adjoint(u, v, basis):
    assume(la.rank(basis) == len(basis))
    s = la.Subspace(basis)
    pu = la.orth_project(u, s)
    assert la.orth_project(pu, s) == pu
    # residual orthogonal to every basis vector
    ru = la.sub(u, pu)
    assert all(la.dot(ru, b) == 0 for b in basis)
    pv = la.orth_project(v, s)
    assert la.dot(pu, v) == la.dot(u, pv)


def test_intersect_shared_axis():
    a = la.Subspace([la.unit(3, 0), la.unit(3, 1)])
    b = la.Subspace([la.unit(3, 1), la.unit(3, 2)])
    got = la.intersect(a, b)
    assert got.dim == 1 and got.contains(la.unit(3, 1))


def test_intersect_transverse_lines():
    a = la.Subspace([la.unit(2, 0)])
    b = la.Subspace([la.unit(2, 1)])
    assert la.intersect(a, b).dim == 0


def test_intersect_derived_example():
    # two planes in d=4 sharing the line through e1+e2
    a = la.Subspace([(1, 1, 0, 0), (0, 0, 1, 0)])
    b = la.Subspace([(1, 1, 0, 0), (0, 0, 0, 1)])
    got = la.intersect(a, b)
    assert got.dim == 1
    assert got.contains((1, 1, 0, 0))


@settings(deadline=None)
@given(
    st.lists(vec_st(4), min_size=0, max_size=3),
    st.lists(vec_st(4), min_size=0, max_size=3),
)
def test_intersect_grassmann_formula(va, vb):
    a = la.span_of(va, ambient=4)
    b = la.span_of(vb, ambient=4)
    inter = la.intersect(a, b)
    total = la.subspace_sum(a, b)
    assert inter.dim == a.dim + b.dim - total.dim
    for v in inter.basis:
        assert a.contains(v) and b.contains(v)


def test_cayley_zero_is_identity():
    assert la.cayley_orthogonal([[0, 0], [0, 0]]) == la.identity(2)


def test_cayley_quarter_turn_example():
    got = la.cayley_orthogonal([[0, 1], [-1, 0]])
    assert got == la.as_mat([[0, 1], [-1, 0]])


def test_cayley_half_parameter_example():
    got = la.cayley_orthogonal([[0, Fr(1, 2)], [Fr(-1, 2), 0]])
    assert got == la.as_mat([[Fr(3, 5), Fr(4, 5)], [Fr(-4, 5), Fr(3, 5)]])


def test_cayley_rejects_non_skew():
    with pytest.raises(ParameterError):
        la.cayley_orthogonal([[0, 1], [1, 0]])


@settings(deadline=None)
@given(st.integers(min_value=2, max_value=4), st.data())
def test_cayley_orthogonality(d, data):
    entries = {}
    for i in range(d):
        for j in range(i + 1, d):
            entries[(i, j)] = data.draw(rat)
    skew = [[la.ZERO] * d for _ in range(d)]
    for (i, j), t in entries.items():
        skew[i][j] = t
        skew[j][i] = -t
    q = la.cayley_orthogonal(skew)
    assert la.matmul(la.transpose(q), q) == la.identity(d)
    assert la.det(q) == 1
    # inner products preserved exactly
    u = data.draw(vec_st(d))
    v = data.draw(vec_st(d))
    assert la.dot(la.matvec(q, u), la.matvec(q, v)) == la.dot(u, v)


def test_plane_rotation_touches_two_coords():
    r = la.plane_rotation(4, 0, 3, Fr(1, 7))
    assert la.matmul(la.transpose(r), r) == la.identity(4)
    # coordinates 1 and 2 are untouched
    assert la.matvec(r, la.unit(4, 1)) == la.unit(4, 1)
    assert la.matvec(r, la.unit(4, 2)) == la.unit(4, 2)


def test_generalized_cross_is_orthogonal():
    rows = la.as_mat([[1, 2, 0, 0], [0, 1, 1, 0], [3, 0, 0, 1]])
    n = la.generalized_cross(rows)
    assert not la.is_zero_vec(n)
    assert all(la.dot(n, r) == 0 for r in rows)


def test_generalized_cross_dependent_gives_zero():
    rows = la.as_mat([[1, 2, 0], [2, 4, 0]])
    assert la.is_zero_vec(la.generalized_cross(rows))


def test_primitive_canonical_form():
    assert la.primitive((Fr(-2, 3), Fr(4, 3))) == (1, -2)
    assert la.primitive((0, Fr(5, 7))) == (0, 1)
    with pytest.raises(ParameterError):
        la.primitive((0, 0))


@settings(deadline=None)
@given(vec_st(3), st.fractions(min_value=Fr(1, 8), max_value=8, max_denominator=8))
def test_primitive_scale_invariant(v, c):
    assume(not la.is_zero_vec(v))
    assert la.primitive(v) == la.primitive(la.scale(v, c))


def test_subspace_rejects_dependent_basis():
    with pytest.raises(DegenerateBasisError):
        la.Subspace([(1, 0), (2, 0)])


def test_subspace_span_keys_agree_up_to_basis_change():
    a = la.Subspace([(1, 0, 1), (0, 1, 0)])
    b = la.Subspace([(1, 1, 1), (1, -1, 1)])
    assert a == b
    assert hash(a) == hash(b)


def test_kernel_basis_matches_rank():
    m = la.as_mat([[1, 2, 3], [2, 4, 6]])
    ker = la.kernel_basis(m)
    assert len(ker) == 3 - la.rank(m)
    for v in ker:
        assert la.is_zero_vec(la.matvec(m, v))
