"""Tests for certified walks, transformations and chain bookkeeping."""

from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, assume
from hypothesis import strategies as st

import shadowlab.families as fam
import shadowlab.linalg as la
import shadowlab.polytope as pt
import shadowlab.shadow as sh
import shadowlab.walk as wk
from shadowlab.errors import (
    DimensionError,
    GeometryError,
    InadmissiblePlaneError,
    ParameterError,
    WalkError,
)
from oracles import oracle_hull_2d

CUBE = fam.hypercube(3)
TESS = fam.hypercube(4)
PRISM = fam.prism(((0, 0), (1, 0), (0, 1)), (0, 0, 1))
PERT = fam.perturbed_hypercube(Fr(1, 100))
PN2 = fam.pn_polytope(2)

Q3, ETAS3 = wk.reference_isometry(CUBE)
MOVED3 = pt.apply_isometry(CUBE, Q3)
Q4, ETAS4 = wk.reference_isometry(TESS)
MOVED4 = pt.apply_isometry(TESS, Q4)

TILT4_WIT = sh.ProjectionPlane(((1, 1, 1, 0), (0, 0, 2, 1))).complement
TRI_WIT = la.span_of([(1, 2, 0)])


def face_id(p, vs):
    want = tuple(sorted(vs))
    for i, f in enumerate(pt.k_faces(p, 2)):
        if f.vertex_ids == want:
            return i
    raise AssertionError(f"no 2-face {vs}")


def class_id_by_span(p, vectors):
    key = la.span_of(vectors).canonical_key()
    for cid, c in enumerate(pt.parallel_classes(p)):
        if c.direction_plane.canonical_key() == key:
            return cid
    raise AssertionError("no class with that direction plane")


def is_admissible_rows(p, rows):
    return all(
        sh.class_degeneracy_det(p, rows, c.direction_plane) != 0
        for c in pt.parallel_classes(p)
    )


def plane_at(seg, t):
    return sh.ProjectionPlane.from_orthogonal(seg.rows_at(t))


def _between(q, a, b):
    cx = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])
    if cx != 0:
        return False
    return (
        min(a[0], b[0]) <= q[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= q[1] <= max(a[1], b[1])
    )


def oracle_visible_edges(p, fid, w):
    """Face edges whose images sit on the hull boundary, via the test
    hull oracle rather than the shadow module."""
    imgs = [w.coords(v) for v in p.vertices]
    hull = oracle_hull_2d(list(dict.fromkeys(imgs)))

    def on_bound(q):
        n = len(hull)
        return any(_between(q, hull[i], hull[(i + 1) % n]) for i in range(n))

    face = pt.k_faces(p, 2)[fid]
    out = set()
    for e in pt.face_edges(p, face):
        a, b = e.vertex_ids
        pa, pb = imgs[a], imgs[b]
        mid = ((pa[0] + pb[0]) / 2, (pa[1] + pb[1]) / 2)
        if on_bound(pa) and on_bound(pb) and on_bound(mid):
            out.add((a, b))
    return out


# ---------------------------------------------------------------- isometry


@pytest.mark.parametrize(
    "p", [CUBE, TESS, PRISM, PN2], ids=["cube", "tesseract", "prism", "pn2"]
)
def test_reference_isometry_is_orthogonal(p):
    q, _ = wk.reference_isometry(p)
    assert la.matmul(la.transpose(q), q) == la.identity(p.dim)


@pytest.mark.parametrize(
    "p", [CUBE, TESS, PRISM, PN2], ids=["cube", "tesseract", "prism", "pn2"]
)
def test_reference_isometry_conditions(p):
    d = p.dim
    q, etas = wk.reference_isometry(p)
    moved = pt.apply_isometry(p, q)
    # no proscribed direction falls into the reference hyperplane
    for pd in pt.proscribed_directions(moved):
        assert pd.line[0] != 0
    # every class meets the hyperplane in a line off the last axis wall
    hp = la.Subspace([la.unit(d, i) for i in range(1, d)])
    for cls in pt.parallel_classes(moved):
        inter = la.intersect(cls.direction_plane, hp)
        assert inter.dim == 1
        assert inter.basis[0][d - 1] != 0
    # which makes the reference orthogonal span admissible
    rows = tuple(la.unit(d, i) for i in range(1, d - 1))
    assert is_admissible_rows(moved, rows)
    assert [e.class_id for e in etas] == list(range(len(etas)))
    assert all(e.eta[d - 1] == 1 for e in etas)


def test_reference_isometry_identity_when_arranged():
    q, _ = wk.reference_isometry(MOVED3)
    assert q == la.identity(3)


def test_reference_isometry_rejects_low_dimension():
    with pytest.raises(ParameterError):
        wk.reference_isometry(fam.hypercube(2))


# ------------------------------------------------------------- polynomials


def test_constant_segment_polynomial():
    rows = (la.unit(3, 1),)
    seg = wk.WalkSegment(rows, ((0, 0, 0),), (0, 1))
    for cls in pt.parallel_classes(MOVED3):
        poly = wk.degeneration_polynomial(seg, cls)
        assert poly.c1 == 0
        assert poly.c0 == sh.class_degeneracy_det(MOVED3, rows, cls.direction_plane)
        assert poly.at(Fr(1, 3)) == poly.c0


def test_polynomial_roots_match_dense_scan():
    seg = wk.WalkSegment(((1, 1, 1),), ((-1, -2, -5),), (0, 1))
    for cls in pt.parallel_classes(MOVED3):
        poly = wk.degeneration_polynomial(seg, cls)
        f1, f2 = cls.direction_plane.basis
        grid = [Fr(i, 200) for i in range(201)]
        vals = [la.det((seg.rows_at(t)[0], f1, f2)) for t in grid]
        brackets = [
            (grid[i], grid[i + 1])
            for i in range(200)
            if vals[i] * vals[i + 1] < 0
        ]
        exact_zeros = [t for t, v in zip(grid, vals) if v == 0]
        root = poly.root()
        if root is None or not 0 <= root <= 1:
            assert not brackets and not exact_zeros
        elif exact_zeros:
            assert exact_zeros == [root]
        else:
            assert len(brackets) == 1
            lo, hi = brackets[0]
            assert lo < root < hi
        # the polynomial reproduces the determinant everywhere
        for t in (Fr(1, 7), Fr(3, 5), Fr(9, 11)):
            assert poly.at(t) == la.det((seg.rows_at(t)[0], f1, f2))


def test_polynomial_rejects_nonaffine():
    cid = class_id_by_span(TESS, ((1, 0, 0, 0), (0, 1, 0, 0)))
    cls = pt.parallel_classes(TESS)[cid]
    seg = wk.WalkSegment(
        ((1, 0, 0, 0), (0, 1, 0, 0)),
        ((0, 0, 1, 0), (0, 0, 0, 1)),
        (0, 1),
    )
    with pytest.raises(WalkError):
        wk.degeneration_polynomial(seg, cls)


# ----------------------------------------------------------- segment type


def test_segment_rescale_preserves_family():
    seg = wk.WalkSegment(((1, 2, 3),), ((-1, 0, 4),), (0, 1))
    r = seg.rescaled(Fr(1, 3), Fr(2, 3))
    assert r.t_range == (Fr(1, 3), Fr(2, 3))
    assert r.rows_at(Fr(1, 3)) == seg.rows_at(0)
    assert r.rows_at(Fr(2, 3)) == seg.rows_at(1)
    assert r.rows_at(Fr(1, 2)) == seg.rows_at(Fr(1, 2))


def test_segment_reverse_swaps_ends():
    seg = wk.WalkSegment(((1, 2, 3),), ((-1, 0, 4),), (Fr(1, 4), Fr(3, 4)))
    rev = seg.reversed()
    assert rev.t_range == seg.t_range
    assert rev.rows_at(Fr(1, 4)) == seg.rows_at(Fr(3, 4))
    assert rev.rows_at(Fr(3, 4)) == seg.rows_at(Fr(1, 4))
    back = rev.reversed()
    assert back.rows_at(Fr(1, 3)) == seg.rows_at(Fr(1, 3))


def test_segment_validation():
    with pytest.raises(DimensionError):
        wk.WalkSegment(((1, 2, 3),), (), (0, 1))
    with pytest.raises(DimensionError):
        wk.WalkSegment(((1, 2, 3),), ((1, 2),), (0, 1))
    with pytest.raises(ParameterError):
        wk.WalkSegment(((1, 2, 3),), ((0, 0, 0),), (1, 1))


# -------------------------------------------------------- walk fragments


def test_to_hyperplane_empty_when_inside():
    plan = wk.walk_to_hyperplane(MOVED3, la.span_of([(0, 1, 0)]), seed=0)
    assert plan.segments == ()
    assert plan.events == ()
    assert wk.verify_walk(MOVED3, plan).valid


def test_to_hyperplane_cube():
    plan = wk.walk_to_hyperplane(MOVED3, la.span_of([(1, 1, 1)]), seed=0)
    assert len(plan.segments) == 1
    assert [(e.time, e.class_id) for e in plan.events] == [
        (Fr(23, 127), 2),
        (Fr(1, 4), 0),
    ]
    end = plan.segments[-1].rows_at(1)
    assert all(r[0] == 0 for r in end)
    assert is_admissible_rows(MOVED3, end)
    cert = wk.verify_walk(MOVED3, plan)
    assert cert.valid, cert.violations


def test_to_hyperplane_events_match_dense_scan():
    plan = wk.walk_to_hyperplane(MOVED3, la.span_of([(1, 1, 1)]), seed=0)
    seg = plan.segments[0]
    lo, hi = seg.t_range
    found = []
    for cid, cls in enumerate(pt.parallel_classes(MOVED3)):
        f1, f2 = cls.direction_plane.basis
        grid = [lo + (hi - lo) * Fr(i, 256) for i in range(257)]
        vals = [la.det(seg.rows_at(t) + (f1, f2)) for t in grid]
        for i in range(256):
            if vals[i] == 0 and grid[i] not in (lo, hi):
                found.append((grid[i], cid))
            elif vals[i] * vals[i + 1] < 0:
                found.append(((grid[i], grid[i + 1]), cid))
    assert len(found) == len(plan.events)
    found.sort(key=lambda mc: mc[0][0] if isinstance(mc[0], tuple) else mc[0])
    for (mark, cid), ev in zip(found, sorted(plan.events)):
        assert cid == ev.class_id
        if isinstance(mark, tuple):
            assert mark[0] < ev.time < mark[1]
        else:
            assert mark == ev.time


def test_to_hyperplane_tesseract():
    start = la.span_of(((1, 1, 1, 1), (1, -1, 2, 0)))
    plan = wk.walk_to_hyperplane(MOVED4, start, seed=0)
    assert len(plan.segments) == 1
    assert len(plan.events) == 5
    assert len({e.time for e in plan.events}) == 5
    cert = wk.verify_walk(MOVED4, plan)
    assert cert.valid, cert.violations
    assert all(r[0] == 0 for r in plan.segments[-1].rows_at(1))


def test_to_hyperplane_rejects_inadmissible_start():
    bad = la.span_of([pt.parallel_classes(MOVED3)[0].direction_plane.basis[0]])
    with pytest.raises(InadmissiblePlaneError):
        wk.walk_to_hyperplane(MOVED3, bad, seed=0)


def test_to_hyperplane_requires_arrangement():
    # the unrotated cube has axis directions inside the hyperplane
    with pytest.raises(WalkError):
        wk.walk_to_hyperplane(CUBE, la.span_of([(1, 1, 1)]), seed=0)


def test_to_hyperplane_rejects_wrong_dimension():
    with pytest.raises(DimensionError):
        wk.walk_to_hyperplane(MOVED3, la.span_of([(1, 1, 1), (1, 0, 0)]))


def test_within_empty_at_reference():
    ref = la.span_of([(0, 1, 0, 0), (0, 0, 1, 0)])
    plan = wk.walk_within_hyperplane(MOVED4, ref, seed=0)
    assert plan.segments == ()
    assert wk.verify_walk(MOVED4, plan).valid


def test_within_cube_reaches_reference():
    plan = wk.walk_within_hyperplane(
        MOVED3, la.span_of([(0, 1, Fr(1, 2))]), seed=0
    )
    assert len(plan.segments) == 1
    assert plan.segments[-1].span_at(1) == la.span_of([(0, 1, 0)])
    cert = wk.verify_walk(MOVED3, plan)
    assert cert.valid, cert.violations


def test_within_tesseract_staircase():
    start = la.span_of([(0, 1, Fr(-1, 2), 0), (0, 0, 0, 1)])
    assert is_admissible_rows(MOVED4, start.basis)
    plan = wk.walk_within_hyperplane(MOVED4, start, seed=0)
    assert len(plan.segments) == 2
    assert len(plan.events) == 4
    assert plan.segments[-1].span_at(1) == la.span_of(
        [(0, 1, 0, 0), (0, 0, 1, 0)]
    )
    cert = wk.verify_walk(MOVED4, plan)
    assert cert.valid, cert.violations


def test_within_rejects_start_outside_hyperplane():
    with pytest.raises(ParameterError):
        wk.walk_within_hyperplane(MOVED3, la.span_of([(1, 1, 1)]), seed=0)


def test_within_rejects_inadmissible_start():
    with pytest.raises(InadmissiblePlaneError):
        wk.walk_within_hyperplane(MOVED3, la.span_of([ETAS3[0].eta]), seed=0)


# --------------------------------------------------------------- full walk


def test_full_walk_same_span_is_empty():
    a = la.span_of([(1, 2, 3)])
    b = la.span_of([(2, 4, 6)])
    plan = wk.full_walk(CUBE, a, b, seed=0)
    assert plan.segments == ()
    assert plan.events == ()
    assert plan.isometry == la.identity(3)
    assert wk.verify_walk(CUBE, plan).valid


def test_full_walk_cube():
    frm = la.span_of([(1, 2, 3)])
    to = la.span_of([(3, -1, 5)])
    plan = wk.full_walk(CUBE, frm, to, seed=1)
    cert = wk.verify_walk(CUBE, plan)
    assert cert.valid, cert.violations
    assert plan.segments[0].span_at(0) == frm
    assert plan.segments[-1].span_at(plan.segments[-1].t_range[1]) == to
    assert plan.segments[0].t_range[0] == 0
    assert plan.segments[-1].t_range[1] == 1
    rot = plan.isometry
    assert la.matmul(la.transpose(rot), rot) == la.identity(3)
    assert plan.isometry_inv == la.transpose(rot)
    assert cert.events == plan.events


def test_full_walk_tesseract():
    planes = sh.sample_admissible(TESS, 7, 2)
    frm = planes[0].complement
    to = planes[1].complement
    plan = wk.full_walk(TESS, frm, to, seed=2)
    cert = wk.verify_walk(TESS, plan)
    assert cert.valid, cert.violations
    assert plan.segments[0].span_at(0) == la.span_of(frm.basis)
    assert plan.segments[-1].span_at(1) == la.span_of(to.basis)
    assert len({e.time for e in plan.events}) == len(plan.events)


@pytest.mark.parametrize("seed", range(3))
def test_full_walk_prism_seeds(seed):
    planes = sh.sample_admissible(PRISM, 100 + seed, 2)
    plan = wk.full_walk(
        PRISM, planes[0].complement, planes[1].complement, seed=seed
    )
    cert = wk.verify_walk(PRISM, plan)
    assert cert.valid, cert.violations


def test_full_walk_seed_determinism():
    frm = la.span_of([(1, 2, 3)])
    to = la.span_of([(3, -1, 5)])
    p1 = wk.full_walk(CUBE, frm, to, seed=9)
    p2 = wk.full_walk(CUBE, frm, to, seed=9)
    assert p1.events == p2.events
    assert [(s.base, s.slope, s.t_range) for s in p1.segments] == [
        (s.base, s.slope, s.t_range) for s in p2.segments
    ]


def test_full_walk_rejects_inadmissible_endpoint():
    with pytest.raises(InadmissiblePlaneError):
        wk.full_walk(
            CUBE, la.span_of([(0, 0, 1)]), la.span_of([(1, 2, 3)]), seed=0
        )


@settings(max_examples=10, deadline=None)
@given(
    st.tuples(*[st.integers(-5, 5)] * 3),
    st.tuples(*[st.integers(-5, 5)] * 3),
    st.integers(0, 99),
)
def test_full_walk_random_endpoints(u, v, seed):
    assume(any(x != 0 for x in u) and any(x != 0 for x in v))
    assume(is_admissible_rows(CUBE, (u,)) and is_admissible_rows(CUBE, (v,)))
    plan = wk.full_walk(CUBE, la.span_of([u]), la.span_of([v]), seed=seed)
    cert = wk.verify_walk(CUBE, plan)
    assert cert.valid, cert.violations
    if plan.segments:
        assert plan.segments[0].span_at(0) == la.span_of([u])
        assert plan.segments[-1].span_at(1) == la.span_of([v])


# ------------------------------------------------------------ verification


def test_verify_empty_plans():
    ident = la.identity(3)
    assert wk.verify_walk(CUBE, wk.WalkPlan((), (), ident, ident)).valid
    bogus = wk.WalkPlan(
        (), (wk.DegenerationEvent(Fr(1, 2), 0),), ident, ident
    )
    cert = wk.verify_walk(CUBE, bogus)
    assert not cert.valid


def test_verify_detects_dropped_event():
    plan = wk.full_walk(
        CUBE, la.span_of([(1, 2, 3)]), la.span_of([(3, -1, 5)]), seed=1
    )
    assert plan.events
    tampered = wk.WalkPlan(
        plan.segments, plan.events[:-1], plan.isometry, plan.isometry_inv
    )
    cert = wk.verify_walk(CUBE, tampered)
    assert not cert.valid
    assert any("event log" in v for v in cert.violations)


def test_verify_detects_shared_event_time():
    seg = wk.WalkSegment(((1, 2, 3),), ((-2, -4, -1),), (0, 1))
    events = (
        wk.DegenerationEvent(Fr(1, 2), 0),
        wk.DegenerationEvent(Fr(1, 2), 1),
    )
    ident = la.identity(3)
    cert = wk.verify_walk(CUBE, wk.WalkPlan((seg,), events, ident, ident))
    assert not cert.valid
    assert any("share the event time" in v for v in cert.violations)


def test_verify_detects_junction_mismatch():
    a = wk.WalkSegment(((1, 2, 3),), ((0, 0, 0),), (0, Fr(1, 2)))
    b = wk.WalkSegment(((3, -1, 5),), ((0, 0, 0),), (Fr(1, 2), 1))
    ident = la.identity(3)
    cert = wk.verify_walk(CUBE, wk.WalkPlan((a, b), (), ident, ident))
    assert not cert.valid
    assert any("junction spans differ" in v for v in cert.violations)


def test_verify_detects_rank_loss():
    cid = class_id_by_span(TESS, ((0, 0, 1, 0), (0, 0, 0, 1)))
    seg = wk.WalkSegment(
        ((1, 0, 0, 0), (0, 1, 0, 0)),
        ((-2, 0, 0, 0), (0, 0, 0, 0)),
        (0, 1),
    )
    events = (wk.DegenerationEvent(Fr(1, 2), cid),)
    ident = la.identity(4)
    cert = wk.verify_walk(TESS, wk.WalkPlan((seg,), events, ident, ident))
    assert not cert.valid
    assert any("loses rank" in v for v in cert.violations)


def test_verify_detects_endpoint_event():
    seg = wk.WalkSegment(((1, 2, 3),), ((-1, 0, 0),), (0, 1))
    ident = la.identity(3)
    cert = wk.verify_walk(CUBE, wk.WalkPlan((seg,), (), ident, ident))
    assert not cert.valid
    assert any("endpoint" in v for v in cert.violations)


def test_verify_detects_nonaffine_segment():
    seg = wk.WalkSegment(
        ((1, 0, 0, 0), (0, 1, 0, 0)),
        ((0, 0, 1, 0), (0, 0, 0, 1)),
        (0, 1),
    )
    ident = la.identity(4)
    cert = wk.verify_walk(TESS, wk.WalkPlan((seg,), (), ident, ident))
    assert not cert.valid
    assert any("not affine" in v for v in cert.violations)


# ------------------------------------------------------- transformations


def test_prism_triangle_swap():
    tr = wk.elementary_transformation(PRISM, 0, 4, TRI_WIT)
    assert tr.epsilon == 1
    assert tr.u1 == (1, 2, 0)
    before = wk.boundary_chains(PRISM, 0, plane_at(tr.minus, -tr.epsilon / 2))
    after = wk.boundary_chains(PRISM, 0, plane_at(tr.plus, tr.epsilon / 2))
    assert before.visible == frozenset({(0, 1), (0, 2)})
    assert after.visible == frozenset({(1, 2)})
    # exact exchange of the chains, fixed points shared
    assert after.visible == before.invisible
    assert after.invisible == before.visible
    assert before.fixed == after.fixed == (1, 2)
    # the hull oracle sees the same chains
    assert (
        oracle_visible_edges(PRISM, 0, plane_at(tr.minus, -tr.epsilon / 2))
        == before.visible
    )
    assert (
        oracle_visible_edges(PRISM, 0, plane_at(tr.plus, tr.epsilon / 2))
        == after.visible
    )
    # triangles are balanced here: the shadow size stays put
    k_before = sh.shadow(PRISM, plane_at(tr.minus, -tr.epsilon / 2)).k
    k_after = sh.shadow(PRISM, plane_at(tr.plus, tr.epsilon / 2)).k
    assert k_before == k_after == 5


def test_transformation_halves_are_single_crossing():
    tr = wk.elementary_transformation(PRISM, 0, 4, TRI_WIT)
    classes = pt.parallel_classes(PRISM)
    tri = 3
    for t in (-tr.epsilon / 2, tr.epsilon / 2):
        rows = tr.minus.rows_at(t) if t < 0 else tr.plus.rows_at(t)
        for cid, cls in enumerate(classes):
            dv = sh.class_degeneracy_det(PRISM, rows, cls.direction_plane)
            assert dv != 0
    rows0 = tr.minus.rows_at(0)
    for cid, cls in enumerate(classes):
        dv = sh.class_degeneracy_det(PRISM, rows0, cls.direction_plane)
        assert (dv == 0) == (cid == tri)


def test_transformation_sign_data():
    tr = wk.elementary_transformation(PRISM, 0, 4, TRI_WIT)
    assert tr.sign_coefficient != 0
    assert la.dot(tr.v, tr.w1) == 0
    assert la.dot(tr.w1, tr.w2) == 0
    # w1, w2 span the witness plane
    plane = sh.ProjectionPlane.from_orthogonal(tr.minus.rows_at(0))
    assert la.span_of((tr.w1, tr.w2)) == la.span_of(plane.basis.basis)


def test_transformation_reverse_mirrors_halves():
    tr = wk.elementary_transformation(PRISM, 0, 4, TRI_WIT)
    rev = wk.elementary_transformation(PRISM, 0, 4, TRI_WIT, reverse=True)
    assert rev.v == la.neg(tr.v)
    fwd = wk.boundary_chains(PRISM, 0, plane_at(tr.minus, -tr.epsilon / 2))
    bwd = wk.boundary_chains(PRISM, 0, plane_at(rev.plus, rev.epsilon / 2))
    assert fwd.visible == bwd.visible


def test_hypercube_tilt_transformation():
    a = face_id(TESS, (0, 4, 8, 12))
    b = face_id(TESS, (3, 7, 11, 15))
    tr = wk.elementary_transformation(TESS, a, b, TILT4_WIT)
    assert tr.epsilon == Fr(1, 4)
    before_a = wk.boundary_chains(TESS, a, plane_at(tr.minus, -tr.epsilon / 2))
    after_a = wk.boundary_chains(TESS, a, plane_at(tr.plus, tr.epsilon / 2))
    before_b = wk.boundary_chains(TESS, b, plane_at(tr.minus, -tr.epsilon / 2))
    after_b = wk.boundary_chains(TESS, b, plane_at(tr.plus, tr.epsilon / 2))
    assert before_a.visible == frozenset({(0, 4), (4, 12)})
    assert after_a.visible == frozenset({(0, 8), (8, 12)})
    assert before_b.visible == frozenset({(3, 11), (11, 15)})
    assert after_b.visible == frozenset({(3, 7), (7, 15)})
    assert after_a.visible == before_a.invisible
    assert after_b.visible == before_b.invisible
    # balanced pair of squares: the shadow size is conserved
    assert sh.shadow(TESS, plane_at(tr.minus, -tr.epsilon / 2)).k == 8
    assert sh.shadow(TESS, plane_at(tr.plus, tr.epsilon / 2)).k == 8


def test_transformation_rejects_bad_witnesses():
    # axis direction degenerates a second class as well
    with pytest.raises(ParameterError):
        wk.elementary_transformation(PRISM, 0, 4, la.span_of([(1, 0, 0)]))
    # admissible span degenerates nothing
    with pytest.raises(ParameterError):
        wk.elementary_transformation(PRISM, 0, 4, la.span_of([(1, 2, 3)]))


def test_transformation_rejects_bad_pairs():
    with pytest.raises(ParameterError):
        wk.elementary_transformation(PRISM, 0, 1, TRI_WIT)
    with pytest.raises(ParameterError):
        wk.elementary_transformation(PRISM, 0, 0, TRI_WIT)
    with pytest.raises(ParameterError):
        wk.elementary_transformation(PRISM, 0, 99, TRI_WIT)


def test_transformation_rejects_hidden_faces():
    pa = face_id(PERT, (1, 5, 9, 13))
    pb = face_id(PERT, (2, 6, 10, 14))
    with pytest.raises(GeometryError):
        wk.elementary_transformation(PERT, pa, pb, TILT4_WIT)


# ------------------------------------------------------------ chain splits


@pytest.mark.parametrize("edge", [(0, 1), (0, 2), (1, 2)])
def test_prism_chain_split(edge):
    tr1, tr2 = wk.chain_split_transformations(PRISM, 0, 4, edge, TRI_WIT)
    c1 = oracle_visible_edges(PRISM, 0, plane_at(tr1.minus, sum(tr1.minus.t_range) / 2))
    c2 = oracle_visible_edges(PRISM, 0, plane_at(tr2.minus, sum(tr2.minus.t_range) / 2))
    assert c1 ^ c2 == {edge}
    assert (edge in c1) != (edge in c2)
    # distinct witnesses on either side of the edge event
    assert la.span_of(tr1.minus.rows_at(0)) != la.span_of(tr2.minus.rows_at(0))


def test_chain_split_rejects_parallel_edges():
    z0 = face_id(CUBE, (0, 2, 4, 6))
    z1 = face_id(CUBE, (1, 3, 5, 7))
    wit = la.span_of([(1, 2, 0)])
    with pytest.raises(ParameterError):
        wk.chain_split_transformations(CUBE, z0, z1, (0, 2), wit)


def test_chain_split_rejects_foreign_edge():
    with pytest.raises(ParameterError):
        wk.chain_split_transformations(PRISM, 0, 4, (0, 3), TRI_WIT)
    with pytest.raises(ParameterError):
        wk.chain_split_transformations(PRISM, 0, 4, (0, 5), TRI_WIT)


# ------------------------------------------------------------------- json


def test_plan_json_shape():
    plan = wk.full_walk(
        CUBE, la.span_of([(1, 2, 3)]), la.span_of([(3, -1, 5)]), seed=1
    )
    data = wk.to_json_dict(plan)
    assert set(data) == {"segments", "events"}
    assert len(data["segments"]) == len(plan.segments)
    assert len(data["events"]) == len(plan.events)
    for entry, ev in zip(data["events"], plan.events):
        assert la.parse_rat(entry["t"]) == ev.time
        assert entry["class"] == ev.class_id
    first = data["segments"][0]
    assert la.parse_rat(first["t0"]) == 0
    rows = [tuple(la.parse_rat(x) for x in r) for r in first["base"]]
    assert tuple(rows) == plan.segments[0].base
