"""Certified walks in the space of projection planes.

A projection plane is tracked through its (d-2)-dimensional orthogonal
span. A walk is a chain of segments, each an affine family of d-2 basis
rows, chosen so that every class degeneration determinant is an affine
polynomial of the segment parameter. Degeneration times are then exact
rational roots, and the construction arranges for each time to belong
to exactly one parallel class.

Everything here is exact. Randomness only picks candidate directions;
every candidate is accepted or rejected by rational determinant tests,
and all searches are capped and seeded.
"""

import random
from collections import namedtuple
from fractions import Fraction

from . import linalg as la
from . import polytope as pt
from . import shadow as sh
from .errors import (
    DimensionError,
    GeometryError,
    InadmissiblePlaneError,
    ParameterError,
    WalkError,
)

_SEARCH_CAP = 64


def _zero_vec(d):
    return (la.ZERO,) * d


class WalkSegment:
    """One affine piece of a walk.

    Holds d-2 base rows and d-2 slope rows; the orthogonal family at
    time t is base + t * slope, row by row. Row independence over the
    closed range is a promise of the constructors, checked again by
    verify_walk.
    """

    __slots__ = ("base", "slope", "t_range")

    def __init__(self, base, slope, t_range):
        base = tuple(la.as_vec(v) for v in base)
        slope = tuple(la.as_vec(v) for v in slope)
        if len(base) != len(slope) or not base:
            raise DimensionError("base and slope must pair up row by row")
        width = len(base[0])
        if any(len(v) != width for v in base + slope):
            raise DimensionError("segment rows of mixed lengths")
        lo, hi = la.as_rat(t_range[0]), la.as_rat(t_range[1])
        if not lo < hi:
            raise ParameterError("segment range is empty")
        self.base = base
        self.slope = slope
        self.t_range = (lo, hi)

    def rows_at(self, t):
        t = la.as_rat(t)
        return tuple(
            la.add(b, la.scale(s, t)) for b, s in zip(self.base, self.slope)
        )

    def span_at(self, t):
        return la.Subspace(self.rows_at(t))

    def rescaled(self, lo, hi):
        """The same family reparametrised affinely onto [lo, hi]."""
        lo, hi = la.as_rat(lo), la.as_rat(hi)
        a, b = self.t_range
        f = (b - a) / (hi - lo)
        shift = a - lo * f
        base = tuple(
            la.add(v, la.scale(s, shift)) for v, s in zip(self.base, self.slope)
        )
        slope = tuple(la.scale(s, f) for s in self.slope)
        return WalkSegment(base, slope, (lo, hi))

    def reversed(self):
        """The same range traversed the other way."""
        a, b = self.t_range
        base = tuple(
            la.add(v, la.scale(s, a + b)) for v, s in zip(self.base, self.slope)
        )
        slope = tuple(la.neg(s) for s in self.slope)
        return WalkSegment(base, slope, (a, b))

    def __repr__(self):
        lo, hi = self.t_range
        return f"WalkSegment(rows={len(self.base)}, range=[{lo}, {hi}])"


class AffinePoly(namedtuple("AffinePoly", ["c0", "c1"])):
    """c0 + c1*t with rational coefficients."""

    __slots__ = ()

    def at(self, t):
        return self.c0 + self.c1 * la.as_rat(t)

    def root(self):
        if self.c1 == 0:
            return None
        return -self.c0 / self.c1


DegenerationEvent = namedtuple("DegenerationEvent", ["time", "class_id"])

EtaVector = namedtuple("EtaVector", ["class_id", "eta"])

WalkPlan = namedtuple(
    "WalkPlan", ["segments", "events", "isometry", "isometry_inv"]
)

WalkCertificate = namedtuple(
    "WalkCertificate", ["valid", "events", "violations"]
)

ElementaryTransformation = namedtuple(
    "ElementaryTransformation",
    [
        "face_id",
        "other_id",
        "minus",
        "plus",
        "u1",
        "v",
        "w1",
        "w2",
        "sign_coefficient",
        "epsilon",
    ],
)

ChainState = namedtuple("ChainState", ["visible", "invisible", "fixed"])


def degeneration_polynomial(segment, cls):
    """Exact affine degeneration determinant of one class on a segment.

    Interpolated from the two endpoint values and confirmed against a
    midpoint evaluation; a determinant that is not affine in t raises
    WalkError.
    """
    lo, hi = segment.t_range
    extra = tuple(cls.direction_plane.basis)

    def dv(t):
        rows = segment.rows_at(t) + extra
        if len(rows) != len(rows[0]):
            raise DimensionError("stacked family is not square")
        return la.det(rows)

    a = dv(lo)
    b = dv(hi)
    c1 = (b - a) / (hi - lo)
    c0 = a - c1 * lo
    mid = (lo + hi) / 2
    if dv(mid) != c0 + c1 * mid:
        raise WalkError("degeneration determinant is not affine on the segment")
    return AffinePoly(c0, c1)


def _hyperplane_span(d):
    # the reference hyperplane: first coordinate zero
    return la.Subspace(tuple(la.unit(d, i) for i in range(1, d)))


def _etas(p):
    """One normalised eta direction per parallel class.

    eta spans the meet of the class direction plane with the reference
    hyperplane and is scaled to last coordinate 1. Requires the
    reference arrangement: every such meet is a line off the last
    coordinate hyperplane; otherwise WalkError names the class.
    """
    d = p.dim
    hp = _hyperplane_span(d)
    out = []
    for cid, cls in enumerate(pt.parallel_classes(p)):
        inter = la.intersect(cls.direction_plane, hp)
        if inter.dim != 1:
            raise WalkError(
                f"class {cid} meets the reference hyperplane in dimension "
                f"{inter.dim}, expected a line; rotate the polytope first"
            )
        eta = inter.basis[0]
        if eta[d - 1] == 0:
            raise WalkError(
                f"class {cid} eta direction has zero last coordinate; "
                "rotate the polytope first"
            )
        out.append(EtaVector(cid, la.scale(eta, 1 / eta[d - 1])))
    return out


def reference_isometry(p):
    """Exact rotation moving p into the reference arrangement.

    After the move no proscribed direction lies in the reference
    hyperplane and every class eta has a nonzero last coordinate, which
    makes span(e2, ..., e_{d-1}) an admissible orthogonal span. Built
    from Cayley plane rotations, each accepted only when it strictly
    shrinks the defect count. Returns (matrix, etas of the moved copy).
    """
    d = p.dim
    if d < 3:
        raise ParameterError("walks need ambient dimension at least 3")
    q = la.identity(d)
    moved = p

    def bad_dirs(poly):
        return [
            pd.line for pd in pt.proscribed_directions(poly) if pd.line[0] == 0
        ]

    for _ in range(_SEARCH_CAP):
        bad = bad_dirs(moved)
        if not bad:
            break
        line = bad[0]
        j = max(range(d), key=lambda i: abs(line[i]))
        accepted = False
        for k in range(2, _SEARCH_CAP + 2):
            r = la.matmul(la.plane_rotation(d, 0, j, Fraction(1, k)), q)
            cand = pt.apply_isometry(p, r)
            if len(bad_dirs(cand)) < len(bad):
                q, moved, accepted = r, cand, True
                break
        if not accepted:
            raise WalkError(
                "no plane rotation clears the proscribed directions"
            )
    else:
        raise WalkError("proscribed-direction stage did not converge")

    hp = _hyperplane_span(d)

    def bad_etas(poly):
        out = []
        for cls in pt.parallel_classes(poly):
            inter = la.intersect(cls.direction_plane, hp)
            if inter.dim != 1:
                raise WalkError("eta stage lost the direction arrangement")
            if inter.basis[0][d - 1] == 0:
                out.append(inter.basis[0])
        return out

    for _ in range(_SEARCH_CAP):
        bad = bad_etas(moved)
        if not bad:
            break
        eta = bad[0]
        # eta sits inside the reference hyperplane with zero last
        # coordinate, so some middle coordinate is nonzero
        j = max(range(1, d - 1), key=lambda i: abs(eta[i]))
        accepted = False
        for k in range(2, _SEARCH_CAP + 2):
            # rotating in the (j, d-1) plane keeps first coordinates,
            # so the first stage survives exactly
            r = la.matmul(la.plane_rotation(d, j, d - 1, Fraction(1, k)), q)
            cand = pt.apply_isometry(p, r)
            if len(bad_etas(cand)) < len(bad):
                q, moved, accepted = r, cand, True
                break
        if not accepted:
            raise WalkError("no plane rotation clears the eta directions")
    else:
        raise WalkError("eta stage did not converge")

    etas = _etas(moved)
    rows = tuple(la.unit(d, i) for i in range(1, d - 1))
    for cid, cls in enumerate(pt.parallel_classes(moved)):
        if sh.class_degeneracy_det(moved, rows, cls.direction_plane) == 0:
            raise WalkError(
                f"reference orthogonal span degenerates class {cid}"
            )
    return q, etas


def _ortho_rows(p, span):
    s = span if isinstance(span, la.Subspace) else la.Subspace(span)
    if s.ambient != p.dim:
        raise DimensionError("span lives in the wrong ambient dimension")
    if s.dim != p.dim - 2:
        raise DimensionError(
            f"orthogonal span must have dimension {p.dim - 2}, got {s.dim}"
        )
    return s.basis


def _require_admissible(p, rows, what):
    for cid, cls in enumerate(pt.parallel_classes(p)):
        if sh.class_degeneracy_det(p, rows, cls.direction_plane) == 0:
            raise InadmissiblePlaneError(
                f"{what} span degenerates class {cid}"
            )


def _segment_roots(seg, classes, skip=None):
    """Map root -> class ids for roots strictly inside the range.

    A class degenerate along the whole segment, or exactly at an
    endpoint, raises WalkError; walk constructions must never produce
    either.
    """
    lo, hi = seg.t_range
    found = {}
    for cid, cls in enumerate(classes):
        if cid == skip:
            continue
        poly = degeneration_polynomial(seg, cls)
        if poly.c0 == 0 and poly.c1 == 0:
            raise WalkError(
                f"class {cid} is degenerate along the whole segment"
            )
        r = poly.root()
        if r is None:
            continue
        if r == lo or r == hi:
            raise WalkError(
                f"class {cid} degenerates at a segment endpoint (t={r})"
            )
        if lo < r < hi:
            found.setdefault(r, []).append(cid)
    return found


def _separate_junction_spans(p, classes, u1, others, ca, cb, rng):
    """Nudge the second basis row until the two classes stop sharing a
    junction span.

    Builds the nudge inside the reference hyperplane by sliding a fresh
    direction along a proscribed direction of the first class. Returns
    the nudge segment and mutates others[0], or returns None when no
    candidate works.
    """
    d = p.dim
    fa = tuple(classes[ca].direction_plane.basis)
    fb = tuple(classes[cb].direction_plane.basis)
    fixed = tuple(others[1:]) + fa + (fb[0],)
    base_rank = la.rank(fixed)
    w = None
    for _ in range(_SEARCH_CAP // 2):
        cand = tuple(Fraction(rng.randint(-9, 9)) for _ in range(d))
        if la.rank(fixed + (cand,)) > base_rank:
            w = cand
            break
    if w is None:
        return None
    if w[0] != 0:
        span_a = classes[ca].direction_plane
        pf = None
        for pd in pt.proscribed_directions(p):
            if span_a.contains(pd.line):
                pf = pd.line
                break
        if pf is None or pf[0] == 0:
            return None
        # pf spans a line of the class plane, already inside fixed, so
        # the translated w keeps its rank contribution
        w = la.sub(w, la.scale(pf, w[0] / pf[0]))
    if la.det((w,) + fixed) == 0:
        # the fixed family is itself dependent; the nudged junction
        # determinant would stay zero for every step size
        return None
    base = (u1,) + tuple(others)
    slope = [_zero_vec(d) for _ in range(d - 2)]
    slope[1] = w
    probe = WalkSegment(base, tuple(slope), (0, 1))
    eps = Fraction(1)
    for cls in classes:
        poly = degeneration_polynomial(probe, cls)
        if poly.c0 == 0 and poly.c1 == 0:
            return None
        r = poly.root()
        if r is not None and r > 0:
            eps = min(eps, r / 2)
    seg = WalkSegment(base, tuple(slope), (0, eps))
    others[0] = la.add(others[0], la.scale(w, eps))
    return seg


def _fragment_to_hyperplane(p, start, seed):
    """Raw segments from an admissible span to one inside the reference
    hyperplane. Returns (segments, end span)."""
    d = p.dim
    rows0 = _ortho_rows(p, start)
    _require_admissible(p, rows0, "start")
    if all(r[0] == 0 for r in rows0):
        return [], la.Subspace(rows0)
    classes = pt.parallel_classes(p)
    etas = [e.eta for e in _etas(p)]
    arr, pivots = la.rref(rows0)
    if pivots[0] != 0:
        raise WalkError("echelon form lost the first coordinate")
    u1 = arr[0]
    others = list(arr[1:])
    segs = []
    rng = random.Random(f"walk-to:{seed}")
    last_error = "no candidate crossing direction was admissible"
    for _ in range(_SEARCH_CAP):
        v = (Fraction(1),) + tuple(
            Fraction(rng.randint(-9, 9)) for _ in range(d - 1)
        )
        # outside every span(basis, eta): guarantees finitely many
        # events and an admissible endpoint inside the hyperplane
        if any(la.det((u1, *others, eta, v)) == 0 for eta in etas):
            continue
        base = (u1,) + tuple(others)
        slope = (la.neg(v),) + tuple(_zero_vec(d) for _ in range(d - 3))
        seg = WalkSegment(base, slope, (Fraction(0), Fraction(1)))
        try:
            found = _segment_roots(seg, classes)
        except WalkError as exc:
            last_error = str(exc)
            continue
        shared = next((ids for ids in found.values() if len(ids) > 1), None)
        if shared is None:
            segs.append(seg)
            end_rows = seg.rows_at(1)
            _require_admissible(p, end_rows, "hyperplane entry")
            return segs, la.Subspace(end_rows)
        ca, cb = shared[0], shared[1]
        sa = la.span_of(tuple(others) + tuple(classes[ca].direction_plane.basis))
        sb = la.span_of(tuple(others) + tuple(classes[cb].direction_plane.basis))
        if sa != sb or not others:
            last_error = (
                f"classes {ca} and {cb} shared a degeneration time"
            )
            continue
        pre = _separate_junction_spans(p, classes, u1, others, ca, cb, rng)
        if pre is None:
            last_error = (
                f"could not split the junction span of classes {ca} and {cb}"
            )
            continue
        segs.append(pre)
    raise WalkError(f"crossing search exhausted its budget: {last_error}")


def _fragment_within(p, start, seed):
    """Raw segments from an admissible span inside the reference
    hyperplane down to span(e2, ..., e_{d-1}). Returns (segments, end
    span)."""
    d = p.dim
    rows0 = _ortho_rows(p, start)
    _require_admissible(p, rows0, "start")
    if any(r[0] != 0 for r in rows0):
        raise ParameterError("start must lie inside the reference hyperplane")
    classes = pt.parallel_classes(p)
    etas = [e.eta for e in _etas(p)]
    cols = d - 1
    target = cols - 1

    def embed(vec):
        return (Fraction(0),) + tuple(vec)

    red = tuple(r[1:] for r in rows0)
    arr, pivots = la.rref(red)
    segs = []

    # staircase: advance the single non-pivot column one slot at a time
    for _ in range(cols):
        missing = next(c for c in range(cols) if c not in pivots)
        if missing == target:
            break
        idx = pivots.index(missing + 1)
        base = tuple(embed(r) for r in arr)
        slope = [_zero_vec(d) for _ in range(d - 2)]
        slope[idx] = embed(la.unit(cols, missing))
        probe = WalkSegment(base, tuple(slope), (0, 1))
        step = Fraction(1)
        for cls in classes:
            poly = degeneration_polynomial(probe, cls)
            if poly.c0 == 0 and poly.c1 == 0:
                raise WalkError("a class is degenerate across a staircase step")
            r = poly.root()
            if r is not None and r > 0:
                step = min(step, r / 2)
        segs.append(WalkSegment(base, tuple(slope), (0, step)))
        red = tuple(
            la.add(r, la.scale(la.unit(cols, missing), step)) if i == idx else r
            for i, r in enumerate(arr)
        )
        arr, pivots = la.rref(red)
    else:
        raise WalkError("staircase did not reach the last column")

    # now every row reads unit(p) + x_p * e_last in reduced coordinates
    xs = [row[target] for row in arr]
    end_rows = tuple(embed(la.unit(cols, i)) for i in range(target))

    def gamma_rows():
        base = tuple(
            embed(la.add(la.unit(cols, i), la.scale(la.unit(cols, target), xs[i])))
            for i in range(target)
        )
        return base

    for _ in range(_SEARCH_CAP):
        if all(x == 0 for x in xs):
            return segs, la.Subspace(end_rows)
        base = gamma_rows()
        slope = tuple(
            embed(la.scale(la.unit(cols, target), -xs[i])) for i in range(target)
        )
        seg = WalkSegment(base, slope, (Fraction(0), Fraction(1)))
        found = _segment_roots(seg, classes)
        shared = next((ids for ids in found.values() if len(ids) > 1), None)
        if shared is None:
            segs.append(seg)
            return segs, la.Subspace(end_rows)
        ca, cb = shared[0], shared[1]
        diff = la.sub(etas[ca], etas[cb])
        j = next((i for i in range(1, d - 1) if diff[i] != 0), None)
        if j is None:
            raise WalkError(f"classes {ca} and {cb} share an eta direction")
        # one unit of x along coordinate j separates the two roots
        xt = [Fraction(0)] * target
        xt[j - 1] = Fraction(1)
        pre_slope = tuple(
            embed(la.scale(la.unit(cols, target), xt[i])) for i in range(target)
        )
        probe = WalkSegment(base, pre_slope, (0, 1))
        eps = Fraction(1)
        for cls in classes:
            poly = degeneration_polynomial(probe, cls)
            r = poly.root()
            if r is not None and r > 0:
                eps = min(eps, r / 2)
        segs.append(WalkSegment(base, pre_slope, (0, eps)))
        xs = [x + eps * t for x, t in zip(xs, xt)]
    raise WalkError("contraction produced inseparable degenerations")


def _assemble(p, raw_segments, isometry, isometry_inv):
    """Chain raw segments onto [0, 1] and recompute the event log."""
    if not raw_segments:
        return WalkPlan((), (), isometry, isometry_inv)
    classes = pt.parallel_classes(p)
    n = len(raw_segments)
    segments = []
    events = []
    for k, seg in enumerate(raw_segments):
        piece = seg.rescaled(Fraction(k, n), Fraction(k + 1, n))
        found = _segment_roots(piece, classes)
        for t, ids in sorted(found.items()):
            if len(ids) > 1:
                raise WalkError(
                    f"classes {ids[0]} and {ids[1]} degenerate together "
                    f"at t={t}"
                )
            events.append(DegenerationEvent(t, ids[0]))
        segments.append(piece)
    events.sort(key=lambda e: e.time)
    return WalkPlan(tuple(segments), tuple(events), isometry, isometry_inv)


def walk_to_hyperplane(p, start, seed=0):
    """Walk from an admissible orthogonal span to one inside the
    reference hyperplane.

    Requires the reference arrangement (reference_isometry provides
    it). A start already inside the hyperplane yields an empty plan.
    Every event time is an exact rational shared by no two classes.
    """
    segs, _ = _fragment_to_hyperplane(p, start, seed)
    ident = la.identity(p.dim)
    return _assemble(p, segs, ident, ident)


def walk_within_hyperplane(p, start, seed=0):
    """Walk inside the reference hyperplane down to the reference
    orthogonal span(e2, ..., e_{d-1}).

    The start span must be admissible and contained in the hyperplane.
    A start equal to the reference span yields an empty plan.
    """
    segs, _ = _fragment_within(p, start, seed)
    ident = la.identity(p.dim)
    return _assemble(p, segs, ident, ident)


def full_walk(p, frm, to, seed=0):
    """Certified walk between two admissible orthogonal spans.

    Conjugates by the reference isometry, walks both endpoints to the
    reference span, and glues the second half reversed. The returned
    plan is expressed in the original coordinates; the rotation used
    internally is recorded in the isometry fields.
    """
    d = p.dim
    rows_a = _ortho_rows(p, frm)
    rows_b = _ortho_rows(p, to)
    _require_admissible(p, rows_a, "start")
    _require_admissible(p, rows_b, "end")
    ident = la.identity(d)
    if la.span_of(rows_a) == la.span_of(rows_b):
        return WalkPlan((), (), ident, ident)
    rot, _ = reference_isometry(p)
    inv = la.transpose(rot)
    q = pt.apply_isometry(p, rot)

    def push(rows):
        return la.Subspace(tuple(la.matvec(rot, r) for r in rows))

    a_to, a_end = _fragment_to_hyperplane(q, push(rows_a), f"{seed}:a")
    a_in, _ = _fragment_within(q, a_end, f"{seed}:aw")
    b_to, b_end = _fragment_to_hyperplane(q, push(rows_b), f"{seed}:b")
    b_in, _ = _fragment_within(q, b_end, f"{seed}:bw")
    chain = (
        a_to
        + a_in
        + [s.reversed() for s in reversed(b_in)]
        + [s.reversed() for s in reversed(b_to)]
    )
    pulled = [
        WalkSegment(
            tuple(la.matvec(inv, r) for r in seg.base),
            tuple(la.matvec(inv, r) for r in seg.slope),
            seg.t_range,
        )
        for seg in chain
    ]
    return _assemble(p, pulled, rot, inv)


def verify_walk(p, plan):
    """Independent certificate for a walk plan.

    Recomputes every degeneration polynomial, isolates the roots, and
    checks: affine determinants, free families at endpoints, events and
    midpoints, no event at a junction, no two classes sharing a time,
    junction spans equal, and the plan event log matching the
    recomputation. Returns a certificate, never raises.
    """
    violations = []
    events = []
    segs = plan.segments
    if not segs:
        if plan.events:
            violations.append("plan lists events but has no segments")
        return WalkCertificate(not violations, (), tuple(violations))
    d = p.dim
    classes = pt.parallel_classes(p)
    lo0 = segs[0].t_range[0]
    hi_last = segs[-1].t_range[1]

    def free_at(seg, t, label):
        rows = seg.rows_at(t)
        if la.rank(rows) != d - 2:
            violations.append(f"family loses rank at t={t} ({label})")

    for i, seg in enumerate(segs):
        lo, hi = seg.t_range
        if len(seg.base) != d - 2:
            violations.append(f"segment {i} has {len(seg.base)} rows")
            continue
        if i and segs[i - 1].t_range[1] != lo:
            violations.append(f"segments {i - 1} and {i} ranges do not meet")
        times = {}
        for cid, cls in enumerate(classes):
            try:
                poly = degeneration_polynomial(seg, cls)
            except WalkError as exc:
                violations.append(f"segment {i}, class {cid}: {exc}")
                continue
            if poly.c0 == 0 and poly.c1 == 0:
                violations.append(
                    f"class {cid} is degenerate along segment {i}"
                )
                continue
            r = poly.root()
            if r is None:
                continue
            if r == lo or r == hi:
                edge = "endpoint" if r in (lo0, hi_last) else "junction"
                violations.append(
                    f"class {cid} degenerates at a segment {edge} (t={r})"
                )
            elif lo < r < hi:
                times.setdefault(r, []).append(cid)
        ordered = sorted(times)
        for t in ordered:
            ids = times[t]
            if len(ids) > 1:
                violations.append(
                    f"classes {ids[0]} and {ids[1]} share the event time {t}"
                )
            for cid in ids:
                events.append(DegenerationEvent(t, cid))
            free_at(seg, t, f"event in segment {i}")
        samples = [lo] + ordered + [hi]
        free_at(seg, lo, f"start of segment {i}")
        free_at(seg, hi, f"end of segment {i}")
        for a, b in zip(samples, samples[1:]):
            free_at(seg, (a + b) / 2, f"between events in segment {i}")
    for i in range(1, len(segs)):
        t = segs[i].t_range[0]
        if segs[i - 1].t_range[1] != t:
            continue
        try:
            before = segs[i - 1].span_at(t)
            after = segs[i].span_at(t)
        except Exception:
            continue
        if before != after:
            violations.append(f"junction spans differ between {i - 1} and {i}")
    events.sort(key=lambda e: (e.time, e.class_id))
    listed = sorted(plan.events, key=lambda e: (e.time, e.class_id))
    if [tuple(e) for e in listed] != [tuple(e) for e in events]:
        violations.append("plan event log disagrees with the recomputation")
    return WalkCertificate(not violations, tuple(events), tuple(violations))


def _face_image_on_boundary(p, face, w, poly):
    pts = [w.coords(p.vertices[i]) for i in face.vertex_ids]
    if not all(sh.on_hull_boundary(q, poly) for q in pts):
        return False
    lo = min(pts)
    hi = max(pts)
    mid = ((lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2)
    return sh.on_hull_boundary(mid, poly)


def _class_of_face(p, face_id):
    for cid, cls in enumerate(pt.parallel_classes(p)):
        if face_id in cls.member_ids:
            return cid
    raise ParameterError(f"no 2-face with id {face_id}")


def _validate_visibility_witness(p, face_id, other_id, rows):
    """Shared witness checks for the transformation builders.

    The witness must degenerate exactly the class of face_id, send the
    face (and the optional partner) onto the shadow boundary, and meet
    the face plane in a line. Returns (class id, that line's
    generator).
    """
    faces = pt.k_faces(p, 2)
    if not 0 <= face_id < len(faces):
        raise ParameterError(f"no 2-face with id {face_id}")
    cid = _class_of_face(p, face_id)
    if other_id is not None:
        if not 0 <= other_id < len(faces):
            raise ParameterError(f"no 2-face with id {other_id}")
        if other_id == face_id:
            raise ParameterError("paired faces must be distinct")
        if _class_of_face(p, other_id) != cid:
            raise ParameterError("paired faces must share a parallel class")
    for k, cls in enumerate(pt.parallel_classes(p)):
        dv = sh.class_degeneracy_det(p, rows, cls.direction_plane)
        if k == cid and dv != 0:
            raise ParameterError(
                f"witness does not degenerate the class of face {face_id}"
            )
        if k != cid and dv == 0:
            raise ParameterError(
                f"witness degenerates foreign class {k} as well"
            )
    inter = la.intersect(la.Subspace(rows), faces[face_id].span)
    if inter.dim != 1:
        raise GeometryError("face projects to a point at the witness")
    u1 = la.primitive(inter.basis[0])
    w = sh.ProjectionPlane.from_orthogonal(rows)
    poly = sh.shadow(p, w)
    pair = (face_id,) if other_id is None else (face_id, other_id)
    for fid in pair:
        if not _face_image_on_boundary(p, faces[fid], w, poly):
            raise GeometryError(f"face {fid} is not visible at the witness")
    return cid, u1


def _tilde(v, u):
    """Component of v orthogonal to a nonzero u."""
    return la.sub(v, la.scale(u, la.dot(v, u) / la.dot(u, u)))


def elementary_transformation(p, face_id, other_id, witness, reverse=False):
    """Certified crossing of a single-class visibility witness.

    witness is the orthogonal span of a plane where only the class of
    face_id degenerates and face_id (with the optional parallel partner
    other_id) lies on the shadow boundary. The crossing direction v
    generates the orthogonal complement of witness + face plane, which
    has rank d-1, so v is unique up to sign; reverse flips it. minus
    and plus are the certified half-segments on either side.

    The w1/w2 rows frame the moving image plane: w1 spans the kernel of
    (witness rows, v), w2 completes it inside the witness plane, and
    the projected coordinate of u1 along the moving frame changes sign
    with t * sign_coefficient, which is the exchange of the two chains.
    """
    d = p.dim
    rows = _ortho_rows(p, witness)
    cid, u1 = _validate_visibility_witness(p, face_id, other_id, rows)
    faces = pt.k_faces(p, 2)
    span_f = faces[face_id].span
    kern = la.kernel_basis(rows + tuple(span_f.basis))
    if len(kern) != 1:
        raise GeometryError("witness plus face plane does not have rank d-1")
    v = la.primitive(kern[0])
    if reverse:
        v = la.neg(v)
    comp = [u1]
    for r in rows:
        if la.rank(tuple(comp) + (r,)) > len(comp):
            comp.append(r)
    if len(comp) != d - 2:
        raise GeometryError("degenerating direction escapes the witness")
    base = tuple(comp)
    slope = (v,) + tuple(_zero_vec(d) for _ in range(d - 3))
    probe = WalkSegment(base, slope, (-1, 1))
    classes = pt.parallel_classes(p)
    eps = None
    for k, cls in enumerate(classes):
        if k == cid:
            continue
        r = degeneration_polynomial(probe, cls).root()
        if r is not None:
            gap = abs(r)
            eps = gap if eps is None else min(eps, gap)
    eps = Fraction(1) if eps is None else eps / 2
    minus = WalkSegment(base, slope, (-eps, 0))
    plus = WalkSegment(base, slope, (0, eps))
    kern2 = la.kernel_basis(base + (v,))
    if len(kern2) != 1:
        raise GeometryError("crossing family is not free")
    w1 = la.primitive(kern2[0])
    plane = la.kernel_basis(rows)
    pick = next(b for b in plane if la.rank((w1, b)) == 2)
    w2 = la.primitive(_tilde(pick, w1))
    coeff = la.dot(v, w2)
    if coeff == 0:
        raise GeometryError("crossing direction lies inside the witness")
    return ElementaryTransformation(
        face_id, other_id, minus, plus, u1, v, w1, w2, coeff, eps
    )


def boundary_chains(p, face_id, w):
    """Visible and invisible edge chains of a 2-face for one plane.

    An edge is visible when both endpoint images and the midpoint image
    lie on the shadow boundary. Fixed points are the face vertices
    meeting exactly one visible edge.
    """
    faces = pt.k_faces(p, 2)
    if not 0 <= face_id < len(faces):
        raise ParameterError(f"no 2-face with id {face_id}")
    face = faces[face_id]
    poly = sh.shadow(p, w)
    visible = []
    invisible = []
    for e in pt.face_edges(p, face):
        a, b = e.vertex_ids
        pa = w.coords(p.vertices[a])
        pb = w.coords(p.vertices[b])
        mid = ((pa[0] + pb[0]) / 2, (pa[1] + pb[1]) / 2)
        if all(sh.on_hull_boundary(q, poly) for q in (pa, pb, mid)):
            visible.append((a, b))
        else:
            invisible.append((a, b))
    degree = {}
    for a, b in visible:
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1
    fixed = tuple(
        sorted(x for x in face.vertex_ids if degree.get(x, 0) == 1)
    )
    return ChainState(frozenset(visible), frozenset(invisible), fixed)


def _before_chain(p, face_id, tr):
    lo, hi = tr.minus.t_range
    w = sh.ProjectionPlane.from_orthogonal(tr.minus.rows_at((lo + hi) / 2))
    return set(boundary_chains(p, face_id, w).visible)


def chain_split_transformations(p, face_id, other_id, edge, witness):
    """Two transformations around one edge event of a visible face.

    Slides the witness inside the face plane toward the chosen edge
    direction and returns elementary transformations just before and
    just after the edge event; their visible chains differ exactly by
    that edge. The face must carry no second edge parallel to the
    chosen one, and the witness direction must not be orthogonal to it.
    """
    d = p.dim
    faces = pt.k_faces(p, 2)
    rows = _ortho_rows(p, witness)
    cid, u1 = _validate_visibility_witness(p, face_id, other_id, rows)
    face = faces[face_id]
    edge = tuple(sorted(edge))
    edge_ids = [tuple(e.vertex_ids) for e in pt.face_edges(p, face)]
    if edge not in edge_ids:
        raise ParameterError(f"{edge} is not an edge of face {face_id}")
    ebar = la.primitive(la.sub(p.vertices[edge[1]], p.vertices[edge[0]]))
    directions = {}
    for other_edge in edge_ids:
        if other_edge == edge:
            continue
        dirn = la.sub(
            p.vertices[other_edge[1]], p.vertices[other_edge[0]]
        )
        if la.rank((ebar, dirn)) < 2:
            raise ParameterError(
                f"edge {other_edge} of face {face_id} is parallel to {edge}"
            )
        directions[other_edge] = dirn
    f1, f2 = face.span.basis
    g = f1 if la.rank((ebar, f1)) == 2 else f2
    v = la.primitive(_tilde(g, ebar))
    alpha, beta = la.gram_coords(u1, (ebar, v))
    if alpha == 0:
        raise GeometryError("witness direction is orthogonal to the edge")
    lam = beta / alpha
    if lam < 0:
        v = la.neg(v)
        lam = -lam
    if lam == 0:
        raise GeometryError("witness already degenerates along the edge")
    u1n = la.scale(u1, 1 / alpha)
    comp = [u1n]
    for r in rows:
        if la.rank(tuple(comp) + (r,)) > len(comp):
            comp.append(r)
    tail = tuple(comp[1:])
    base = (u1n,) + tail
    slope = (la.neg(v),) + tuple(_zero_vec(d) for _ in range(d - 3))
    probe = WalkSegment(base, slope, (0, 2 * lam + 1))
    classes = pt.parallel_classes(p)
    gaps = [lam]
    for k, cls in enumerate(classes):
        if k == cid:
            continue
        r = degeneration_polynomial(probe, cls).root()
        if r is not None and r != lam:
            gaps.append(abs(r - lam))
    eps = min(gaps) / 2
    w_minus = la.span_of((la.sub(u1n, la.scale(v, lam - eps)),) + tail)
    w_plus = la.span_of((la.sub(u1n, la.scale(v, lam + eps)),) + tail)
    # across the event the edge flips sides in the sliding frame while
    # every other edge of the face stays put
    s_before = la.dot(ebar, _tilde(v, la.sub(u1n, la.scale(v, lam - eps))))
    s_after = la.dot(ebar, _tilde(v, la.sub(u1n, la.scale(v, lam + eps))))
    if s_before == 0 or s_after == 0 or (s_before < 0) == (s_after < 0):
        raise WalkError("edge component does not change sign at the event")
    for other_edge, dirn in directions.items():
        b = la.dot(dirn, _tilde(v, la.sub(u1n, la.scale(v, lam - eps))))
        a = la.dot(dirn, _tilde(v, la.sub(u1n, la.scale(v, lam + eps))))
        if b == 0 or a == 0 or (b < 0) != (a < 0):
            raise WalkError(
                f"edge {other_edge} changes sides across the event"
            )
    variants = {}

    def built(span, rev):
        key = (id(span), rev)
        if key not in variants:
            variants[key] = elementary_transformation(
                p, face_id, other_id, span, reverse=rev
            )
        return variants[key]

    for rev1 in (False, True):
        for rev2 in (False, True):
            tr1 = built(w_minus, rev1)
            tr2 = built(w_plus, rev2)
            c1 = _before_chain(p, face_id, tr1)
            c2 = _before_chain(p, face_id, tr2)
            if edge not in c2 and c1 == c2 | {edge}:
                return tr1, tr2
            if edge not in c1 and c2 == c1 | {edge}:
                return tr1, tr2
    raise GeometryError("no orientation pairing splits the chains at the edge")


def to_json_dict(plan):
    """JSON payload for a walk plan: segments and the event log."""
    return {
        "segments": [
            {
                "t0": la.rat_str(seg.t_range[0]),
                "t1": la.rat_str(seg.t_range[1]),
                "base": [[la.rat_str(x) for x in row] for row in seg.base],
                "slope": [[la.rat_str(x) for x in row] for row in seg.slope],
            }
            for seg in plan.segments
        ],
        "events": [
            {"t": la.rat_str(e.time), "class": e.class_id}
            for e in plan.events
        ],
    }
