"""Planar projections: shadow polygons, degeneration tests, sampling.

All 2D work happens in the frame of the plane's basis: the frame
coordinates are an affine image of the true orthogonal projection, so
hull combinatorics, collinearity and boundary containment are
unchanged, and everything stays rational.
"""

import random
from collections import namedtuple

from . import linalg as la
from . import polytope as pt
from .errors import (
    DegenerateShadowError,
    DimensionError,
    InadmissiblePlaneError,
    ParameterError,
    SamplingError,
)


class ProjectionPlane:
    """A 2-plane W together with its exact orthogonal complement."""

    __slots__ = ("basis", "complement", "_gram_inv")

    def __init__(self, basis):
        if not isinstance(basis, la.Subspace):
            basis = la.Subspace(basis)
        if basis.dim != 2:
            raise DimensionError("projection plane must have dimension 2")
        self.basis = basis
        ortho = la.kernel_basis(basis.basis)
        self.complement = la.Subspace(ortho, ambient=basis.ambient)
        self._gram_inv = None

    @classmethod
    def from_orthogonal(cls, vectors):
        """Plane whose orthogonal complement is spanned by the vectors."""
        s = vectors if isinstance(vectors, la.Subspace) else la.Subspace(vectors)
        w = la.kernel_basis(s.basis)
        if len(w) != 2:
            raise DimensionError("orthogonal space must have dimension d-2")
        return cls(w)

    @property
    def ambient(self):
        return self.basis.ambient

    def coords(self, v):
        """Frame coordinates of the projection of v onto the plane."""
        b1, b2 = self.basis.basis
        if self._gram_inv is None:
            g = ((la.dot(b1, b1), la.dot(b1, b2)), (la.dot(b2, b1), la.dot(b2, b2)))
            self._gram_inv = la.inverse(g)
        r1 = la.dot(b1, v)
        r2 = la.dot(b2, v)
        gi = self._gram_inv
        return (gi[0][0] * r1 + gi[0][1] * r2, gi[1][0] * r1 + gi[1][1] * r2)


ShadowPolygon = namedtuple(
    "ShadowPolygon", ["hull_vertex_ids", "points", "k", "fibers"]
)

Admissibility = namedtuple("Admissibility", ["ok", "violating_class"])

MemberDegeneration = namedtuple(
    "MemberDegeneration", ["face_id", "contained_in_edge", "touches_hull"]
)

ClassDegeneration = namedtuple(
    "ClassDegeneration", ["class_id", "projected_rank", "members"]
)

DegenerationReport = namedtuple(
    "DegenerationReport",
    ["degenerating", "condition_i", "condition_ii", "admissible"],
)


def cross2(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def on_segment(q, a, b):
    """Exact membership of q in the closed 2D segment [a, b]."""
    if cross2(a, b, q) != 0:
        return False
    if min(a[0], b[0]) <= q[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= q[1] <= max(
        a[1], b[1]
    ):
        return True
    return False


def project(p, w):
    """Frame coordinates of every vertex image, in vertex order."""
    if w.ambient != p.dim:
        raise DimensionError("plane and polytope dimensions differ")
    return [w.coords(v) for v in p.vertices]


def strict_hull_2d(points):
    """Counterclockwise strict convex hull of distinct 2D points."""
    pts = sorted(points)
    if len(pts) <= 2:
        return pts
    lower = []
    for q in pts:
        while len(lower) > 1 and cross2(lower[-2], lower[-1], q) <= 0:
            lower.pop()
        lower.append(q)
    upper = []
    for q in reversed(pts):
        while len(upper) > 1 and cross2(upper[-2], upper[-1], q) <= 0:
            upper.pop()
        upper.append(q)
    return lower[:-1] + upper[:-1]


def shadow(p, w):
    """Exact shadow polygon of p on the plane w."""
    images = project(p, w)
    fibers = {}
    for vid, q in enumerate(images):
        fibers.setdefault(q, []).append(vid)
    hull = strict_hull_2d(fibers.keys())
    if len(hull) < 3:
        raise DegenerateShadowError(
            "vertex images are collinear; input cannot be full-dimensional"
        )
    ids = tuple(min(fibers[q]) for q in hull)
    fib = tuple(tuple(fibers[q]) for q in hull)
    return ShadowPolygon(ids, tuple(hull), len(hull), fib)


def hull_edges(poly):
    """Closed edges of a ShadowPolygon as point pairs, cyclic order."""
    pts = poly.points
    return [(pts[i], pts[(i + 1) % poly.k]) for i in range(poly.k)]


def on_hull_boundary(q, poly):
    return any(on_segment(q, a, b) for a, b in hull_edges(poly))


def class_degeneracy_det(p, ortho_rows, direction_plane):
    """det of the stacked (W-orthogonal basis | 2-face direction basis).

    Nonzero exactly when the class does not degenerate for the plane
    with that orthogonal space.
    """
    rows = tuple(ortho_rows) + tuple(direction_plane.basis)
    if len(rows) != p.dim:
        raise DimensionError("stacked family is not square")
    return la.det(rows)


def is_admissible(p, w):
    """Exact admissibility with the first violating class on failure."""
    ortho = w.complement.basis
    for cid, cls in enumerate(pt.parallel_classes(p)):
        if class_degeneracy_det(p, ortho, cls.direction_plane) == 0:
            return Admissibility(False, cid)
    return Admissibility(True, None)


def degeneration_report(p, w):
    """Both degeneration conditions, exactly.

    condition_i holds when no class projects to rank <= 1; condition_ii
    holds when no degenerate member's image is contained in a closed
    edge of the shadow. Boundary contact (touching the hull anywhere)
    is reported alongside containment for each degenerate member.
    """
    classes = pt.parallel_classes(p)
    degenerating = []
    poly = None
    faces = pt.k_faces(p, 2) if p.dim >= 3 else []
    for cid, cls in enumerate(classes):
        mat = [w.coords(b) for b in cls.direction_plane.basis]
        prank = la.rank(mat)
        if prank >= 2:
            continue
        if poly is None:
            poly = shadow(p, w)
        edges = hull_edges(poly)
        members = []
        for fid in cls.member_ids:
            imgs = {w.coords(p.vertices[i]) for i in faces[fid].vertex_ids}
            contained = any(
                all(on_segment(q, a, b) for q in imgs) for a, b in edges
            )
            touches = any(on_hull_boundary(q, poly) for q in imgs)
            members.append(MemberDegeneration(fid, contained, touches))
        degenerating.append(ClassDegeneration(cid, prank, members))
    cond_i = not degenerating
    cond_ii = not any(
        m.contained_in_edge for c in degenerating for m in c.members
    )
    return DegenerationReport(degenerating, cond_i, cond_ii, cond_i)


def sample_admissible(p, rng_seed, count, grid_bound=100):
    """Admissible planes with seeded integer-grid bases.

    Rejection sampling over bases with entries in [-grid_bound,
    grid_bound]; deterministic for a fixed seed. Raises SamplingError
    after 1000 * count failed attempts.
    """
    if count < 1:
        raise ParameterError("count must be at least 1")
    rng = random.Random(rng_seed)
    budget = 1000 * count
    out = []
    d = p.dim
    while len(out) < count:
        if budget == 0:
            raise SamplingError(
                f"no admissible plane found in {1000 * count} attempts"
            )
        budget -= 1
        b1 = tuple(rng.randint(-grid_bound, grid_bound) for _ in range(d))
        b2 = tuple(rng.randint(-grid_bound, grid_bound) for _ in range(d))
        if la.rank((la.as_vec(b1), la.as_vec(b2))) != 2:
            continue
        w = ProjectionPlane((b1, b2))
        if is_admissible(p, w).ok:
            out.append(w)
    return out


def zonotope_shadow_size(generators, w):
    """Shadow vertex count of the zonotope with the given generators.

    Exactly verifies that no generator image vanishes and no two are
    collinear; the shadow is then a polygon with 2 * len(generators)
    vertices. Violations raise InadmissiblePlaneError.
    """
    gens = [la.as_vec(g) for g in generators]
    imgs = [w.coords(g) for g in gens]
    for i, q in enumerate(imgs):
        if q[0] == 0 and q[1] == 0:
            raise InadmissiblePlaneError(f"generator {i} projects to zero")
    for i in range(len(imgs)):
        for j in range(i + 1, len(imgs)):
            a, b = imgs[i], imgs[j]
            if a[0] * b[1] - a[1] * b[0] == 0:
                raise InadmissiblePlaneError(
                    f"generators {i} and {j} project to parallel segments"
                )
    return 2 * len(gens)
