"""Planar specialists: pointedness, crossing tests, pseudo-triangle faces,
random pseudo-triangulation generation, refinement search, and the
equal-edge honeycomb deformation-surface analytics.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DimensionError, GeneratorStalled, InvalidInput
from .framework import (
    EdgeOrbit,
    PeriodicFramework,
    QuotientGraph,
    canonical_edge_key,
    pair_classes,
)
from .symcone import LinearMap

POINTED_GAP_TOL = 1e-9
GEOM_EPS = 1e-9
ANGLE_EPS = 1e-9


# ---------------------------------------------------------------------------
# pointedness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexStar:
    """Unit edge directions leaving one vertex representative, including the
    reversed directions contributed by translated edge copies."""

    directions: tuple

    def __post_init__(self):
        if not self.directions:
            raise InvalidInput("vertex star needs at least one direction")


def star_directions(f: PeriodicFramework, orbit: int):
    """Directions of all edges incident to a vertex orbit (may be empty)."""
    lam = f.lattice.matrix
    dirs = []
    for e in f.graph.edges:
        w = f.edge_vector(e)
        norm = np.linalg.norm(w)
        if norm < GEOM_EPS:
            raise InvalidInput("degenerate edge in star construction")
        if e.u == orbit:
            dirs.append(w / norm)
        if e.v == orbit:
            dirs.append(-w / norm)
    deduped = []
    for d in dirs:
        if not any(np.linalg.norm(d - x) < 1e-12 for x in deduped):
            deduped.append(d)
    return deduped


def vertex_star(f: PeriodicFramework, orbit: int) -> VertexStar:
    return VertexStar(tuple(tuple(d) for d in star_directions(f, orbit)))


def _pointed_dirs(dirs) -> bool:
    """Max cyclic angular gap exceeds pi; empty and singleton stars are
    trivially pointed. Exact alignment (gap == pi) does not count."""
    if len(dirs) <= 1:
        return True
    angles = np.sort([np.arctan2(d[1], d[0]) for d in dirs])
    gaps = np.diff(angles, append=angles[0] + 2.0 * np.pi)
    return bool(gaps.max() > np.pi + POINTED_GAP_TOL)


def is_pointed(star: VertexStar) -> bool:
    return _pointed_dirs([np.asarray(d) for d in star.directions])


# ---------------------------------------------------------------------------
# segment crossing tests
# ---------------------------------------------------------------------------


def _cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _segments_cross(a1, a2, b1, b2, eps) -> bool:
    """True when the closed segments intersect anywhere except at shared
    endpoints."""
    shared = []
    for p in (a1, a2):
        for q in (b1, b2):
            if np.linalg.norm(p - q) < eps:
                shared.append((tuple(p), tuple(q)))
    if len(shared) >= 2:
        return True  # identical or fully overlapping segments
    if len(shared) == 1:
        # one common joint: improper only if the segments overlap collinearly
        p = np.array(shared[0][0])
        ua = a2 - a1 if np.linalg.norm(a1 - p) < eps else a1 - a2
        ub = b2 - b1 if np.linalg.norm(b1 - p) < eps else b1 - b2
        if abs(_cross2(ua, ub)) < eps * max(np.linalg.norm(ua), 1.0) * max(
            np.linalg.norm(ub), 1.0
        ):
            if ua @ ub > 0:
                return True
        return False

    da = a2 - a1
    db = b2 - b1
    scale = max(np.linalg.norm(da), np.linalg.norm(db), 1.0)
    tol = eps * scale

    def side(origin, direction, point):
        c = _cross2(direction, point - origin)
        if abs(c) < tol * scale:
            return 0
        return 1 if c > 0 else -1

    s1 = side(b1, db, a1)
    s2 = side(b1, db, a2)
    s3 = side(a1, da, b1)
    s4 = side(a1, da, b2)
    if s1 * s2 < 0 and s3 * s4 < 0:
        return True

    def on_segment(p, q1, q2):
        d = q2 - q1
        t = (p - q1) @ d / (d @ d)
        closest = q1 + np.clip(t, 0.0, 1.0) * d
        return np.linalg.norm(p - closest) < eps

    # collinear or touching cases: an endpoint of one lying on the other
    # (not at a shared joint, which was handled above) is a crossing
    if s1 == 0 and on_segment(a1, b1, b2):
        return True
    if s2 == 0 and on_segment(a2, b1, b2):
        return True
    if s3 == 0 and on_segment(b1, a1, a2):
        return True
    if s4 == 0 and on_segment(b2, a1, a2):
        return True
    return False


def _edge_segment(f: PeriodicFramework, e: EdgeOrbit):
    return f.positions[e.u].copy(), f.positions[e.v] + f.lattice.matrix @ np.array(e.gamma, float)


def _offsets_overlapping(seg_a, seg_b, lattice, pad):
    """Integer translates delta such that seg_b + lattice*delta could touch
    seg_a, from bounding boxes mapped through the inverse lattice."""
    lo_a = np.minimum(seg_a[0], seg_a[1]) - pad
    hi_a = np.maximum(seg_a[0], seg_a[1]) + pad
    lo_b = np.minimum(seg_b[0], seg_b[1])
    hi_b = np.maximum(seg_b[0], seg_b[1])
    corners = [
        np.array([lo_a[0] - hi_b[0], lo_a[1] - hi_b[1]]),
        np.array([lo_a[0] - hi_b[0], hi_a[1] - lo_b[1]]),
        np.array([hi_a[0] - lo_b[0], lo_a[1] - hi_b[1]]),
        np.array([hi_a[0] - lo_b[0], hi_a[1] - lo_b[1]]),
    ]
    inv = np.linalg.inv(lattice)
    frac = np.array([inv @ c for c in corners])
    lo = np.floor(frac.min(axis=0) - 1e-9).astype(int)
    hi = np.ceil(frac.max(axis=0) + 1e-9).astype(int)
    return product(range(lo[0], hi[0] + 1), range(lo[1], hi[1] + 1))


def _segment_clashes(seg_new, segments, lattice, eps, skip_zero_self=None):
    """Does seg_new cross any lattice translate of the given segments?

    skip_zero_self: index whose delta=0 copy is seg_new itself.
    """
    for idx, seg in enumerate(segments):
        for delta in _offsets_overlapping(seg_new, seg, lattice, pad=eps * 10):
            if skip_zero_self == idx and delta == (0, 0):
                continue
            shift = lattice @ np.array(delta, float)
            if _segments_cross(seg_new[0], seg_new[1], seg[0] + shift, seg[1] + shift, eps):
                return True
    return False


def noncrossing_complete(f: PeriodicFramework) -> bool:
    """Crossing-freeness of the full infinite arrangement (every pair of
    edge translates that can geometrically interact)."""
    if f.dim != 2:
        raise DimensionError("crossing tests require d=2")
    lam = f.lattice.matrix
    segments = [_edge_segment(f, e) for e in f.graph.edges]
    scale = max((np.linalg.norm(s[1] - s[0]) for s in segments), default=1.0)
    eps = GEOM_EPS * max(1.0, scale)
    for i, seg in enumerate(segments):
        if _segment_clashes(seg, segments[: i + 1], lam, eps, skip_zero_self=i):
            return False
    return True


def is_noncrossing(f: PeriodicFramework, radius: int) -> bool:
    """No two edge segments within the translate ball intersect except at
    shared endpoints."""
    if f.dim != 2:
        raise DimensionError("crossing tests require d=2")
    if radius < 1:
        raise InvalidInput("radius must be at least 1")
    lam = f.lattice.matrix
    placed = []
    for e_idx, e in enumerate(f.graph.edges):
        base = _edge_segment(f, e)
        for t in product(range(-radius, radius + 1), repeat=2):
            shift = lam @ np.array(t, float)
            placed.append((e_idx, t, base[0] + shift, base[1] + shift))
    scale = max((np.linalg.norm(p2 - p1) for (_, _, p1, p2) in placed), default=1.0)
    eps = GEOM_EPS * max(1.0, scale)
    for i in range(len(placed)):
        for j in range(i + 1, len(placed)):
            if _segments_cross(placed[i][2], placed[i][3], placed[j][2], placed[j][3], eps):
                return False
    return True


# ---------------------------------------------------------------------------
# faces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FaceWalk:
    """Cyclic face boundary: (vertex orbit, cell offset, interior angle)."""

    corners: tuple
    closes: bool  # total period displacement is zero (compact face)

    @property
    def is_pseudo_triangle(self) -> bool:
        if not self.closes:
            return False
        small = sum(1 for (_, _, angle) in self.corners if angle < np.pi - ANGLE_EPS)
        return small == 3

    @property
    def angle_sum(self) -> float:
        return float(sum(angle for (_, _, angle) in self.corners))


def classify_faces(f: PeriodicFramework):
    """Extract quotient faces by rotational sweep: the walk leaves along the
    first edge clockwise from the reversed arrival direction."""
    if f.dim != 2:
        raise DimensionError("face extraction requires d=2")
    if not noncrossing_complete(f):
        raise InvalidInput("face extraction requires a non-crossing framework")
    lam = f.lattice.matrix
    # darts: (edge index, forward?) with origin/head orbits and markings
    darts = []
    for idx, e in enumerate(f.graph.edges):
        w = f.edge_vector(e)
        darts.append(
            {"origin": e.u, "head": e.v, "gamma": np.array(e.gamma, int), "dir": w, "rev": None}
        )
        darts.append(
            {"origin": e.v, "head": e.u, "gamma": -np.array(e.gamma, int), "dir": -w, "rev": None}
        )
    for k in range(0, len(darts), 2):
        darts[k]["rev"] = k + 1
        darts[k + 1]["rev"] = k

    by_vertex = {}
    for k, dart in enumerate(darts):
        by_vertex.setdefault(dart["origin"], []).append(k)
    order = {}
    for orbit, incident in by_vertex.items():
        incident.sort(key=lambda k: np.arctan2(darts[k]["dir"][1], darts[k]["dir"][0]))
        for pos, k in enumerate(incident):
            order[k] = (orbit, pos)

    def next_dart(k):
        rev = darts[k]["rev"]
        orbit, pos = order[rev]
        incident = by_vertex[orbit]
        return incident[(pos - 1) % len(incident)]

    faces = []
    visited = set()
    for start in range(len(darts)):
        if start in visited:
            continue
        walk = []
        offset = np.zeros(2, dtype=int)
        k = start
        while True:
            visited.add(k)
            walk.append((k, offset.copy()))
            offset = offset + darts[k]["gamma"]
            k = next_dart(k)
            if k == start:
                break
        corners = []
        for (dart_k, off), (next_k, _) in zip(walk, walk[1:] + [walk[0]]):
            a = darts[dart_k]["dir"]
            b = darts[next_k]["dir"]
            corner_orbit = darts[dart_k]["head"]
            corner_offset = tuple(int(x) for x in (off + darts[dart_k]["gamma"]))
            if next_k == darts[dart_k]["rev"]:
                angle = 2.0 * np.pi
            else:
                ang = np.arctan2(-a[1], -a[0]) - np.arctan2(b[1], b[0])
                angle = float(np.mod(ang, 2.0 * np.pi))
                if angle == 0.0:
                    angle = 2.0 * np.pi
            corners.append((corner_orbit, corner_offset, angle))
        closes = bool(np.all(offset == 0))
        faces.append(FaceWalk(tuple(corners), closes))
    return faces


# ---------------------------------------------------------------------------
# pseudo-triangulation predicates and generation
# ---------------------------------------------------------------------------


def is_ppt(f: PeriodicFramework) -> bool:
    """Pointed pseudo-triangulation: non-crossing, pointed at every vertex,
    all faces pseudo-triangles, and m = 2n."""
    if f.dim != 2:
        return False
    if f.m != 2 * f.n:
        return False
    if not noncrossing_complete(f):
        return False
    if not all(_pointed_dirs(star_directions(f, i)) for i in range(f.n)):
        return False
    return all(face.is_pseudo_triangle for face in classify_faces(f))


class _Arrangement:
    """Incremental pointedness + crossing bookkeeping for edge insertion."""

    def __init__(self, positions, lattice):
        self.positions = np.asarray(positions, dtype=float)
        self.lattice = np.asarray(lattice, dtype=float)
        self.n = self.positions.shape[0]
        self.dirs = [[] for _ in range(self.n)]
        self.segments = []
        self.edges = []
        diam = max(1.0, float(np.abs(self.lattice).sum()))
        self.eps = GEOM_EPS * diam

    def edge_geometry(self, u, v, gamma):
        w = self.positions[v] + self.lattice @ np.array(gamma, float) - self.positions[u]
        return w, np.linalg.norm(w)

    def insertable(self, u, v, gamma):
        w, norm = self.edge_geometry(u, v, gamma)
        if norm < self.eps:
            return False
        d = w / norm
        if u == v:
            if not _pointed_dirs(self.dirs[u] + [d, -d]):
                return False
        else:
            if not _pointed_dirs(self.dirs[u] + [d]):
                return False
            if not _pointed_dirs(self.dirs[v] + [-d]):
                return False
        seg = (self.positions[u].copy(), self.positions[u] + w)
        if _segment_clashes(seg, self.segments, self.lattice, self.eps):
            return False
        if _segment_clashes(seg, [seg], self.lattice, self.eps, skip_zero_self=0):
            return False
        return True

    def insert(self, u, v, gamma):
        w, norm = self.edge_geometry(u, v, gamma)
        d = w / norm
        self.dirs[u].append(d)
        self.dirs[v if u != v else u].append(-d)
        self.segments.append((self.positions[u].copy(), self.positions[u] + w))
        self.edges.append(EdgeOrbit(u, v, gamma, float(norm)).canonical())

    def framework(self):
        graph = QuotientGraph(2, self.n, tuple(self.edges))
        return PeriodicFramework(graph, self.positions, LinearMap.from_matrix(self.lattice))


def _candidate_pool(n, radius, existing_keys):
    pool = []
    for u, v, g in pair_classes(n, 2, radius):
        if canonical_edge_key(u, v, g) in existing_keys:
            continue
        pool.append((u, v, g))
    return pool


def generate_ppt(
    lattice,
    points,
    seed: int,
    candidate_radius: int = 2,
    max_radius: int = 4,
    initial_edges=(),
) -> PeriodicFramework:
    """Insert random edge orbits, maintaining pointedness and crossing-
    freeness, until no candidate fits; the result must have m = 2n.

    The candidate pool is the translate ball of the given radius; if it is
    exhausted early the radius is raised up to max_radius before failing
    with GeneratorStalled.
    """
    lattice = lattice.matrix if isinstance(lattice, LinearMap) else np.asarray(lattice, float)
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise InvalidInput("points must be an (n, 2) array")
    n = points.shape[0]
    inv = np.linalg.inv(lattice)
    for i in range(n):
        for j in range(i + 1, n):
            frac = inv @ (points[j] - points[i])
            if np.abs(frac - np.round(frac)).max() < 1e-9:
                raise InvalidInput(f"points {i} and {j} coincide modulo the lattice")

    arr = _Arrangement(points, lattice)
    for (u, v, g) in initial_edges:
        if not arr.insertable(u, v, tuple(g)):
            raise InvalidInput(f"initial edge {(u, v, g)} is not insertable")
        arr.insert(u, v, tuple(g))

    rng = np.random.default_rng(seed)
    radius = candidate_radius
    pool = _candidate_pool(n, radius, {e.key for e in arr.edges})
    while True:
        inserted = False
        while pool:
            idx = int(rng.integers(len(pool)))
            cand = pool.pop(idx)
            if arr.insertable(*cand):
                arr.insert(*cand)
                inserted = True
                break
            # a rejected candidate can never become insertable later:
            # stars only gain directions and segments only accumulate
        if inserted:
            if len(arr.edges) > 2 * n:
                raise GeneratorStalled(
                    f"internal error: insertion count exceeded 2n (m={len(arr.edges)})"
                )
            if len(arr.edges) == 2 * n and not pool:
                break
            continue
        if len(arr.edges) == 2 * n:
            break
        if radius < max_radius:
            radius += 1
            pool = _candidate_pool(n, radius, {e.key for e in arr.edges})
            continue
        raise GeneratorStalled(
            f"no insertable candidate at radius {radius} with m={len(arr.edges)} < {2 * n}"
        )
    fw = arr.framework()
    if fw.m != 2 * fw.n:
        raise GeneratorStalled(f"generator stopped at m={fw.m}, expected {2 * fw.n}")
    return fw


def enumerate_refinements(f: PeriodicFramework, candidate_radius: int = 2):
    """All completions of a pointed non-crossing framework to pointed
    pseudo-triangulations using candidate edges within the given radius.

    Complete only relative to candidate_radius. Results are deduplicated by
    canonical edge sets and returned in a deterministic order.
    """
    if f.dim != 2:
        raise DimensionError("refinement search requires d=2")
    if not noncrossing_complete(f):
        raise InvalidInput("refinement search requires a non-crossing framework")
    if not all(_pointed_dirs(star_directions(f, i)) for i in range(f.n)):
        raise InvalidInput("refinement search requires a pointed framework")

    base = _Arrangement(f.positions, f.lattice.matrix)
    for e in f.graph.edges:
        base.insert(e.u, e.v, e.gamma)
    pool = sorted(_candidate_pool(f.n, candidate_radius, {e.key for e in base.edges}))
    need = 2 * f.n - f.m
    if need < 0:
        return []
    if need == 0:
        return [f] if is_ppt(f) else []

    results = []

    def dfs(arr, start, remaining):
        if remaining == 0:
            fw = arr.framework()
            if is_ppt(fw):
                results.append(fw)
            return
        for idx in range(start, len(pool) - remaining + 1):
            u, v, g = pool[idx]
            if arr.insertable(u, v, g):
                child = _Arrangement(arr.positions, arr.lattice)
                child.dirs = [list(ds) for ds in arr.dirs]
                child.segments = list(arr.segments)
                child.edges = list(arr.edges)
                child.insert(u, v, g)
                dfs(child, idx + 1, remaining - 1)

    dfs(base, 0, need)
    results.sort(key=lambda fw: tuple(sorted(e.key for e in fw.graph.edges)))
    return results


# ---------------------------------------------------------------------------
# equal-edge honeycomb analytics
# ---------------------------------------------------------------------------


class HoneycombVerdict(enum.Enum):
    NONTRIVIAL = "Nontrivial"
    TRIVIAL_ONLY = "TrivialOnly"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class HoneycombPoint:
    """Point of the equal-edge honeycomb deformation surface in lattice-Gram
    coordinates, with s the squared bar length."""

    a11: float
    a12: float
    a22: float
    s: float

    def __post_init__(self):
        if self.a11 <= 0 or self.a22 <= 0 or self.a11 * self.a22 - self.a12 ** 2 <= 0:
            raise InvalidInput("Gram entries do not describe a planar lattice")
        if self.s <= 0:
            raise InvalidInput("squared bar length must be positive")


def honeycomb_surface(a11, a12, a22, s) -> float:
    """Defining cubic of the deformation surface; zero on the surface."""
    det = a11 * a22 - a12 * a12
    if det <= 0:
        raise InvalidInput("degenerate Gram matrix")
    return a11 * a22 * (a11 + a22 - 2.0 * a12) - 4.0 * s * det


def honeycomb_gradient(a11, a12, a22, s):
    f11 = a22 * (a22 + 2.0 * a11 - 2.0 * a12 - 4.0 * s)
    f12 = 8.0 * s * a12 - 2.0 * a11 * a22
    f22 = a11 * (a11 + 2.0 * a22 - 2.0 * a12 - 4.0 * s)
    return f11, f12, f22


def honeycomb_discriminant(pt: HoneycombPoint) -> float:
    f11, f12, f22 = honeycomb_gradient(pt.a11, pt.a12, pt.a22, pt.s)
    return (2.0 * f11 * f22 - f12 ** 2) ** 2 - 4.0 * (f11 * f22) ** 2


def honeycomb_auxetic_test(pt: HoneycombPoint, tol: float = 1e-9) -> HoneycombVerdict:
    """Sign of the tangent-plane discriminant decides whether the honeycomb
    admits a nontrivial infinitesimal auxetic motion at this surface point."""
    residual = honeycomb_surface(pt.a11, pt.a12, pt.a22, pt.s)
    scale3 = max(1.0, max(abs(pt.a11), abs(pt.a22), abs(pt.a12), 4.0 * pt.s)) ** 3
    if abs(residual) > 1e-9 * scale3:
        raise InvalidInput(f"point is off the deformation surface (residual {residual:.3e})")
    f11, f12, f22 = honeycomb_gradient(pt.a11, pt.a12, pt.a22, pt.s)
    delta = honeycomb_discriminant(pt)
    scale = max(1.0, (f11 * f11 + f12 * f12 + f22 * f22) ** 2)
    if delta > tol * scale:
        return HoneycombVerdict.NONTRIVIAL
    if delta >= -tol * scale:
        return HoneycombVerdict.BOUNDARY
    return HoneycombVerdict.TRIVIAL_ONLY


def honeycomb_point_from_periods(l1, l2) -> HoneycombPoint:
    """On-surface point for the framework with the given period triangle;
    s is the squared circumradius."""
    l1 = np.asarray(l1, dtype=float)
    l2 = np.asarray(l2, dtype=float)
    a11 = float(l1 @ l1)
    a22 = float(l2 @ l2)
    a12 = float(l1 @ l2)
    det = a11 * a22 - a12 * a12
    if det <= 0:
        raise InvalidInput("degenerate period triangle")
    s = a11 * a22 * (a11 + a22 - 2.0 * a12) / (4.0 * det)
    return HoneycombPoint(a11, a12, a22, s)


def triangle_angle_class(a11, a12, a22, tol: float = 1e-9):
    """Classify the period triangle by its largest angle: 'obtuse',
    'right', or 'acute'. The three corner dot products are a12, a11-a12,
    a22-a12; at most one can be nonpositive."""
    dots = (a12, a11 - a12, a22 - a12)
    scale = max(1.0, abs(a11), abs(a22), abs(a12))
    dmin = min(dots)
    if dmin < -tol * scale:
        return "obtuse"
    if dmin <= tol * scale:
        return "right"
    return "acute"
