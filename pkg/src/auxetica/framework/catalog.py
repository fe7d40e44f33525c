"""Builders for the framework catalog: silica tilt models, honeycombs,
the square-pyramid case study, and the two-orbit 3D design family.

Each builder returns a validated PeriodicFramework. Tags accept either
CamelCase ("QuartzBeta") or kebab-case ("quartz-beta") spelling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ..errors import InvalidInput
from ..symcone import LinearMap
from .model import EdgeOrbit, PeriodicFramework, QuotientGraph, sublattice_relax, validate

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class CatalogId:
    tag: str
    params: dict = field(default_factory=dict)


def _tilt(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rotz(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


# Regular tetrahedron on alternating cube corners; edge length 2*sqrt(2).
# Corners 1,2 sit on top (z=+1), corners 3,4 on the bottom (z=-1).
_TET = [
    np.array([-1.0, 1.0, 1.0]),
    np.array([1.0, -1.0, 1.0]),
    np.array([1.0, 1.0, -1.0]),
    np.array([-1.0, -1.0, -1.0]),
]


def _orbits_from_points(corners, groups, reps_idx, lattice):
    """Map explicit corner coordinates onto orbit representatives.

    corners: list of point arrays; groups: list of index tuples, each an
    edge clique (the rigid-unit edges); reps_idx: indices into corners that
    serve as orbit representatives. Every corner must equal some
    representative plus an integer lattice vector.
    """
    inv = np.linalg.inv(lattice)
    reps = [corners[i] for i in reps_idx]

    def locate(x):
        for r_i, r in enumerate(reps):
            g = inv @ (x - r)
            g_round = np.round(g)
            if np.abs(g - g_round).max() < 1e-9:
                return r_i, g_round.astype(int)
        raise InvalidInput("corner does not lie on any representative orbit")

    edges = []
    seen = set()
    for group in groups:
        for a, b in combinations(group, 2):
            (ou, gu) = locate(corners[a])
            (ov, gv) = locate(corners[b])
            length = float(np.linalg.norm(corners[b] - corners[a]))
            e = EdgeOrbit(ou, ov, tuple(gv - gu), length).canonical()
            if e.key in seen:
                continue
            seen.add(e.key)
            edges.append(e)
    positions = np.array(reps)
    graph = QuotientGraph(lattice.shape[0], len(reps), tuple(edges))
    return PeriodicFramework(graph, positions, LinearMap.from_matrix(lattice))


def quartz_gram(theta):
    """Closed-form lattice Gram of the quartz tilt family."""
    c = (1.0 + SQRT3 * np.cos(theta)) ** 2
    g = np.zeros((3, 3))
    g[0, 0] = g[1, 1] = 4.0 * c
    g[0, 1] = g[1, 0] = -2.0 * c
    g[2, 2] = (6.0 * np.cos(theta)) ** 2
    return g


def quartz_gram_dot(theta):
    """d/dtheta of quartz_gram; negative definite on (0, pi/2)."""
    c = 1.0 + SQRT3 * np.cos(theta)
    dc2 = -2.0 * SQRT3 * c * np.sin(theta)
    g = np.zeros((3, 3))
    g[0, 0] = g[1, 1] = 4.0 * dc2
    g[0, 1] = g[1, 0] = -2.0 * dc2
    g[2, 2] = -72.0 * np.cos(theta) * np.sin(theta)
    return g


def cristobalite_gram(theta):
    c = np.cos(theta)
    return np.diag([8.0 * (1.0 + c) ** 2, 8.0 * (1.0 + c) ** 2, (8.0 * c) ** 2])


def cristobalite_gram_dot(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.diag([-16.0 * (1.0 + c) * s, -16.0 * (1.0 + c) * s, -128.0 * c * s])


def quartz_geometry(theta):
    """Corner coordinates and lattice of the three-tetrahedron quartz cell."""
    t = _tilt(theta)
    r = _rotz(2.0 * np.pi / 3.0)
    c_b = t @ _TET[0] - r @ (t @ _TET[3])
    c_c = c_b + r @ c_b
    centers = [np.zeros(3), c_b, c_c]
    corners = []
    for k, center in enumerate(centers):
        rk = np.linalg.matrix_power(r, k)
        corners.extend(rk @ t @ q + center for q in _TET)
    lam1 = corners[6] - corners[1]    # top corner of A to bottom corner of B
    lam2 = corners[10] - corners[5]
    lam3 = corners[8] - corners[3]    # one full helical turn, vertical
    return corners, np.column_stack([lam1, lam2, lam3])


def build_quartz_beta(theta=0.0):
    if not (-np.pi / 2 < theta < np.pi / 2):
        raise InvalidInput("tilt angle must lie in (-pi/2, pi/2)")
    corners, lattice = quartz_geometry(theta)
    groups = [(0, 1, 2, 3), (4, 5, 6, 7), (8, 9, 10, 11)]
    reps_idx = [0, 1, 2, 3, 4, 5]
    return _orbits_from_points(corners, groups, reps_idx, lattice)


def cristobalite_geometry(theta):
    t = _tilt(theta)
    r = _rotz(np.pi / 2.0)
    c_b = t @ _TET[0] - r @ (t @ _TET[3])
    centers = [np.zeros(3), c_b, c_b + r @ c_b, c_b + r @ c_b + r @ r @ c_b]
    corners = []
    for k, center in enumerate(centers):
        rk = np.linalg.matrix_power(r, k)
        corners.extend(rk @ t @ q + center for q in _TET)
    lam1 = corners[6] - corners[1]
    lam2 = corners[10] - corners[5]
    lam3 = corners[12] - corners[3]
    return corners, np.column_stack([lam1, lam2, lam3])


def build_cristobalite_beta(theta=0.0):
    if not (-np.pi / 2 < theta < np.pi / 2):
        raise InvalidInput("tilt angle must lie in (-pi/2, pi/2)")
    corners, lattice = cristobalite_geometry(theta)
    groups = [tuple(range(4 * k, 4 * k + 4)) for k in range(4)]
    reps_idx = [0, 1, 2, 3, 4, 5, 8, 9]
    return _orbits_from_points(corners, groups, reps_idx, lattice)


def _circumcenter(a, b):
    """Circumcenter of the triangle (0, a, b) in the plane."""
    cross = a[0] * b[1] - a[1] * b[0]
    if abs(cross) < 1e-12 * max(1.0, np.linalg.norm(a) * np.linalg.norm(b)):
        raise InvalidInput("period triangle is degenerate")
    na, nb = a @ a, b @ b
    cx = (na * b[1] - nb * a[1]) / (2.0 * cross)
    cy = (nb * a[0] - na * b[0]) / (2.0 * cross)
    return np.array([cx, cy])


def build_honeycomb(l1, l2):
    """Equal-edge hexagonal honeycomb: a triangle of periods with the
    circumcenter joined to its three vertices."""
    l1 = np.asarray(l1, dtype=float)
    l2 = np.asarray(l2, dtype=float)
    center = _circumcenter(l1, l2)
    radius = float(np.linalg.norm(center))
    positions = np.array([[0.0, 0.0], center])
    edges = (
        EdgeOrbit(0, 1, (0, 0), radius),
        EdgeOrbit(0, 1, (-1, 0), radius),
        EdgeOrbit(0, 1, (0, -1), radius),
    )
    graph = QuotientGraph(2, 2, edges)
    return PeriodicFramework(graph, positions, LinearMap.from_matrix(np.column_stack([l1, l2])))


def build_reentrant_honeycomb(height=1.4, apex_x=0.5, apex_y=1.0):
    """Pointed (reentrant) honeycomb: same quotient combinatorics as the
    equal-edge honeycomb but with an explicit non-crossing placement whose
    degree-3 joints are pointed."""
    lattice = np.column_stack([[1.0, 0.0], [0.0, height]])
    p0 = np.array([0.0, 0.0])
    p1 = np.array([apex_x, apex_y])

    def bar(gamma):
        return float(np.linalg.norm(p1 + lattice @ np.array(gamma, float) - p0))

    edges = (
        EdgeOrbit(0, 1, (0, 0), bar((0, 0))),
        EdgeOrbit(0, 1, (-1, 0), bar((-1, 0))),
        EdgeOrbit(0, 1, (0, -1), bar((0, -1))),
    )
    graph = QuotientGraph(2, 2, edges)
    return PeriodicFramework(graph, np.array([p0, p1]), LinearMap.from_matrix(lattice))


def build_missing_rib_equivalent(side=0.5, tilt_deg=20.0):
    """Rigid triangulated square joined to its horizontal and vertical
    translates; the kinematic stand-in for the missing-rib foam cell."""
    phi = np.deg2rad(tilt_deg)
    rho = side / SQRT2
    center = np.array([0.5, 0.5])
    corners = [
        center + rho * np.array([np.cos(phi + k * np.pi / 2), np.sin(phi + k * np.pi / 2)])
        for k in range(4)
    ]
    lattice = np.eye(2)

    def length(a, b, gamma=(0, 0)):
        return float(np.linalg.norm(corners[b] + lattice @ np.array(gamma, float) - corners[a]))

    edges = (
        EdgeOrbit(0, 1, (0, 0), length(0, 1)),
        EdgeOrbit(1, 2, (0, 0), length(1, 2)),
        EdgeOrbit(2, 3, (0, 0), length(2, 3)),
        EdgeOrbit(0, 3, (0, 0), length(0, 3)),
        EdgeOrbit(0, 2, (0, 0), length(0, 2)),          # bracing diagonal
        EdgeOrbit(0, 2, (1, 0), length(0, 2, (1, 0))),  # link to right neighbor
        EdgeOrbit(1, 3, (0, 1), length(1, 3, (0, 1))),  # link to upper neighbor
    )
    graph = QuotientGraph(2, 4, edges)
    return PeriodicFramework(graph, np.array(corners), LinearMap.from_matrix(lattice))


def build_pyramid3d(alpha, beta, r2=9.0 / 5.0):
    """Two-orbit framework over the square-pyramid period cell.

    Black orbit at the origin, white orbit at alpha; four unit bars to the
    rectangle corners and a fifth bar of squared length r2 to the apex
    translate beta.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if abs(alpha @ alpha - 1.0) > 1e-9:
        raise InvalidInput("white vertex must sit at unit distance from the origin")
    if abs((beta - alpha) @ (beta - alpha) - r2) > 1e-9:
        raise InvalidInput("apex bar length inconsistent with r2")
    lattice = np.column_stack(
        [np.array([2 * alpha[0], 0.0, 0.0]), np.array([0.0, 2 * alpha[1], 0.0]), beta]
    )
    positions = np.array([[0.0, 0.0, 0.0], alpha])
    r = float(np.sqrt(r2))
    edges = (
        EdgeOrbit(0, 1, (0, 0, 0), 1.0),
        EdgeOrbit(0, 1, (-1, 0, 0), 1.0),
        EdgeOrbit(0, 1, (-1, -1, 0), 1.0),
        EdgeOrbit(0, 1, (0, -1, 0), 1.0),
        EdgeOrbit(0, 1, (0, 0, -1), r),
    )
    graph = QuotientGraph(3, 2, edges)
    return PeriodicFramework(graph, positions, LinearMap.from_matrix(lattice))


PYRAMID3D_INITIAL_ALPHA = (np.sqrt(0.4), np.sqrt(0.4), -1.0 / np.sqrt(5.0))
PYRAMID3D_INITIAL_BETA = (np.sqrt(0.4), np.sqrt(0.4), 2.0 / np.sqrt(5.0))


def _two_orbit(lattice, white, black_gammas, dim=3):
    """n=2 framework: black orbit on the lattice, white joined to the
    listed black translates."""
    lattice = np.asarray(lattice, dtype=float)
    white = np.asarray(white, dtype=float)
    positions = np.array([np.zeros(dim), white])
    edges = []
    for g in black_gammas:
        target = lattice @ np.array(g, dtype=float)
        edges.append(EdgeOrbit(0, 1, tuple(-x for x in g), float(np.linalg.norm(white - target))).canonical())
    graph = QuotientGraph(dim, 2, tuple(edges))
    return PeriodicFramework(graph, positions, LinearMap.from_matrix(lattice))


def build_tetra3d(scale=1.0, offset=(0.0, 0.0, 0.0)):
    """Periods spanned by regular-tetrahedron edge vectors; white vertex at
    the centroid (plus an optional offset) joined to the four corners.

    At the exact centroid with equal bars the white joint sits at the
    circumcenter, which pins the circumradius and makes the auxetic cone
    trivial; offset placements restore nontrivial cones.
    """
    v = scale * np.array(
        [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
    ) / SQRT3
    lattice = np.column_stack([v[1] - v[0], v[2] - v[0], v[3] - v[0]])
    white = -v[0] + np.asarray(offset, dtype=float)
    gammas = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    return _two_orbit(lattice, white, gammas)


def build_prism3d(bar=1.0, offset=(0.0, 0.0, 0.0)):
    """Periods spanned by uniform triangular prism edges (side = height);
    white vertex at the prism center (plus an optional offset)."""
    a = bar * np.sqrt(12.0 / 7.0)
    rho = a / SQRT3
    base = [np.array([rho * np.cos(2 * np.pi * k / 3), rho * np.sin(2 * np.pi * k / 3), 0.0]) for k in range(3)]
    lattice = np.column_stack([base[1] - base[0], base[2] - base[0], np.array([0.0, 0.0, a])])
    white = np.array([0.0, 0.0, a / 2.0]) - base[0] + np.asarray(offset, dtype=float)
    gammas = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (0, 1, 1)]
    return _two_orbit(lattice, white, gammas)


def build_cube3d(bar=1.0, offset=(0.0, 0.0, 0.0)):
    """Cubic periods with the white vertex at the cell center (plus an
    optional offset), joined to the eight surrounding corners."""
    a = bar * 2.0 / SQRT3
    lattice = a * np.eye(3)
    white = np.array([a / 2, a / 2, a / 2]) + np.asarray(offset, dtype=float)
    gammas = [(i, j, k) for i in (0, 1) for j in (0, 1) for k in (0, 1)]
    return _two_orbit(lattice, white, gammas)


def build_doubled_pyramid3d(height_fraction=0.5):
    """Pyramid periods; white vertex on the axis joined to the four first-
    ceiling corners and the four edge midpoints of the doubled ceiling."""
    # regular pyramid: square side 2a equals the apex edge, so h^2 = 2 a^2;
    # first-ceiling bars are unit with the white vertex at half height
    zf = height_fraction
    a = 1.0 / np.sqrt(2.0 + 2.0 * (1.0 - zf) ** 2)
    h = a * SQRT2
    lattice = np.column_stack(
        [np.array([2 * a, 0.0, 0.0]), np.array([0.0, 2 * a, 0.0]), np.array([a, a, h])]
    )
    white = np.array([0.0, 0.0, zf * h])
    ceiling = [(0, 0, 1), (-1, 0, 1), (-1, -1, 1), (0, -1, 1)]
    midpoints = [(-1, 0, 2), (0, -1, 2), (-1, -2, 2), (-2, -1, 2)]
    return _two_orbit(lattice, white, ceiling + midpoints)


def build_doubled_tetra3d(height_fraction=0.5):
    """Tetrahedron periods; white vertex on the axis joined to the first-
    ceiling triangle and the midpoints of the doubled ceiling."""
    zf = height_fraction
    rho = 1.0 / np.sqrt(1.0 + 2.0 * (1.0 - zf) ** 2)
    h = rho * SQRT2
    tops = [np.array([rho * np.cos(2 * np.pi * k / 3), rho * np.sin(2 * np.pi * k / 3), h]) for k in range(3)]
    lattice = np.column_stack(tops)
    white = np.array([0.0, 0.0, zf * h])
    ceiling = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    midpoints = [(1, 1, 0), (0, 1, 1), (1, 0, 1)]
    return _two_orbit(lattice, white, ceiling + midpoints)


_KEBAB = {
    "quartz-beta": "QuartzBeta",
    "cristobalite-beta": "CristobaliteBeta",
    "honeycomb-equal-edge": "HoneycombEqualEdge",
    "reentrant-honeycomb": "ReentrantHoneycomb",
    "reentrant-honeycomb-relaxed": "ReentrantHoneycombRelaxed",
    "missing-rib-equivalent": "MissingRibEquivalent",
    "pyramid-3d": "Pyramid3D",
    "tetra-3d": "Tetra3D",
    "prism-3d": "Prism3D",
    "cube-3d": "Cube3D",
    "doubled-pyramid-3d": "DoubledPyramid3D",
    "doubled-tetra-3d": "DoubledTetra3D",
}

CATALOG_TAGS = tuple(_KEBAB.values())


def _offset_param(params):
    return (params.get("offset_x", 0.0), params.get("offset_y", 0.0), params.get("offset_z", 0.0))


def _honeycomb_lattice(params, default_angle_deg):
    if {"l1x", "l1y", "l2x", "l2y"} <= params.keys():
        return np.array([params["l1x"], params["l1y"]]), np.array([params["l2x"], params["l2y"]])
    angle = np.deg2rad(params.get("angle_deg", default_angle_deg))
    t = params.get("scale", 1.0)
    return np.array([t, 0.0]), t * np.array([np.cos(angle), np.sin(angle)])


def catalog(cid, **kwargs) -> PeriodicFramework:
    """Build a catalog framework by tag. Extra keyword arguments are merged
    into the CatalogId params."""
    if isinstance(cid, str):
        cid = CatalogId(cid, dict(kwargs))
    elif kwargs:
        cid = CatalogId(cid.tag, {**cid.params, **kwargs})
    tag = _KEBAB.get(cid.tag, cid.tag)
    p = cid.params
    try:
        if tag == "QuartzBeta":
            fw = build_quartz_beta(theta=p.get("theta", 0.0))
        elif tag == "CristobaliteBeta":
            fw = build_cristobalite_beta(theta=p.get("theta", 0.0))
        elif tag == "HoneycombEqualEdge":
            l1, l2 = _honeycomb_lattice(p, default_angle_deg=60.0)
            fw = build_honeycomb(l1, l2)
        elif tag == "ReentrantHoneycomb":
            fw = build_reentrant_honeycomb(
                height=p.get("height", 1.4),
                apex_x=p.get("apex_x", 0.5),
                apex_y=p.get("apex_y", 1.0),
            )
        elif tag == "ReentrantHoneycombRelaxed":
            fw = sublattice_relax(
                build_reentrant_honeycomb(
                    height=p.get("height", 1.4),
                    apex_x=p.get("apex_x", 0.5),
                    apex_y=p.get("apex_y", 1.0),
                ),
                np.diag([1, 2]),
            )
        elif tag == "MissingRibEquivalent":
            fw = build_missing_rib_equivalent(
                side=p.get("side", 0.5), tilt_deg=p.get("tilt_deg", 20.0)
            )
        elif tag == "Pyramid3D":
            alpha = (
                p.get("alpha1", PYRAMID3D_INITIAL_ALPHA[0]),
                p.get("alpha2", PYRAMID3D_INITIAL_ALPHA[1]),
                p.get("alpha3", PYRAMID3D_INITIAL_ALPHA[2]),
            )
            beta = (
                p.get("beta1", PYRAMID3D_INITIAL_BETA[0]),
                p.get("beta2", PYRAMID3D_INITIAL_BETA[1]),
                p.get("beta3", PYRAMID3D_INITIAL_BETA[2]),
            )
            fw = build_pyramid3d(alpha, beta, r2=p.get("r2", 9.0 / 5.0))
        elif tag == "Tetra3D":
            fw = build_tetra3d(scale=p.get("scale", 1.0), offset=_offset_param(p))
        elif tag == "Prism3D":
            fw = build_prism3d(bar=p.get("bar", 1.0), offset=_offset_param(p))
        elif tag == "Cube3D":
            fw = build_cube3d(bar=p.get("bar", 1.0), offset=_offset_param(p))
        elif tag == "DoubledPyramid3D":
            fw = build_doubled_pyramid3d(height_fraction=p.get("height_fraction", 0.5))
        elif tag == "DoubledTetra3D":
            fw = build_doubled_tetra3d(height_fraction=p.get("height_fraction", 0.5))
        else:
            raise InvalidInput(f"unknown catalog tag {cid.tag!r}")
    except TypeError as exc:
        raise InvalidInput(f"bad parameters for {tag}: {exc}") from exc
    bad = validate(fw)
    if bad:
        raise InvalidInput(f"catalog {tag} produced an invalid framework: {bad}")
    return fw
