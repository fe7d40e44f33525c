"""Data model for d-periodic bar-and-joint frameworks.

A framework is a quotient graph (vertex orbits, edge orbits with integer
period markings), one representative position per vertex orbit, and a
lattice basis whose columns generate the translation group.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInput
from ..symcone import LinearMap, SymMatrix

EDGE_LENGTH_RTOL = 1e-9


def canonical_edge_key(u, v, gamma):
    """Canonical orientation of an edge orbit: u <= v, and for u == v the
    lexicographically positive marking."""
    gamma = tuple(int(g) for g in gamma)
    if u > v:
        return v, u, tuple(-g for g in gamma)
    if u == v:
        for g in gamma:
            if g > 0:
                return u, v, gamma
            if g < 0:
                return u, v, tuple(-x for x in gamma)
    return u, v, gamma


@dataclass(frozen=True)
class EdgeOrbit:
    u: int
    v: int
    gamma: tuple
    length: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(int(g) for g in self.gamma))
        if self.length <= 0 or not np.isfinite(self.length):
            raise InvalidInput(f"edge length must be positive, got {self.length}")

    def canonical(self) -> "EdgeOrbit":
        u, v, g = canonical_edge_key(self.u, self.v, self.gamma)
        return EdgeOrbit(u, v, g, self.length)

    @property
    def key(self):
        return canonical_edge_key(self.u, self.v, self.gamma)


@dataclass(frozen=True)
class QuotientGraph:
    dim: int
    n_vertex_orbits: int
    edges: tuple = field(default=())

    def __post_init__(self):
        if self.n_vertex_orbits < 1:
            raise InvalidInput("need at least one vertex orbit")
        edges = tuple(e if isinstance(e, EdgeOrbit) else EdgeOrbit(*e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        seen = set()
        for idx, e in enumerate(edges):
            if not (0 <= e.u < self.n_vertex_orbits and 0 <= e.v < self.n_vertex_orbits):
                raise InvalidInput(f"edge {idx} references vertex orbit out of range")
            if len(e.gamma) != self.dim:
                raise InvalidInput(f"edge {idx} marking has wrong dimension")
            if e.u == e.v and all(g == 0 for g in e.gamma):
                raise InvalidInput(f"edge {idx} joins a placement point to itself")
            if e.key in seen:
                raise InvalidInput(f"edge {idx} duplicates another edge orbit")
            seen.add(e.key)

    @property
    def n_edge_orbits(self):
        return len(self.edges)


@dataclass(frozen=True)
class PeriodicFramework:
    graph: QuotientGraph
    positions: np.ndarray
    lattice: LinearMap

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.shape != (self.graph.n_vertex_orbits, self.graph.dim):
            raise InvalidInput(
                f"positions shape {pos.shape} does not match "
                f"({self.graph.n_vertex_orbits}, {self.graph.dim})"
            )
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)
        if self.lattice.dim != self.graph.dim:
            raise InvalidInput("lattice dimension does not match graph dimension")

    @property
    def dim(self):
        return self.graph.dim

    @property
    def n(self):
        return self.graph.n_vertex_orbits

    @property
    def m(self):
        return self.graph.n_edge_orbits

    def edge_vector(self, e: EdgeOrbit) -> np.ndarray:
        lam = self.lattice.matrix
        return self.positions[e.v] + lam @ np.array(e.gamma, dtype=float) - self.positions[e.u]

    def with_geometry(self, positions, lattice) -> "PeriodicFramework":
        """Same quotient graph, new placement."""
        lat = lattice if isinstance(lattice, LinearMap) else LinearMap.from_matrix(lattice)
        return PeriodicFramework(self.graph, np.array(positions, dtype=float), lat)

    def edge_lengths_current(self) -> np.ndarray:
        return np.array([np.linalg.norm(self.edge_vector(e)) for e in self.graph.edges])


@dataclass(frozen=True)
class Violation:
    kind: str
    index: int | None = None
    detail: str = ""

    def __str__(self):
        where = "" if self.index is None else f"[{self.index}]"
        extra = f": {self.detail}" if self.detail else ""
        return f"{self.kind}{where}{extra}"


def validate(f: PeriodicFramework):
    """Check framework invariants; returns a list of violations (empty = valid)."""
    out = []
    lam = f.lattice.matrix
    if not np.isfinite(f.positions).all() or not np.isfinite(lam).all():
        out.append(Violation("NonFiniteData"))
        return out
    if abs(np.linalg.det(lam)) <= 1e-12 * max(1.0, np.abs(lam).max()) ** f.dim:
        out.append(Violation("DegenerateLattice", detail=f"det={np.linalg.det(lam):.3e}"))
    for idx, e in enumerate(f.graph.edges):
        actual = np.linalg.norm(f.edge_vector(e))
        if abs(actual - e.length) > EDGE_LENGTH_RTOL * max(1.0, e.length):
            out.append(
                Violation(
                    "EdgeLengthMismatch",
                    index=idx,
                    detail=f"stored {e.length:.12g}, placed {actual:.12g}",
                )
            )
    return out


def gram(f: PeriodicFramework) -> SymMatrix:
    """Gram matrix of the lattice generators."""
    lam = f.lattice.matrix
    return SymMatrix.from_matrix(lam.T @ lam)


def constraint_jacobian_matrix(f: PeriodicFramework) -> np.ndarray:
    """Jacobian of the squared edge-length constraints.

    Row e differentiates |p(v) + Lambda*gamma - p(u)|^2 with respect to the
    dn position coordinates (vertex-major) followed by the d^2 lattice
    entries in column-major order.
    """
    d, n, m = f.dim, f.n, f.m
    jac = np.zeros((m, d * n + d * d))
    for row, e in enumerate(f.graph.edges):
        w = 2.0 * f.edge_vector(e)
        jac[row, e.v * d : (e.v + 1) * d] += w
        jac[row, e.u * d : (e.u + 1) * d] -= w
        for j in range(d):
            if e.gamma[j] != 0:
                jac[row, d * n + j * d : d * n + (j + 1) * d] += w * e.gamma[j]
    return jac


def numeric_rank(a: np.ndarray, rtol: float = 1e-9) -> int:
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > rtol * max(1.0, s[0])))


def dof(f: PeriodicFramework) -> int:
    """Dimension of the local deformation space modulo Euclidean isometries.

    Computed as dn + d^2 - rank(J) - d(d+1)/2 so that dependent constraints
    are handled by the numeric rank.
    """
    bad = validate(f)
    if bad:
        raise InvalidInput("invalid framework: " + "; ".join(str(v) for v in bad))
    d, n = f.dim, f.n
    rank = numeric_rank(constraint_jacobian_matrix(f))
    return d * n + d * d - rank - d * (d + 1) // 2


def _coset_representatives(basis: np.ndarray):
    """Representatives of Z^d / basis*Z^d, lexicographically ordered."""
    d = basis.shape[0]
    count = abs(round(np.linalg.det(basis)))
    inv = np.linalg.inv(basis)
    bound = int(np.abs(basis).sum()) + 1
    reps = []
    seen = set()
    ranges = [range(bound) for _ in range(d)]
    from itertools import product

    for t in product(*ranges):
        frac = inv @ np.array(t, dtype=float)
        key = tuple(np.round(frac - np.floor(frac + 1e-9), 9))
        if key not in seen:
            seen.add(key)
            reps.append(np.array(t, dtype=int))
            if len(reps) == count:
                return reps
    raise InvalidInput("failed to enumerate sublattice cosets")


def sublattice_relax(f: PeriodicFramework, basis) -> PeriodicFramework:
    """Relax periodicity to the finite-index sublattice Lambda * basis.

    The infinite point set is unchanged; vertex and edge orbits multiply
    by |det basis|.
    """
    basis = np.asarray(basis)
    if basis.shape != (f.dim, f.dim) or not np.issubdtype(basis.dtype, np.integer):
        basis = np.asarray(basis, dtype=float)
        if np.abs(basis - np.round(basis)).max() > 1e-9:
            raise InvalidInput("sublattice basis must be an integer matrix")
        basis = np.round(basis).astype(int)
    det = round(np.linalg.det(basis.astype(float)))
    if det == 0:
        raise InvalidInput("sublattice basis is singular")
    reps = _coset_representatives(basis.astype(float))
    index_of = {tuple(t): k for k, t in enumerate(reps)}
    inv = np.linalg.inv(basis.astype(float))
    lam = f.lattice.matrix

    def reduce(t):
        """Split integer vector t into (coset representative, sublattice coords)."""
        t = np.asarray(t, dtype=int)
        for rep in reps:
            frac = inv @ (t - rep)
            if np.abs(frac - np.round(frac)).max() < 1e-9:
                return tuple(rep), tuple(int(x) for x in np.round(frac))
        raise InvalidInput("coset reduction failed")

    n_new = f.n * len(reps)
    positions = np.zeros((n_new, f.dim))
    for i in range(f.n):
        for k, t in enumerate(reps):
            positions[i * len(reps) + k] = f.positions[i] + lam @ t.astype(float)

    edges = []
    for e in f.graph.edges:
        for k, t in enumerate(reps):
            head = np.array(e.gamma, dtype=int) + t
            rep, gamma_new = reduce(head)
            edges.append(
                EdgeOrbit(
                    e.u * len(reps) + k,
                    e.v * len(reps) + index_of[rep],
                    gamma_new,
                    e.length,
                ).canonical()
            )
    graph = QuotientGraph(f.dim, n_new, tuple(edges))
    new_lattice = LinearMap.from_matrix(lam @ basis.astype(float))
    return PeriodicFramework(graph, positions, new_lattice)


def pair_classes(n_orbits: int, dim: int, radius: int):
    """Deterministic list of vertex-pair classes (u, v, gamma) within the
    translate ball.

    For u < v every marking with max-norm <= radius appears; for u == v the
    marking is nonzero and lexicographically positive (sign dedup). Ordered
    lexicographically in (u, v, gamma).
    """
    if radius < 0:
        raise InvalidInput("radius must be nonnegative")
    from itertools import product

    gammas = sorted(product(range(-radius, radius + 1), repeat=dim))
    out = []
    for u in range(n_orbits):
        for v in range(u, n_orbits):
            for g in gammas:
                if u == v:
                    nz = next((x for x in g if x != 0), 0)
                    if nz <= 0:
                        continue
                out.append((u, v, g))
    return out


def pairwise_distances(f: PeriodicFramework, radius: int):
    """Distances for every vertex-pair class within the translate ball.

    Returns [(pair_id, distance)] with pair_id = (u, v, gamma) in the
    deterministic order of pair_classes.
    """
    return pairwise_distances_at(f.positions, f.lattice.matrix, radius)


def pairwise_distances_at(positions, lattice, radius: int):
    positions = np.asarray(positions, dtype=float)
    lattice = np.asarray(lattice, dtype=float)
    n, d = positions.shape
    out = []
    for u, v, g in pair_classes(n, d, radius):
        delta = positions[v] + lattice @ np.array(g, dtype=float) - positions[u]
        out.append(((u, v, g), float(np.linalg.norm(delta))))
    return out
