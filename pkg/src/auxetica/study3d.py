"""Closed-form analysis of the four-parameter square-pyramid framework:
its quartic deformation hypersurface, the gradient, the four rank-one
nodes of the bounding Cayley cubic, the four expansive extremal rays, and
the polyhedral-in-spectrahedral cone inclusion.

Coordinates are a = (a11, a22, a33, a13, a23) on the chart a12 = 0 of the
lattice Gram matrix; r2 is the squared length of the fifth bar.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ComplexNodes, InclusionViolation, InvalidInput
from .symcone import PsdStatus, SymMatrix, jacobi_eigh, psd_status

DEFAULT_R2 = 9.0 / 5.0

INITIAL_POINT = (8.0 / 5.0, 8.0 / 5.0, 8.0 / 5.0, 4.0 / 5.0, 4.0 / 5.0)


@dataclass(frozen=True)
class StudyPoint:
    a: tuple
    r2: float = DEFAULT_R2

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        if len(a) != 5:
            raise InvalidInput("a study point has five Gram coordinates")
        object.__setattr__(self, "a", a)
        if a[0] <= 0 or a[1] <= 0:
            raise InvalidInput("a11 and a22 must be positive")

    @staticmethod
    def initial(r2=DEFAULT_R2) -> "StudyPoint":
        return StudyPoint(INITIAL_POINT, r2)


@dataclass(frozen=True)
class ProjectivePoint5:
    """Point of P^4 in the Gram chart, canonicalized so the largest entry
    has magnitude 1 and the first nonzero entry is positive."""

    v: tuple

    @staticmethod
    def from_vector(v) -> "ProjectivePoint5":
        v = np.asarray(v, dtype=float)
        if v.shape != (5,):
            raise InvalidInput("expected a 5-vector")
        top = np.abs(v).max()
        if top == 0:
            raise InvalidInput("zero vector is not projective")
        v = v / top
        for x in v:
            if abs(x) > 1e-14:
                if x < 0:
                    v = -v
                break
        return ProjectivePoint5(tuple(float(x) for x in v))

    def distance(self, other: "ProjectivePoint5") -> float:
        a = np.array(self.v)
        b = np.array(other.v)
        return float(min(np.abs(a - b).max(), np.abs(a + b).max()))


def matrix_from_coords(v) -> SymMatrix:
    """Symmetric 3x3 matrix for chart coordinates (v11, v22, v33, v13, v23)
    with the (1,2) entry zero."""
    v11, v22, v33, v13, v23 = (float(x) for x in v)
    return SymMatrix.from_matrix(
        np.array([[v11, 0.0, v13], [0.0, v22, v23], [v13, v23, v33]])
    )


def quartic_f(p: StudyPoint) -> float:
    """Defining quartic of the deformation hypersurface."""
    a11, a22, a33, a13, a23 = p.a
    u = a33 - a13 - a23 + 1.0 - p.r2
    det = a11 * a22 * a33 - a22 * a13 ** 2 - a11 * a23 ** 2
    return a11 * a22 * u ** 2 - det * (4.0 - a11 - a22)


def quartic_gradient(p: StudyPoint) -> np.ndarray:
    """Gradient (f11, f22, f33, f13, f23) of the quartic."""
    a11, a22, a33, a13, a23 = p.a
    u = a33 - a13 - a23 + 1.0 - p.r2
    det = a11 * a22 * a33 - a22 * a13 ** 2 - a11 * a23 ** 2
    rest = 4.0 - a11 - a22
    f11 = a22 * u ** 2 - (a22 * a33 - a23 ** 2) * rest + det
    f22 = a11 * u ** 2 - (a11 * a33 - a13 ** 2) * rest + det
    f33 = 2.0 * a11 * a22 * u - a11 * a22 * rest
    f13 = -2.0 * a11 * a22 * u + 2.0 * a22 * a13 * rest
    f23 = -2.0 * a11 * a22 * u + 2.0 * a11 * a23 * rest
    return np.array([f11, f22, f33, f13, f23])


def cayley_nodes(p: StudyPoint):
    """The four rank-one points where the gradient-orthogonal hyperplane
    meets the Veronese conics of the chart."""
    f11, f22, f33, f13, f23 = quartic_gradient(p)
    rad13 = f13 ** 2 - 4.0 * f11 * f33
    rad23 = f23 ** 2 - 4.0 * f22 * f33
    if rad13 < 0 or rad23 < 0:
        raise ComplexNodes(f"node radicands negative: {rad13:.3e}, {rad23:.3e}")
    d13 = np.sqrt(rad13)
    d23 = np.sqrt(rad23)
    raw = [
        (-f33 * (d13 - f13), 0.0, f11 * (d13 + f13), -2.0 * f11 * f33, 0.0),
        (-f33 * (d13 + f13), 0.0, f11 * (d13 - f13), 2.0 * f11 * f33, 0.0),
        (0.0, -f33 * (d23 - f23), f22 * (d23 + f23), 0.0, -2.0 * f22 * f33),
        (0.0, -f33 * (d23 + f23), f22 * (d23 - f23), 0.0, 2.0 * f22 * f33),
    ]
    return [ProjectivePoint5.from_vector(v) for v in raw]


def expansive_rays(p: StudyPoint):
    """Extremal rays of the infinitesimal expansive cone: the tangents of
    the four one-degree-of-freedom mechanisms obtained by pinning three of
    the four ceiling-translate distances."""
    f11, f22, f33, f13, f23 = quartic_gradient(p)
    raw = [
        (-f33, 0.0, f11, 0.0, 0.0),
        (-f33, 0.0, f11 + f13, -f33, 0.0),
        (0.0, -f33, f22, 0.0, 0.0),
        (0.0, -f33, f22 + f23, 0.0, -f33),
    ]
    return [ProjectivePoint5.from_vector(v) for v in raw]


def newton_project_to_surface(a, r2=DEFAULT_R2, tol=1e-12, max_iter=60) -> StudyPoint:
    """Return the nearby surface point reached by Newton steps along the
    gradient direction."""
    a = np.array(a, dtype=float)
    for _ in range(max_iter):
        p = StudyPoint(tuple(a), r2)
        val = quartic_f(p)
        if abs(val) <= tol:
            return p
        grad = quartic_gradient(p)
        norm2 = grad @ grad
        if norm2 < 1e-18:
            raise InvalidInput("gradient vanished during surface projection")
        a = a - grad * (val / norm2)
    raise InvalidInput("surface projection did not converge")


@dataclass
class InclusionReport:
    grid_points: int
    boundary_nodes: int
    outside_samples: int
    min_grid_eigenvalue: float
    max_node_eigenvalue_abs: float


def _barycentric_grid(k, m):
    """All nonnegative integer m-tuples summing to k."""
    if m == 1:
        yield (k,)
        return
    for head in range(k + 1):
        for rest in _barycentric_grid(k - head, m - 1):
            yield (head,) + rest


def cone_inclusion_check(
    p: StudyPoint, samples: int = 10, outside_samples: int = 1000, seed: int = 0, tol: float = 1e-9
) -> InclusionReport:
    """Verify the polyhedral expansive cone sits inside the spectrahedral
    auxetic cone near p.

    (i) every barycentric grid combination (step 1/samples) of the four
    extremal rays maps to a PSD matrix; (ii) the four nodes lie on the PSD
    boundary; (iii) random tangent directions whose matrices fail PSD also
    fall outside the ray tetrahedron, confirmed by an explicit negative
    quadratic-form witness.
    """
    rays = expansive_rays(p)
    nodes = cayley_nodes(p)
    grad = quartic_gradient(p)

    ray_vecs = [np.array(r.v) for r in rays]
    min_eig = np.inf
    count = 0
    for weights in _barycentric_grid(samples, 4):
        combo = sum(w / samples * rv for w, rv in zip(weights, ray_vecs))
        m = matrix_from_coords(combo)
        wmin = jacobi_eigh(m.matrix)[0][0]
        min_eig = min(min_eig, wmin)
        if psd_status(m, tol) is PsdStatus.NOT_PSD:
            raise InclusionViolation(
                f"tetrahedron point escapes the PSD cone (min eig {wmin:.3e})",
                witness=tuple(combo),
            )
        count += 1

    max_node_abs = 0.0
    for node in nodes:
        m = matrix_from_coords(node.v)
        w = jacobi_eigh(m.matrix)[0]
        max_node_abs = max(max_node_abs, abs(w[0]))
        if abs(w[0]) > tol:
            raise InclusionViolation(
                f"node is not on the PSD boundary (min eig {w[0]:.3e})", witness=node.v
            )

    # orthonormal basis of the gradient-orthogonal tangent hyperplane
    basis = []
    for k in range(5):
        e = np.zeros(5)
        e[k] = 1.0
        e -= (e @ grad) / (grad @ grad) * grad
        for b in basis:
            e -= (e @ b) * b
        norm = np.linalg.norm(e)
        if norm > 1e-9:
            basis.append(e / norm)
    basis = basis[:4]
    ray_matrix = np.column_stack(ray_vecs)

    rng = np.random.default_rng(seed)
    found_outside = 0
    attempts = 0
    while found_outside < outside_samples:
        attempts += 1
        if attempts > 100 * outside_samples:
            raise InclusionViolation("could not sample enough outside directions")
        coeffs = rng.normal(size=len(basis))
        v = sum(c * b for c, b in zip(coeffs, basis))
        m = matrix_from_coords(v)
        w, vecs = jacobi_eigh(m.matrix)
        if w[0] >= -tol:
            continue
        # independent confirmation: explicit negative quadratic form value
        x = vecs[:, 0]
        if x @ m.matrix @ x >= 0:
            raise InclusionViolation("eigenvalue witness failed to confirm non-PSD", witness=v)
        # Theorem-level consistency: a non-PSD direction must leave the
        # ray tetrahedron (contrapositive of the inclusion)
        weights, residual, *_ = np.linalg.lstsq(ray_matrix, v, rcond=None)
        inside = residual.size == 0 or residual[0] < 1e-18
        if inside and np.all(weights > tol):
            raise InclusionViolation(
                "non-PSD direction expressed as a positive ray combination", witness=v
            )
        found_outside += 1

    return InclusionReport(
        grid_points=count,
        boundary_nodes=len(nodes),
        outside_samples=found_outside,
        min_grid_eigenvalue=float(min_eig),
        max_node_eigenvalue_abs=float(max_node_abs),
    )
