"""Tangent spaces, auxetic path checks, cone feasibility, and trajectory
integration for periodic frameworks.

A deformation path is auxetic exactly when the lattice-comparison operator
between any two times is a contraction; equivalently, when every tangent of
the Gram-matrix curve is positive semidefinite. Both characterizations are
implemented and cross-tested.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidInput,
    NoAuxeticDirection,
    SingularPointWarning,
    StepFailure,
    Undecided,
)
from .framework import (
    PeriodicFramework,
    QuotientGraph,
    EdgeOrbit,
    constraint_jacobian_matrix,
    cristobalite_gram_dot,
    pairwise_distances_at,
    quartz_gram_dot,
    validate,
)
from .framework.catalog import cristobalite_geometry, quartz_geometry
from .symcone import LinearMap, PsdStatus, SymMatrix, jacobi_eigh, psd_status

PATH_CONSTRAINT_RTOL = 1e-8
DEFAULT_PATH_SAMPLES = 200
NEWTON_MAX_ITER = 25
NEWTON_TOL = 1e-10


# ---------------------------------------------------------------------------
# tangents and the Gram differential
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TangentVector:
    """First-order motion: one velocity per vertex orbit plus a lattice
    velocity, lying in the kernel of the constraint Jacobian."""

    vertex_vel: np.ndarray
    lattice_vel: LinearMap

    def __post_init__(self):
        vel = np.array(self.vertex_vel, dtype=float)
        vel.flags.writeable = False
        object.__setattr__(self, "vertex_vel", vel)

    def flatten(self) -> np.ndarray:
        return np.concatenate(
            [np.asarray(self.vertex_vel).ravel(), self.lattice_vel.matrix.ravel(order="F")]
        )

    @staticmethod
    def unflatten(x, n, d) -> "TangentVector":
        x = np.asarray(x, dtype=float)
        return TangentVector(
            x[: n * d].reshape(n, d), LinearMap.from_matrix(x[n * d :].reshape(d, d, order="F"))
        )


def constraint_jacobian(f: PeriodicFramework) -> np.ndarray:
    """Jacobian of the squared edge-length constraints, shape (m, dn + d^2)."""
    bad = validate(f)
    if bad:
        raise InvalidInput("invalid framework: " + "; ".join(str(v) for v in bad))
    return constraint_jacobian_matrix(f)


def trivial_motion_matrix(positions, lattice) -> np.ndarray:
    """Basis of infinitesimal isometries: d translations plus d(d-1)/2
    rotations acting jointly on positions and lattice. Columns are not
    normalized."""
    positions = np.asarray(positions, dtype=float)
    lattice = np.asarray(lattice, dtype=float)
    n, d = positions.shape
    cols = []
    for a in range(d):
        vel = np.zeros((n, d))
        vel[:, a] = 1.0
        cols.append(np.concatenate([vel.ravel(), np.zeros(d * d)]))
    for a in range(d):
        for b in range(a + 1, d):
            w = np.zeros((d, d))
            w[a, b] = 1.0
            w[b, a] = -1.0
            vel = positions @ w.T
            lat = w @ lattice
            cols.append(np.concatenate([vel.ravel(), lat.ravel(order="F")]))
    return np.column_stack(cols)


def _kernel_basis(jac, ncols, rtol=1e-9, warn_band=(1e-11, 1e-7)):
    if jac.shape[0] == 0:
        return np.eye(ncols)
    u, s, vt = np.linalg.svd(jac)
    smax = s[0] if s.size else 0.0
    if smax > 0 and np.any((s > warn_band[0] * smax) & (s < warn_band[1] * smax)):
        warnings.warn(
            "constraint rank is numerically ambiguous at this configuration",
            SingularPointWarning,
            stacklevel=3,
        )
    rank = int(np.sum(s > rtol * max(1.0, smax)))
    return vt[rank:].T


def tangent_space(f: PeriodicFramework):
    """Orthonormal basis of the tangent space at f with trivial motions
    removed; the length equals dof(f)."""
    jac = constraint_jacobian(f)
    n, d = f.n, f.dim
    kernel = _kernel_basis(jac, d * n + d * d)
    triv = trivial_motion_matrix(f.positions, f.lattice.matrix)
    q_triv, _ = np.linalg.qr(triv)
    reduced = kernel - q_triv @ (q_triv.T @ kernel)
    if reduced.size == 0:
        return []
    u, s, _ = np.linalg.svd(reduced, full_matrices=False)
    keep = u[:, s > 1e-9]
    return [TangentVector.unflatten(keep[:, j], n, d) for j in range(keep.shape[1])]


def gram_differential(f: PeriodicFramework, t: TangentVector) -> SymMatrix:
    """Velocity of the lattice Gram matrix along t: Ldot^T L + L^T Ldot."""
    lam = f.lattice.matrix
    ldot = t.lattice_vel.matrix
    return SymMatrix.from_matrix(ldot.T @ lam + lam.T @ ldot)


# ---------------------------------------------------------------------------
# deformation paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PathSample:
    tau: float
    positions: np.ndarray
    lattice: np.ndarray


class DeformationPath:
    """One-parameter family of placements of a fixed quotient graph.

    Either a list of explicit samples or a closed-form generator with a
    declared parameter range. Closed-form paths may carry analytic Gram
    and Gram-velocity functions.
    """

    def __init__(
        self,
        framework0: PeriodicFramework,
        samples=None,
        generator=None,
        tau_range=None,
        gram_fn=None,
        gram_dot_fn=None,
        default_samples=DEFAULT_PATH_SAMPLES,
    ):
        if (samples is None) == (generator is None):
            raise InvalidInput("provide either samples or a generator, not both")
        self.framework0 = framework0
        self.generator = generator
        self.gram_fn = gram_fn
        self.gram_dot_fn = gram_dot_fn
        self.default_samples = default_samples
        if samples is not None:
            samples = [
                PathSample(float(t), np.array(p, dtype=float), np.array(l, dtype=float))
                for (t, p, l) in samples
            ]
            self._samples = samples
            self._check_samples(samples)
            self.tau_range = (samples[0].tau, samples[-1].tau)
        else:
            if tau_range is None or tau_range[1] <= tau_range[0]:
                raise InvalidInput("generator path needs an increasing tau range")
            self._samples = None
            self.tau_range = (float(tau_range[0]), float(tau_range[1]))

    @staticmethod
    def from_samples(framework0, samples) -> "DeformationPath":
        return DeformationPath(framework0, samples=samples)

    @staticmethod
    def from_generator(
        framework0, generator, tau_range, gram_fn=None, gram_dot_fn=None
    ) -> "DeformationPath":
        return DeformationPath(
            framework0,
            generator=generator,
            tau_range=tau_range,
            gram_fn=gram_fn,
            gram_dot_fn=gram_dot_fn,
        )

    def _check_samples(self, samples):
        if len(samples) < 2:
            raise InvalidInput("a path needs at least two samples")
        taus = [s.tau for s in samples]
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise InvalidInput("path parameter must be strictly increasing")
        graph = self.framework0.graph
        for s in samples:
            fw = self.framework0.with_geometry(s.positions, s.lattice)
            for e in graph.edges:
                actual = np.linalg.norm(fw.edge_vector(e))
                if abs(actual - e.length) > PATH_CONSTRAINT_RTOL * max(1.0, e.length):
                    raise InvalidInput(
                        f"edge constraint violated at tau={s.tau:.6g}: "
                        f"{actual:.12g} vs {e.length:.12g}"
                    )

    def sampled(self, count=None):
        if self._samples is not None:
            return self._samples
        count = count or self.default_samples
        taus = np.linspace(self.tau_range[0], self.tau_range[1], count)
        samples = []
        for t in taus:
            p, l = self.generator(float(t))
            samples.append(PathSample(float(t), np.array(p, float), np.array(l, float)))
        self._check_samples(samples)
        return samples

    def gram_at(self, sample: PathSample) -> np.ndarray:
        if self.gram_fn is not None:
            return self.gram_fn(sample.tau)
        return sample.lattice.T @ sample.lattice

    def reversed(self) -> "DeformationPath":
        """Same geometry traversed with the parameter negated."""
        if self._samples is not None:
            rev = [(-s.tau, s.positions, s.lattice) for s in reversed(self._samples)]
            return DeformationPath.from_samples(self.framework0, rev)
        a, b = self.tau_range
        gen = self.generator
        gram_fn = None if self.gram_fn is None else (lambda t: self.gram_fn(-t))
        gram_dot = None if self.gram_dot_fn is None else (lambda t: -self.gram_dot_fn(-t))
        return DeformationPath(
            self.framework0,
            generator=lambda t: gen(-t),
            tau_range=(-b, -a),
            gram_fn=gram_fn,
            gram_dot_fn=gram_dot,
            default_samples=self.default_samples,
        )


def lattice_only_path(lattice_fn, tau_range, dim) -> DeformationPath:
    """Path of a bare single-vertex framework; only the lattice moves.

    Useful for exercising the path checks on arbitrary smooth lattice
    curves, since with no edges every placement is admissible.
    """
    graph = QuotientGraph(dim, 1, ())
    f0 = PeriodicFramework(
        graph, np.zeros((1, dim)), LinearMap.from_matrix(lattice_fn(tau_range[0]))
    )
    origin = np.zeros((1, dim))
    return DeformationPath.from_generator(
        f0, lambda t: (origin, lattice_fn(t)), tau_range
    )


def catalog_path(tag, theta_from, theta_to, samples=DEFAULT_PATH_SAMPLES) -> DeformationPath:
    """Closed-form tilt path for the silica catalog entries, parametrized
    by tau in [0, 1] with theta interpolated linearly. Carries the analytic
    Gram velocity."""
    tag_map = {
        "QuartzBeta": (quartz_geometry, quartz_gram_dot),
        "quartz-beta": (quartz_geometry, quartz_gram_dot),
        "CristobaliteBeta": (cristobalite_geometry, cristobalite_gram_dot),
        "cristobalite-beta": (cristobalite_geometry, cristobalite_gram_dot),
    }
    if tag not in tag_map:
        raise InvalidInput(f"no closed-form path for catalog tag {tag!r}")
    geometry_fn, gram_dot = tag_map[tag]
    span = theta_to - theta_from
    from .framework import catalog

    f0 = catalog(tag, theta=theta_from)
    reps_count = f0.n

    def gen(tau):
        corners, lattice = geometry_fn(theta_from + span * tau)
        # orbit representatives are the first corners of the first units,
        # in the same order the builder uses
        if reps_count == 6:
            reps = [corners[i] for i in (0, 1, 2, 3, 4, 5)]
        else:
            reps = [corners[i] for i in (0, 1, 2, 3, 4, 5, 8, 9)]
        return np.array(reps), lattice

    def gdot(tau):
        return gram_dot(theta_from + span * tau) * span

    return DeformationPath(
        f0, generator=gen, tau_range=(0.0, 1.0), gram_dot_fn=gdot, default_samples=samples
    )


# ---------------------------------------------------------------------------
# path verdicts
# ---------------------------------------------------------------------------


class PathVerdict(enum.Enum):
    AUXETIC = "Auxetic"
    BOUNDARY_AUXETIC = "BoundaryAuxetic"
    NOT_AUXETIC = "NotAuxetic"
    EXPANSIVE = "Expansive"
    NOT_EXPANSIVE = "NotExpansive"
    NON_DECREASING = "NonDecreasing"
    VIOLATION = "Violation"


@dataclass(frozen=True)
class PathCheckResult:
    verdict: PathVerdict
    tau: float | None = None
    tau2: float | None = None
    pair: tuple | None = None
    extreme: float | None = None

    @property
    def auxetic_compatible(self) -> bool:
        return self.verdict in (PathVerdict.AUXETIC, PathVerdict.BOUNDARY_AUXETIC)

    def __str__(self):
        parts = [self.verdict.value]
        if self.tau is not None:
            parts.append(f"tau={self.tau:.9g}")
        if self.tau2 is not None:
            parts.append(f"tau2={self.tau2:.9g}")
        if self.pair is not None:
            parts.append(f"pair={self.pair}")
        return " ".join(parts)


def _gram_tangents(path: DeformationPath, samples):
    taus = np.array([s.tau for s in samples])
    if path.gram_dot_fn is not None:
        return [path.gram_dot_fn(t) for t in taus]
    if path.generator is not None:
        # 4th-order central differences with a step well below the sample spacing
        h = (taus[-1] - taus[0]) / (len(taus) - 1) / 10.0

        def gram_of(t):
            _, lat = path.generator(t)
            return lat.T @ lat

        out = []
        for t in taus:
            out.append(
                (-gram_of(t + 2 * h) + 8 * gram_of(t + h) - 8 * gram_of(t - h) + gram_of(t - 2 * h))
                / (12.0 * h)
            )
        return out
    grams = [s.lattice.T @ s.lattice for s in samples]
    out = []
    for k in range(len(samples)):
        if k == 0:
            out.append((grams[1] - grams[0]) / (taus[1] - taus[0]))
        elif k == len(samples) - 1:
            out.append((grams[-1] - grams[-2]) / (taus[-1] - taus[-2]))
        else:
            out.append((grams[k + 1] - grams[k - 1]) / (taus[k + 1] - taus[k - 1]))
    return out


def _psd_verdict(taus, tangents, tol) -> PathCheckResult:
    boundary = False
    worst = np.inf
    for tau, dot in zip(taus, tangents):
        status = psd_status(SymMatrix.from_matrix(0.5 * (dot + dot.T)), tol)
        wmin = jacobi_eigh(dot)[0][0]
        worst = min(worst, wmin)
        if status is PsdStatus.NOT_PSD:
            return PathCheckResult(PathVerdict.NOT_AUXETIC, tau=tau, extreme=wmin)
        if status is PsdStatus.BOUNDARY:
            boundary = True
    verdict = PathVerdict.BOUNDARY_AUXETIC if boundary else PathVerdict.AUXETIC
    return PathCheckResult(verdict, extreme=worst)


def check_path_psd(path: DeformationPath, tol: float = 1e-9, samples=None) -> PathCheckResult:
    """Tangent test: the path is auxetic iff every Gram velocity is PSD.

    Returns BOUNDARY_AUXETIC when all velocities are PSD but some touch the
    cone boundary within tol.
    """
    pts = path.sampled(samples)
    tangents = _gram_tangents(path, pts)
    return _psd_verdict([s.tau for s in pts], tangents, tol)


def check_gram_curve_psd(taus, grams, tol: float = 1e-9) -> PathCheckResult:
    """PSD-tangent test on a bare Gram-matrix curve (central differences)."""
    taus = list(taus)
    if len(taus) < 2:
        raise InvalidInput("a Gram curve needs at least two samples")
    tangents = []
    for k in range(len(taus)):
        if k == 0:
            tangents.append((grams[1] - grams[0]) / (taus[1] - taus[0]))
        elif k == len(taus) - 1:
            tangents.append((grams[-1] - grams[-2]) / (taus[-1] - taus[-2]))
        else:
            tangents.append((grams[k + 1] - grams[k - 1]) / (taus[k + 1] - taus[k - 1]))
    return _psd_verdict(taus, tangents, tol)


def check_gram_curve_contraction(taus, grams, tol: float = 1e-9) -> PathCheckResult:
    """Contraction test on a bare Gram curve: the comparison operator's norm
    equals the largest generalized eigenvalue of the Gram pair, which is
    rotation-invariant."""
    from .symcone import psd_sqrt

    roots = [psd_sqrt(SymMatrix.from_matrix(g)).matrix for g in grams]
    invs = [np.linalg.inv(r) for r in roots]
    for j in range(1, len(taus)):
        for i in range(j):
            pencil = invs[j] @ grams[i] @ invs[j]
            wmax = jacobi_eigh(0.5 * (pencil + pencil.T))[0][-1]
            if np.sqrt(max(wmax, 0.0)) > 1.0 + tol:
                return PathCheckResult(
                    PathVerdict.NOT_AUXETIC, tau=taus[i], tau2=taus[j], extreme=float(np.sqrt(wmax))
                )
    return PathCheckResult(PathVerdict.AUXETIC)


def check_gram_curve_volume(taus, grams) -> PathCheckResult:
    """Cell-volume test on a bare Gram curve: det(omega) = det(Lambda)^2."""
    vols = [np.sqrt(max(0.0, float(np.linalg.det(g)))) for g in grams]
    for k in range(1, len(vols)):
        if vols[k] < vols[k - 1] * (1.0 - 1e-10):
            return PathCheckResult(PathVerdict.VIOLATION, tau=taus[k])
    return PathCheckResult(PathVerdict.NON_DECREASING)


def check_path_contraction(path: DeformationPath, tol: float = 1e-9, samples=None) -> PathCheckResult:
    """Definition test: for every pair tau1 < tau2 the operator taking the
    later lattice onto the earlier one must be a contraction."""
    pts = path.sampled(samples)
    lats = np.array([s.lattice for s in pts])
    dets = np.linalg.det(lats)
    if np.any(np.abs(dets) < 1e-12):
        raise InvalidInput("singular lattice along the path")
    invs = np.linalg.inv(lats)
    k = len(pts)
    idx_i, idx_j = np.triu_indices(k, 1)
    ops = np.einsum("pij,pjk->pik", lats[idx_i], invs[idx_j])
    norms = np.linalg.svd(ops, compute_uv=False)[:, 0]
    bad = np.nonzero(norms > 1.0 + tol)[0]
    if bad.size:
        b = bad[0]
        return PathCheckResult(
            PathVerdict.NOT_AUXETIC,
            tau=pts[idx_i[b]].tau,
            tau2=pts[idx_j[b]].tau,
            extreme=float(norms[b]),
        )
    return PathCheckResult(PathVerdict.AUXETIC, extreme=float(norms.max(initial=1.0)))


def check_expansive(path: DeformationPath, radius: int, tol: float = 1e-9, samples=None) -> PathCheckResult:
    """All inter-vertex distances within the translate ball must be
    non-decreasing along the path."""
    if radius < 1:
        raise InvalidInput("radius must be at least 1")
    pts = path.sampled(samples)
    prev = None
    for sample in pts:
        dists = pairwise_distances_at(sample.positions, sample.lattice, radius)
        if prev is not None:
            for (pair, d_now), (_, d_before) in zip(dists, prev):
                if d_now < d_before - tol:
                    return PathCheckResult(PathVerdict.NOT_EXPANSIVE, tau=sample.tau, pair=pair)
        prev = dists
    return PathCheckResult(PathVerdict.EXPANSIVE)


def check_volume(path: DeformationPath, samples=None) -> PathCheckResult:
    """Unit-cell volume |det Lambda| must be non-decreasing."""
    pts = path.sampled(samples)
    vols = [abs(float(np.linalg.det(s.lattice))) for s in pts]
    for k in range(1, len(vols)):
        if vols[k] < vols[k - 1] * (1.0 - 1e-10):
            return PathCheckResult(PathVerdict.VIOLATION, tau=pts[k].tau)
    return PathCheckResult(PathVerdict.NON_DECREASING)


# ---------------------------------------------------------------------------
# infinitesimal auxetic cone
# ---------------------------------------------------------------------------


class ConeVerdict(enum.Enum):
    TRIVIAL_ONLY = "TrivialOnly"
    NONTRIVIAL_BOUNDARY = "NontrivialBoundary"
    STRICT_INTERIOR = "StrictInterior"


@dataclass
class ConeReport:
    verdict: ConeVerdict
    witness: TangentVector | None = None
    witness_gram_velocity: SymMatrix | None = None
    extremal_rays: list | None = None
    objective: float | None = None
    dual_certificate: SymMatrix | None = None
    method: str = ""


def _svec(a):
    """Isometric vectorization of a symmetric matrix (off-diagonals scaled
    by sqrt(2))."""
    d = a.shape[0]
    out = []
    for i in range(d):
        for j in range(i, d):
            out.append(a[i, j] if i == j else np.sqrt(2.0) * a[i, j])
    return np.array(out)


def _unsvec(v, d):
    a = np.zeros((d, d))
    k = 0
    for i in range(d):
        for j in range(i, d):
            if i == j:
                a[i, i] = v[k]
            else:
                a[i, j] = a[j, i] = v[k] / np.sqrt(2.0)
            k += 1
    return a


def _min_eig_ascent(mats, budget, seed, starts, warm=None, stop_at=None):
    """Maximize min-eig of sum(y_j * mats[j]) over the unit sphere by
    projected gradient ascent with multiple starts. Returns (best value,
    best y).

    When stop_at is given the search returns as soon as any point exceeds
    it: a single strictly feasible point already certifies the verdict.
    Uses the LAPACK eigensolver internally for speed; every witness is
    re-verified downstream through the library's own kernel.
    """
    r = len(mats)
    stack = np.array(mats)
    rng = np.random.default_rng(seed)
    seeds = []
    for j in range(r):
        e = np.zeros(r)
        e[j] = 1.0
        seeds.append(e)
        seeds.append(-e)
    if warm is not None and np.linalg.norm(warm) > 0:
        seeds.insert(0, warm / np.linalg.norm(warm))
    while len(seeds) < starts:
        y = rng.normal(size=r)
        seeds.append(y / np.linalg.norm(y))
    best_val, best_y = -np.inf, None
    iters_left = max(budget, len(seeds))
    per_start = max(8, budget // max(1, len(seeds)))

    def value_grad(y):
        m = np.einsum("j,jkl->kl", y, stack)
        w, vecs = np.linalg.eigh(m)
        v = vecs[:, 0]
        grad = stack @ v @ v
        return w[0], grad

    for y in seeds:
        if iters_left <= 0:
            break
        val, grad = value_grad(y)
        step = 0.5
        for _ in range(per_start):
            if iters_left <= 0:
                break
            if stop_at is not None and val > stop_at:
                break
            iters_left -= 1
            g_r = grad - (grad @ y) * y
            if np.linalg.norm(g_r) < 1e-13:
                break
            cand = y + step * g_r
            cand /= np.linalg.norm(cand)
            cand_val, cand_grad = value_grad(cand)
            if cand_val > val + 1e-15:
                y, val, grad = cand, cand_val, cand_grad
                step = min(step * 1.3, 1.0)
            else:
                step *= 0.4
                if step < 1e-9:
                    break
        if val > best_val:
            best_val, best_y = val, y
        if stop_at is not None and best_val > stop_at:
            break
    return best_val, best_y


def auxetic_cone(
    f: PeriodicFramework,
    tol: float = 1e-9,
    budget: int = 4000,
    seed: int = 0,
    warm_start: TangentVector | None = None,
    early_stop: float | None = None,
) -> ConeReport:
    """Feasibility of the infinitesimal auxetic cone at f.

    StrictInterior when some tangent has a positive-definite Gram velocity,
    NontrivialBoundary when the best achievable minimum eigenvalue over the
    image subspace is zero within tol, TrivialOnly when only the zero Gram
    velocity is PSD. Verdicts are certified: StrictInterior by the witness,
    TrivialOnly by a positive-definite matrix orthogonal to the image
    subspace; an uncertified search raises Undecided.
    """
    basis = tangent_space(f)
    d = f.dim
    if not basis:
        return ConeReport(ConeVerdict.TRIVIAL_ONLY, method="rigid")
    mats = [gram_differential(f, t).matrix for t in basis]
    image = np.column_stack([_svec(m) for m in mats])
    u, s, _ = np.linalg.svd(image, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > 1e-10 * max(1.0, smax)))
    if rank == 0:
        return ConeReport(ConeVerdict.TRIVIAL_ONLY, method="zero-image")
    e_basis = [_unsvec(u[:, j], d) for j in range(rank)]

    def tangent_for(y):
        target = sum(yj * _svec(ej) for yj, ej in zip(y, e_basis))
        coeffs, *_ = np.linalg.lstsq(image, target, rcond=None)
        flat = sum(c * t.flatten() for c, t in zip(coeffs, basis))
        flat /= np.linalg.norm(flat)
        return TangentVector.unflatten(flat, f.n, d)

    def report(verdict, y=None, objective=None, dual=None, method=""):
        witness = None
        wgv = None
        if y is not None:
            witness = tangent_for(y)
            wgv = gram_differential(f, witness)
        return ConeReport(
            verdict,
            witness=witness,
            witness_gram_velocity=wgv,
            objective=objective,
            dual_certificate=dual,
            method=method,
        )

    if rank == 1:
        m0 = e_basis[0]
        w = jacobi_eigh(m0)[0]
        best = max(w[0], -w[-1])
        y = np.array([1.0]) if w[0] >= -w[-1] else np.array([-1.0])
        if best > tol:
            return report(ConeVerdict.STRICT_INTERIOR, y, best, method="exact-1d")
        if best >= -tol:
            return report(ConeVerdict.NONTRIVIAL_BOUNDARY, y, best, method="exact-1d")
        return report(ConeVerdict.TRIVIAL_ONLY, objective=best, method="exact-1d")

    if rank == 2 and d == 2:
        # determinant form restricted to the image plane is a binary
        # quadratic; its sign pattern decides the cone position exactly
        a_mat, b_mat = e_basis
        qa = np.linalg.det(a_mat)
        qc = np.linalg.det(b_mat)
        qb = np.linalg.det(a_mat + b_mat) - qa - qc
        qform = np.array([[qa, qb / 2.0], [qb / 2.0, qc]])
        w, vecs = jacobi_eigh(qform)
        lam_max = w[-1]
        y = vecs[:, -1]
        m_star = y[0] * a_mat + y[1] * b_mat
        if np.trace(m_star) < 0:
            y = -y
        if lam_max > tol:
            return report(ConeVerdict.STRICT_INTERIOR, y, lam_max, method="exact-conic")
        if lam_max >= -tol:
            return report(ConeVerdict.NONTRIVIAL_BOUNDARY, y, lam_max, method="exact-conic")
        return report(ConeVerdict.TRIVIAL_ONLY, objective=lam_max, method="exact-conic")

    starts = 8 * len(basis)
    warm_y = None
    if warm_start is not None:
        wm = gram_differential(f, warm_start).matrix
        warm_y = np.array([_svec(e) @ _svec(wm) for e in e_basis])
    lam_star, y_star = _min_eig_ascent(
        e_basis, budget, seed, starts, warm=warm_y, stop_at=early_stop
    )
    if lam_star > tol:
        return report(ConeVerdict.STRICT_INTERIOR, y_star, lam_star, method="ascent")
    dim_sym = d * (d + 1) // 2
    mu_star = -np.inf
    dual_y = None
    if rank < dim_sym:
        perp = [_unsvec(u[:, j], d) for j in range(rank, dim_sym)]
        mu_star, dual_y = _min_eig_ascent(perp, budget, seed + 1, starts, stop_at=10.0 * tol)
        if mu_star > tol:
            dual = SymMatrix.from_matrix(sum(yj * pj for yj, pj in zip(dual_y, perp)))
            return report(
                ConeVerdict.TRIVIAL_ONLY, objective=lam_star, dual=dual, method="ascent-dual"
            )
    if lam_star >= -tol:
        return report(ConeVerdict.NONTRIVIAL_BOUNDARY, y_star, lam_star, method="ascent")
    raise Undecided(
        f"cone search uncertified: primal {lam_star:.3e}, dual {mu_star:.3e}",
        best_candidate=report(ConeVerdict.TRIVIAL_ONLY, objective=lam_star, method="ascent"),
    )


# ---------------------------------------------------------------------------
# trajectory integration
# ---------------------------------------------------------------------------


def _flatten_state(positions, lattice):
    return np.concatenate([np.asarray(positions).ravel(), np.asarray(lattice).ravel(order="F")])


def _unflatten_state(x, n, d):
    return x[: n * d].reshape(n, d), x[n * d :].reshape(d, d, order="F")


def newton_project(f: PeriodicFramework, positions, lattice, tau=0.0):
    """Damped Gauss-Newton restoration of the edge-length constraints."""
    n, d = f.n, f.dim
    x = _flatten_state(positions, lattice)
    targets = np.array([e.length ** 2 for e in f.graph.edges])
    scale = max(1.0, targets.max(initial=1.0))

    def residual(xv):
        p, l = _unflatten_state(xv, n, d)
        fw = f.with_geometry(p, l)
        return np.array([fw.edge_vector(e) @ fw.edge_vector(e) for e in f.graph.edges]) - targets

    res = residual(x)
    for _ in range(NEWTON_MAX_ITER):
        if np.abs(res).max(initial=0.0) <= NEWTON_TOL * scale:
            p, l = _unflatten_state(x, n, d)
            return p, l
        p, l = _unflatten_state(x, n, d)
        jac = constraint_jacobian_matrix(f.with_geometry(p, l))
        step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        damp = 1.0
        for _ in range(10):
            trial = x + damp * step
            trial_res = residual(trial)
            if np.linalg.norm(trial_res) < np.linalg.norm(res):
                x, res = trial, trial_res
                break
            damp *= 0.5
        else:
            raise StepFailure(tau, "projection step made no progress")
    if np.abs(res).max(initial=0.0) <= NEWTON_TOL * scale:
        p, l = _unflatten_state(x, n, d)
        return p, l
    raise StepFailure(tau, f"projection did not converge (residual {np.abs(res).max():.3e})")


def pair_distance_rate(fw: PeriodicFramework, t: TangentVector, pair):
    """d/dt of the squared distance of a vertex-pair class along t."""
    u, v, g = pair
    g = np.array(g, dtype=float)
    w = fw.positions[v] + fw.lattice.matrix @ g - fw.positions[u]
    wdot = t.vertex_vel[v] + t.lattice_vel.matrix @ g - t.vertex_vel[u]
    return float(2.0 * w @ wdot)


def orienting_pair(fw: PeriodicFramework, radius: int = 1, min_rate: float = 1e-6):
    """First vertex-pair class whose distance actually moves along the
    one-dof flex; used to orient mechanism trajectories."""
    from .framework import pair_classes

    basis = tangent_space(fw)
    if len(basis) != 1:
        raise InvalidInput(f"framework has {len(basis)} nontrivial flexes, expected 1")
    best_pair, best_rate = None, 0.0
    for pair in pair_classes(fw.n, fw.dim, radius):
        rate = abs(pair_distance_rate(fw, basis[0], pair))
        if rate > best_rate:
            best_pair, best_rate = pair, rate
    if best_pair is None or best_rate < min_rate:
        raise InvalidInput("no moving vertex pair found to orient the flex")
    return best_pair


class AuxeticWitness:
    """Follow the witness of the infinitesimal auxetic cone.

    The first evaluation runs the full multi-start search; later ones warm
    start from the previous witness and accept as soon as the interior
    margin stays comparable, which keeps the field smooth and cheap."""

    def __init__(self, tol=1e-9, budget=4000, seed=0):
        self.tol = tol
        self.budget = budget
        self.seed = seed
        self._last_witness = None
        self._last_margin = None

    def direction(self, fw: PeriodicFramework, prev_dir):
        early = None
        if self._last_margin is not None and self._last_margin > 0:
            early = max(10.0 * self.tol, 0.5 * self._last_margin)
        rep = auxetic_cone(
            fw,
            tol=self.tol,
            budget=self.budget,
            seed=self.seed,
            warm_start=self._last_witness,
            early_stop=early,
        )
        if rep.verdict is ConeVerdict.TRIVIAL_ONLY or rep.witness is None:
            raise NoAuxeticDirection("no nontrivial auxetic tangent at this configuration")
        self._last_witness = rep.witness
        self._last_margin = rep.objective
        flat = rep.witness.flatten()
        return flat / np.linalg.norm(flat)


class KernelOneDof:
    """Follow the unique flex of a one-degree-of-freedom mechanism,
    oriented so the marked vertex pair expands."""

    def __init__(self, pair):
        self.pair = pair

    def direction(self, fw: PeriodicFramework, prev_dir):
        basis = tangent_space(fw)
        if len(basis) != 1:
            raise InvalidInput(f"framework has {len(basis)} nontrivial flexes, expected 1")
        t = basis[0]
        rate = pair_distance_rate(fw, t, self.pair)
        flat = t.flatten()
        if abs(rate) < 1e-12:
            if prev_dir is None:
                raise InvalidInput("orientation pair is stationary at the start configuration")
            return flat if flat @ prev_dir >= 0 else -flat
        return flat if rate > 0 else -flat


class ConvexCombination:
    """Weighted combination of one-dof flexes induced by refinement graphs
    of the current framework (each restricted flex is also a flex of the
    base framework)."""

    def __init__(self, weights, refinement_edges, orient_pair):
        if len(weights) != len(refinement_edges):
            raise InvalidInput("one weight per refinement is required")
        if any(w < 0 for w in weights) or sum(weights) <= 0:
            raise InvalidInput("weights must be nonnegative and not all zero")
        self.weights = [w / sum(weights) for w in weights]
        self.refinement_edges = [tuple(edges) for edges in refinement_edges]
        self.orient_pair = orient_pair

    def direction(self, fw: PeriodicFramework, prev_dir):
        combined = np.zeros(fw.n * fw.dim + fw.dim * fw.dim)
        selector = KernelOneDof(self.orient_pair)
        for w, edges in zip(self.weights, self.refinement_edges):
            if w == 0:
                continue
            lam = fw.lattice.matrix
            orbits = [
                EdgeOrbit(
                    u,
                    v,
                    g,
                    float(
                        np.linalg.norm(
                            fw.positions[v] + lam @ np.array(g, float) - fw.positions[u]
                        )
                    ),
                )
                for (u, v, g) in edges
            ]
            refined = PeriodicFramework(
                QuotientGraph(fw.dim, fw.n, tuple(orbits)), fw.positions, fw.lattice
            )
            combined += w * selector.direction(refined, prev_dir)
        norm = np.linalg.norm(combined)
        if norm < 1e-13:
            raise InvalidInput("convex combination of flexes vanished")
        return combined / norm


def integrate_trajectory(
    f: PeriodicFramework, selector, steps: int, h: float
) -> DeformationPath:
    """Integrate the selector's direction field with RK4 steps, projecting
    back onto the constraint manifold after each step."""
    if steps < 1 or h <= 0:
        raise InvalidInput("need steps >= 1 and h > 0")
    bad = validate(f)
    if bad:
        raise InvalidInput("invalid framework: " + "; ".join(str(v) for v in bad))
    n, d = f.n, f.dim
    x = _flatten_state(f.positions, f.lattice.matrix)
    samples = [(0.0, *_unflatten_state(x.copy(), n, d))]
    prev_dir = None

    def field(xv, prev, tau):
        # RK4 stage points drift off the manifold quadratically; project
        # back before evaluating the direction field there
        p, l = _unflatten_state(xv, n, d)
        p, l = newton_project(f, p, l, tau=tau)
        return selector.direction(f.with_geometry(p, l), prev)

    for k in range(steps):
        tau = (k + 1) * h
        try:
            k1 = field(x, prev_dir, tau)
            k2 = field(x + 0.5 * h * k1, k1, tau)
            k3 = field(x + 0.5 * h * k2, k2, tau)
            k4 = field(x + h * k3, k3, tau)
        except NoAuxeticDirection:
            if k == 0:
                raise
            # the trajectory reached the boundary of the region where the
            # direction field exists; return the maximal path
            warnings.warn(
                f"direction field vanished near tau={tau:.6g}; trajectory truncated "
                f"after {k} steps",
                stacklevel=2,
            )
            break
        x_trial = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        p, l = _unflatten_state(x_trial, n, d)
        p, l = newton_project(f, p, l, tau=tau)
        x = _flatten_state(p, l)
        prev_dir = k1
        samples.append((tau, p, l))
    return DeformationPath.from_samples(f, samples)
