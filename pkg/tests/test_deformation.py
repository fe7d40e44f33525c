import numpy as np
import pytest

from auxetica import deformation as dfm
from auxetica.errors import InvalidInput, NoAuxeticDirection
from auxetica.framework import (
    EdgeOrbit,
    PeriodicFramework,
    QuotientGraph,
    catalog,
    dof,
    gram,
    quartz_gram_dot,
    sublattice_relax,
)
from auxetica.framework.catalog import quartz_geometry
from auxetica.symcone import LinearMap, PsdStatus, psd_status

THETA_ALPHA = np.pi / 3
THETA_BETA = 0.05


def rigid_triangle_lattice():
    """Triangulated hexagonal-lattice framework with no nontrivial flex."""
    lat = np.column_stack([[1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]])
    graph = QuotientGraph(
        2,
        1,
        (
            EdgeOrbit(0, 0, (1, 0), 1.0),
            EdgeOrbit(0, 0, (0, 1), 1.0),
            EdgeOrbit(0, 0, (1, -1), 1.0),
        ),
    )
    return PeriodicFramework(graph, np.zeros((1, 2)), LinearMap.from_matrix(lat))


class TestConstraintJacobian:
    def test_single_edge_row(self):
        graph = QuotientGraph(2, 2, (EdgeOrbit(0, 1, (0, 0), 1.0),))
        f = PeriodicFramework(
            graph, np.array([[0.0, 0.0], [1.0, 0.0]]), LinearMap.identity(2)
        )
        jac = dfm.constraint_jacobian(f)
        expected = np.array([[-2.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0]])
        assert np.abs(jac - expected).max() < 1e-12

    @pytest.mark.parametrize("tag", ["ReentrantHoneycomb", "Pyramid3D", "QuartzBeta"])
    def test_matches_finite_differences(self, tag):
        f = catalog(tag)
        jac = dfm.constraint_jacobian(f)
        n, d = f.n, f.dim
        x0 = np.concatenate([f.positions.ravel(), f.lattice.matrix.ravel(order="F")])

        def constraints(x):
            p = x[: n * d].reshape(n, d)
            lam = x[n * d :].reshape(d, d, order="F")
            fw = f.with_geometry(p, lam)
            return np.array([fw.edge_vector(e) @ fw.edge_vector(e) for e in f.graph.edges])

        h = 1e-6
        for col in range(x0.size):
            e = np.zeros_like(x0)
            e[col] = h
            fd = (constraints(x0 + e) - constraints(x0 - e)) / (2 * h)
            assert np.abs(fd - jac[:, col]).max() < 1e-6

    def test_translations_in_kernel(self):
        for tag in ["ReentrantHoneycomb", "Pyramid3D"]:
            f = catalog(tag)
            jac = dfm.constraint_jacobian(f)
            triv = dfm.trivial_motion_matrix(f.positions, f.lattice.matrix)
            assert np.abs(jac @ triv).max() < 1e-9

    def test_pyramid_rank(self):
        from auxetica.framework import numeric_rank

        f = catalog("Pyramid3D")
        assert numeric_rank(dfm.constraint_jacobian(f)) == 5


class TestTangentSpace:
    def test_counts(self):
        assert len(dfm.tangent_space(catalog("ReentrantHoneycomb"))) == 2
        assert len(dfm.tangent_space(catalog("Pyramid3D"))) == 4
        assert len(dfm.tangent_space(rigid_triangle_lattice())) == 0

    def test_orthonormal_and_in_kernel(self):
        f = catalog("Pyramid3D")
        basis = dfm.tangent_space(f)
        jac = dfm.constraint_jacobian(f)
        flat = np.column_stack([t.flatten() for t in basis])
        assert np.abs(flat.T @ flat - np.eye(len(basis))).max() < 1e-9
        assert np.abs(jac @ flat).max() < 1e-8
        triv = dfm.trivial_motion_matrix(f.positions, f.lattice.matrix)
        assert np.abs(triv.T @ flat).max() < 1e-9


class TestGramDifferential:
    def test_zero_lattice_velocity(self):
        f = catalog("ReentrantHoneycomb")
        t = dfm.TangentVector(np.ones((2, 2)), LinearMap.from_matrix(np.zeros((2, 2))))
        assert np.abs(dfm.gram_differential(f, t).matrix).max() == 0.0

    def test_identity_pair(self):
        graph = QuotientGraph(2, 1, (EdgeOrbit(0, 0, (1, 0), 1.0),))
        f = PeriodicFramework(graph, np.zeros((1, 2)), LinearMap.identity(2))
        t = dfm.TangentVector(np.zeros((1, 2)), LinearMap.identity(2))
        assert np.abs(dfm.gram_differential(f, t).matrix - 2.0 * np.eye(2)).max() < 1e-12

    def test_quartz_tangent_matches_closed_form(self):
        # velocity of the tilt family at theta = pi/4 with theta decreasing
        theta = np.pi / 4
        h = 1e-6
        f = catalog("QuartzBeta", theta=theta)

        def geometry(th):
            corners, lattice = quartz_geometry(th)
            return np.array(corners[:6]), lattice

        p_plus, l_plus = geometry(theta - h)   # theta decreasing
        p_minus, l_minus = geometry(theta + h)
        t = dfm.TangentVector(
            (p_plus - p_minus) / (2 * h), LinearMap.from_matrix((l_plus - l_minus) / (2 * h))
        )
        jac = dfm.constraint_jacobian(f)
        assert np.abs(jac @ t.flatten()).max() < 1e-5
        dw = dfm.gram_differential(f, t).matrix
        assert np.abs(dw - (-quartz_gram_dot(theta))).max() < 1e-8

    def test_matches_finite_difference_of_gram(self):
        f = catalog("Pyramid3D")
        for t in dfm.tangent_space(f):
            h = 1e-6
            lam = f.lattice.matrix
            lam_plus = lam + h * t.lattice_vel.matrix
            lam_minus = lam - h * t.lattice_vel.matrix
            fd = (lam_plus.T @ lam_plus - lam_minus.T @ lam_minus) / (2 * h)
            assert np.abs(fd - dfm.gram_differential(f, t).matrix).max() < 1e-5


class TestSilicaPaths:
    def test_quartz_auxetic_both_characterizations(self):
        path = dfm.catalog_path("QuartzBeta", THETA_ALPHA, THETA_BETA)
        assert dfm.check_path_psd(path).verdict is dfm.PathVerdict.AUXETIC
        assert dfm.check_path_contraction(path).verdict is dfm.PathVerdict.AUXETIC
        assert dfm.check_volume(path).verdict is dfm.PathVerdict.NON_DECREASING

    def test_quartz_reversed_not_auxetic(self):
        path = dfm.catalog_path("QuartzBeta", THETA_BETA, THETA_ALPHA)
        assert dfm.check_path_psd(path).verdict is dfm.PathVerdict.NOT_AUXETIC
        assert dfm.check_path_contraction(path).verdict is dfm.PathVerdict.NOT_AUXETIC

    def test_cristobalite_auxetic_both_characterizations(self):
        path = dfm.catalog_path("CristobaliteBeta", THETA_ALPHA, THETA_BETA)
        assert dfm.check_path_psd(path).verdict is dfm.PathVerdict.AUXETIC
        assert dfm.check_path_contraction(path).verdict is dfm.PathVerdict.AUXETIC

    def test_reversal_helper_flips_verdict(self):
        path = dfm.catalog_path("QuartzBeta", THETA_ALPHA, THETA_BETA, samples=40)
        rev = path.reversed()
        assert dfm.check_path_psd(rev).verdict is dfm.PathVerdict.NOT_AUXETIC
        assert dfm.check_path_contraction(rev).verdict is dfm.PathVerdict.NOT_AUXETIC
        sampled_rev = dfm.DeformationPath.from_samples(
            path.framework0,
            [(-s.tau, s.positions, s.lattice) for s in reversed(path.sampled(40))],
        ).reversed()
        assert dfm.check_path_psd(sampled_rev).verdict is dfm.PathVerdict.AUXETIC

    def test_tilt_rate_negative_definite(self):
        from auxetica.framework import cristobalite_gram_dot
        from auxetica.symcone import SymMatrix

        for theta in np.linspace(0.05, np.pi / 2 - 0.05, 100):
            for rate in (quartz_gram_dot(theta), cristobalite_gram_dot(theta)):
                status = psd_status(SymMatrix.from_matrix(-rate), 1e-9)
                assert status is PsdStatus.POSITIVE_DEFINITE


class TestSyntheticPaths:
    def test_constant_path_boundary(self):
        f = catalog("ReentrantHoneycomb")
        samples = [(float(k), f.positions, f.lattice.matrix) for k in range(5)]
        path = dfm.DeformationPath.from_samples(f, samples)
        assert dfm.check_path_psd(path).verdict is dfm.PathVerdict.BOUNDARY_AUXETIC
        assert dfm.check_expansive(path, radius=1).verdict is dfm.PathVerdict.EXPANSIVE

    def test_axis_tradeoff_not_auxetic(self):
        path = dfm.lattice_only_path(
            lambda t: np.diag([1.0 + t, 1.0 - t]), (0.0, 0.5), 2
        )
        res = dfm.check_path_contraction(path, samples=40)
        assert res.verdict is dfm.PathVerdict.NOT_AUXETIC
        assert dfm.check_path_psd(path, samples=40).verdict is dfm.PathVerdict.NOT_AUXETIC

    def test_rotation_path_is_isometric(self):
        def lat(t):
            c, s = np.cos(t), np.sin(t)
            return np.array([[c, -s], [s, c]]) @ np.diag([1.0, 2.0])

        path = dfm.lattice_only_path(lat, (0.0, 1.0), 2)
        assert dfm.check_path_contraction(path, samples=30).verdict is dfm.PathVerdict.AUXETIC
        assert dfm.check_path_psd(path, samples=30).verdict is dfm.PathVerdict.BOUNDARY_AUXETIC

    def test_uniform_shrink_violates_volume(self):
        path = dfm.lattice_only_path(lambda t: (1.0 - t) * np.eye(2), (0.0, 0.5), 2)
        assert dfm.check_volume(path).verdict is dfm.PathVerdict.VIOLATION

    def test_shear_preserves_volume_but_not_auxetic(self):
        path = dfm.lattice_only_path(
            lambda t: np.array([[1.0, t], [0.0, 1.0]]), (0.0, 1.0), 2
        )
        assert dfm.check_volume(path, samples=50).verdict is dfm.PathVerdict.NON_DECREASING
        assert dfm.check_path_psd(path, samples=50).verdict is dfm.PathVerdict.NOT_AUXETIC

    def test_path_needs_two_samples(self):
        f = catalog("ReentrantHoneycomb")
        with pytest.raises(InvalidInput):
            dfm.DeformationPath.from_samples(f, [(0.0, f.positions, f.lattice.matrix)])

    def test_edge_violation_rejected(self):
        f = catalog("ReentrantHoneycomb")
        with pytest.raises(InvalidInput):
            dfm.DeformationPath.from_samples(
                f,
                [
                    (0.0, f.positions, f.lattice.matrix),
                    (1.0, f.positions * 1.5, f.lattice.matrix),
                ],
            )


def random_smooth_lattice_paths(seed, count, dim):
    """Mix of generic exponential lattice curves and constructed-auxetic
    curves (rotations composed with square roots of increasing Grams)."""
    rng = np.random.default_rng(seed)
    paths = []
    for k in range(count):
        if k % 2 == 0:
            m = rng.normal(size=(dim, dim)) * 0.6
            lam0 = np.eye(dim) + 0.2 * rng.normal(size=(dim, dim))

            def lat(t, m=m, lam0=lam0):
                # series expansion of expm(t m) @ lam0, enough terms for smoothness
                acc = np.eye(dim)
                term = np.eye(dim)
                for j in range(1, 12):
                    term = term @ (t * m) / j
                    acc = acc + term
                return acc @ lam0

        else:
            b1 = rng.normal(size=(dim, dim))
            b2 = rng.normal(size=(dim, dim))
            w0 = np.eye(dim) * rng.uniform(1.0, 2.0)
            p1 = b1 @ b1.T + 0.1 * np.eye(dim)
            p2 = b2 @ b2.T

            def lat(t, w0=w0, p1=p1, p2=p2, dim=dim):
                from auxetica.symcone import SymMatrix, psd_sqrt

                w = w0 + t * p1 + 0.5 * t * t * p2
                root = psd_sqrt(SymMatrix.from_matrix(w)).matrix
                angle = 0.3 * t
                if dim == 2:
                    c, s = np.cos(angle), np.sin(angle)
                    rot = np.array([[c, -s], [s, c]])
                else:
                    c, s = np.cos(angle), np.sin(angle)
                    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
                return rot @ root

        paths.append(dfm.lattice_only_path(lat, (0.0, 1.0), dim))
    return paths


class TestTheoremOneEquivalence:
    @pytest.mark.parametrize("dim,seed", [(2, 10), (3, 11)])
    def test_random_paths_agree(self, dim, seed):
        for path in random_smooth_lattice_paths(seed, 10, dim):
            psd = dfm.check_path_psd(path, samples=40)
            con = dfm.check_path_contraction(path, samples=40)
            assert psd.auxetic_compatible == (con.verdict is dfm.PathVerdict.AUXETIC), (
                psd,
                con,
            )

    def test_catalog_paths_agree(self):
        for tag in ["QuartzBeta", "CristobaliteBeta"]:
            for bounds in [(THETA_ALPHA, THETA_BETA), (THETA_BETA, THETA_ALPHA)]:
                path = dfm.catalog_path(tag, *bounds, samples=60)
                psd = dfm.check_path_psd(path)
                con = dfm.check_path_contraction(path)
                assert psd.auxetic_compatible == (con.verdict is dfm.PathVerdict.AUXETIC)


class TestSublatticeStability:
    def test_quartz_path_remains_auxetic_after_relaxation(self):
        basis = np.diag([1, 1, 2])
        path = dfm.catalog_path("QuartzBeta", THETA_ALPHA, THETA_BETA, samples=40)
        f0 = path.framework0
        relaxed0 = sublattice_relax(f0, basis)
        relaxed_samples = []
        for s in path.sampled(40):
            fw = f0.with_geometry(s.positions, s.lattice)
            relaxed = sublattice_relax(fw, basis)
            relaxed_samples.append((s.tau, relaxed.positions, relaxed.lattice.matrix))
        relaxed_path = dfm.DeformationPath.from_samples(relaxed0, relaxed_samples)
        assert dfm.check_path_psd(relaxed_path).verdict is dfm.PathVerdict.AUXETIC
        assert dfm.check_path_contraction(relaxed_path).verdict is dfm.PathVerdict.AUXETIC


class TestAuxeticCone:
    def test_pyramid_strict_interior_with_verified_witness(self):
        f = catalog("Pyramid3D")
        rep = dfm.auxetic_cone(f)
        assert rep.verdict is dfm.ConeVerdict.STRICT_INTERIOR
        assert psd_status(rep.witness_gram_velocity) is PsdStatus.POSITIVE_DEFINITE
        # witness lies in the tangent space
        jac = dfm.constraint_jacobian(f)
        assert np.abs(jac @ rep.witness.flatten()).max() < 1e-7

    def test_acute_honeycomb_trivial(self):
        rep = dfm.auxetic_cone(catalog("HoneycombEqualEdge"))
        assert rep.verdict is dfm.ConeVerdict.TRIVIAL_ONLY
        assert rep.witness is None

    def test_obtuse_honeycomb_nontrivial(self):
        rep = dfm.auxetic_cone(catalog("HoneycombEqualEdge", angle_deg=150.0))
        assert rep.verdict in (
            dfm.ConeVerdict.STRICT_INTERIOR,
            dfm.ConeVerdict.NONTRIVIAL_BOUNDARY,
        )
        assert psd_status(rep.witness_gram_velocity) is not PsdStatus.NOT_PSD

    def test_rigid_framework_trivial(self):
        rep = dfm.auxetic_cone(rigid_triangle_lattice())
        assert rep.verdict is dfm.ConeVerdict.TRIVIAL_ONLY

    def test_symmetric_designs_certified_trivial(self):
        # the fully symmetric placements pin the circumradius, which kills
        # every nonzero PSD Gram velocity; the dual certificate proves it
        for tag in ["Tetra3D", "Prism3D", "Cube3D"]:
            f = catalog(tag)
            rep = dfm.auxetic_cone(f)
            assert rep.verdict is dfm.ConeVerdict.TRIVIAL_ONLY
            dual = rep.dual_certificate
            assert psd_status(dual) is PsdStatus.POSITIVE_DEFINITE
            for t in dfm.tangent_space(f):
                inner = np.sum(dual.matrix * dfm.gram_differential(f, t).matrix)
                assert abs(inner) < 1e-9

    def test_doubled_designs_nontrivial(self):
        for tag in ["DoubledPyramid3D", "DoubledTetra3D"]:
            rep = dfm.auxetic_cone(catalog(tag))
            assert rep.verdict is dfm.ConeVerdict.STRICT_INTERIOR

    def test_witness_reverification_across_catalog(self):
        for tag in ["Pyramid3D", "ReentrantHoneycomb", "DoubledTetra3D", "MissingRibEquivalent"]:
            rep = dfm.auxetic_cone(catalog(tag))
            if rep.witness is not None:
                assert psd_status(rep.witness_gram_velocity) is not PsdStatus.NOT_PSD


class TestIntegration:
    def test_pyramid_auxetic_trajectory(self):
        from auxetica import study3d as s3

        f = catalog("Pyramid3D")
        path = dfm.integrate_trajectory(f, dfm.AuxeticWitness(seed=0), steps=50, h=1e-2)
        assert dfm.check_path_psd(path).verdict in (
            dfm.PathVerdict.AUXETIC,
            dfm.PathVerdict.BOUNDARY_AUXETIC,
        )
        assert dfm.check_volume(path).verdict is dfm.PathVerdict.NON_DECREASING
        # the trajectory never leaves the deformation hypersurface
        for s in path.sampled():
            g = s.lattice.T @ s.lattice
            a = (g[0, 0], g[1, 1], g[2, 2], g[0, 2], g[1, 2])
            assert abs(s3.quartic_f(s3.StudyPoint(a))) < 1e-7
            assert abs(g[0, 1]) < 1e-9

    def test_rigid_framework_has_no_direction(self):
        with pytest.raises(NoAuxeticDirection):
            dfm.integrate_trajectory(
                rigid_triangle_lattice(), dfm.AuxeticWitness(seed=0), steps=2, h=1e-2
            )

    def test_constraints_maintained(self):
        f = catalog("Pyramid3D")
        path = dfm.integrate_trajectory(f, dfm.AuxeticWitness(seed=0), steps=20, h=2e-2)
        for s in path.sampled():
            fw = f.with_geometry(s.positions, s.lattice)
            for e in f.graph.edges:
                assert abs(np.linalg.norm(fw.edge_vector(e)) - e.length) < 1e-8

    def test_gram_differential_consistent_along_trajectory(self):
        f = catalog("Pyramid3D")
        path = dfm.integrate_trajectory(f, dfm.AuxeticWitness(seed=0), steps=10, h=1e-2)
        pts = path.sampled()
        mid = len(pts) // 2
        fw = f.with_geometry(pts[mid].positions, pts[mid].lattice)
        basis = dfm.tangent_space(fw)
        flat = np.column_stack([t.flatten() for t in basis])
        vel = (
            np.concatenate(
                [
                    (pts[mid + 1].positions - pts[mid - 1].positions).ravel(),
                    (pts[mid + 1].lattice - pts[mid - 1].lattice).ravel(order="F"),
                ]
            )
            / (pts[mid + 1].tau - pts[mid - 1].tau)
        )
        coeffs = flat.T @ vel
        t = dfm.TangentVector.unflatten(flat @ coeffs, f.n, f.dim)
        fd = (
            pts[mid + 1].lattice.T @ pts[mid + 1].lattice
            - pts[mid - 1].lattice.T @ pts[mid - 1].lattice
        ) / (pts[mid + 1].tau - pts[mid - 1].tau)
        assert np.abs(dfm.gram_differential(fw, t).matrix - fd).max() < 1e-4


class TestConvexCombination:
    def test_mixture_of_refinement_flexes_is_expansive(self):
        from auxetica import planar

        from auxetica.framework import pair_classes

        fw = catalog("ReentrantHoneycomb")
        refined_frameworks = planar.enumerate_refinements(fw, 2)
        refinements = [
            [(e.u, e.v, e.gamma) for e in refined.graph.edges]
            for refined in refined_frameworks
        ]
        assert len(refinements) == 2
        # orientation pair must move under both extremal flexes
        flexes = [dfm.tangent_space(r)[0] for r in refined_frameworks]
        pair = max(
            pair_classes(fw.n, fw.dim, 1),
            key=lambda p: min(abs(dfm.pair_distance_rate(fw, t, p)) for t in flexes),
        )
        selector = dfm.ConvexCombination([0.6, 0.4], refinements, pair)
        path = dfm.integrate_trajectory(fw, selector, steps=15, h=4e-3)
        assert dfm.check_expansive(path, radius=2).verdict is dfm.PathVerdict.EXPANSIVE
        assert dfm.check_path_psd(path).auxetic_compatible

    def test_weight_validation(self):
        with pytest.raises(InvalidInput):
            dfm.ConvexCombination([1.0], [[], []], (0, 1, (0, 0)))
        with pytest.raises(InvalidInput):
            dfm.ConvexCombination([-1.0, 2.0], [[], []], (0, 1, (0, 0)))


class TestSingularPointWarning:
    def test_ambiguous_rank_warns(self):
        from auxetica.deformation import _kernel_basis
        from auxetica.errors import SingularPointWarning

        jac = np.diag([1.0, 1e-9])
        with pytest.warns(SingularPointWarning):
            _kernel_basis(np.hstack([jac, np.zeros((2, 2))]), 4)

    def test_clean_rank_is_silent(self):
        import warnings

        from auxetica.deformation import _kernel_basis

        with warnings.catch_warnings():
            warnings.simplefilter("error")
            _kernel_basis(np.hstack([np.eye(2), np.zeros((2, 2))]), 4)


class TestGramCurveHelpers:
    def test_agree_with_path_checks(self):
        path = dfm.catalog_path("QuartzBeta", THETA_ALPHA, THETA_BETA, samples=40)
        pts = path.sampled(40)
        taus = [s.tau for s in pts]
        grams = [s.lattice.T @ s.lattice for s in pts]
        assert dfm.check_gram_curve_psd(taus, grams).verdict is dfm.PathVerdict.AUXETIC
        assert dfm.check_gram_curve_contraction(taus, grams).verdict is dfm.PathVerdict.AUXETIC
        assert (
            dfm.check_gram_curve_volume(taus, grams).verdict is dfm.PathVerdict.NON_DECREASING
        )

    def test_contraction_from_grams_matches_lattice_route(self):
        for path in random_smooth_lattice_paths(21, 6, 2):
            pts = path.sampled(25)
            taus = [s.tau for s in pts]
            grams = [s.lattice.T @ s.lattice for s in pts]
            a = dfm.check_path_contraction(path, samples=25).verdict
            b = dfm.check_gram_curve_contraction(taus, grams).verdict
            assert a == b
