"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line
with its runtime. Tolerances are fixed here, not configurable."""

import time

import numpy as np
import pytest

from auxetica import deformation as dfm
from auxetica import planar
from auxetica import study3d as s3
from auxetica.errors import GeneratorStalled
from auxetica.framework import (
    catalog,
    cristobalite_gram_dot,
    dof,
    gram,
    quartz_gram_dot,
)
from auxetica.symcone import PsdStatus, SymMatrix, psd_status

SQRT2 = np.sqrt(2.0)

PAPER_NODES = [
    (0.0, 2 * (SQRT2 - 1), (SQRT2 + 1) / 2, 0.0, 1.0),
    (0.0, 2 * (SQRT2 + 1), (SQRT2 - 1) / 2, 0.0, -1.0),
    (2 * (SQRT2 - 1), 0.0, (SQRT2 + 1) / 2, 1.0, 0.0),
    (2 * (SQRT2 + 1), 0.0, (SQRT2 - 1) / 2, -1.0, 0.0),
]
PAPER_RAYS = [
    (4.0, 0.0, 1.0, 0.0, 0.0),
    (4.0, 0.0, 5.0, 4.0, 0.0),
    (0.0, 4.0, 1.0, 0.0, 0.0),
    (0.0, 4.0, 5.0, 0.0, 4.0),
]

THETA_HI = np.pi / 3
THETA_LO = 0.05


class Stopwatch:
    def __init__(self, number, limit):
        self.number = number
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def finish(self, ok, detail=""):
        elapsed = time.perf_counter() - self.start
        status = "PASS" if ok else "FAIL"
        print(f"ACCEPTANCE {self.number}: {status} ({elapsed:.2f}s) {detail}")
        assert ok, f"criterion {self.number}: {detail}"
        assert elapsed < self.limit, f"criterion {self.number} exceeded {self.limit}s"

    def __exit__(self, *exc):
        return False


def test_criterion_01_case_study_exact_values():
    with Stopwatch(1, 1.0) as sw:
        p = s3.StudyPoint.initial()
        ok = abs(s3.quartic_f(p)) < 1e-12
        grad_dir = s3.ProjectivePoint5.from_vector(s3.quartic_gradient(p))
        expected_dir = s3.ProjectivePoint5.from_vector((1.0, 1.0, -4.0, 4.0, 4.0))
        ok = ok and grad_dir.distance(expected_dir) < 1e-10
        nodes = s3.cayley_nodes(p)
        paper_nodes = [s3.ProjectivePoint5.from_vector(v) for v in PAPER_NODES]
        node_err = max(min(n.distance(q) for q in paper_nodes) for n in nodes)
        cover_err = max(min(n.distance(q) for n in nodes) for q in paper_nodes)
        ok = ok and node_err < 1e-10 and cover_err < 1e-10
        rays = s3.expansive_rays(p)
        paper_rays = [s3.ProjectivePoint5.from_vector(v) for v in PAPER_RAYS]
        ray_err = max(r.distance(q) for r, q in zip(rays, paper_rays))
        ok = ok and ray_err < 1e-10
        sw.finish(ok, f"node err {node_err:.2e}, ray err {ray_err:.2e}")


def test_criterion_02_cone_inclusion():
    with Stopwatch(2, 5.0) as sw:
        rep = s3.cone_inclusion_check(
            s3.StudyPoint.initial(), samples=10, outside_samples=1000, seed=0, tol=1e-9
        )
        ok = (
            rep.grid_points == 286
            and rep.min_grid_eigenvalue > -1e-9
            and rep.max_node_eigenvalue_abs < 1e-9
            and rep.outside_samples == 1000
        )
        sw.finish(
            ok,
            f"grid min eig {rep.min_grid_eigenvalue:.2e}, "
            f"node |min eig| {rep.max_node_eigenvalue_abs:.2e}, "
            f"outside {rep.outside_samples}",
        )


def test_criterion_03_silica_auxeticity():
    with Stopwatch(3, 2.0) as sw:
        details = []
        ok = True
        for tag in ("QuartzBeta", "CristobaliteBeta"):
            forward = dfm.catalog_path(tag, THETA_HI, THETA_LO, samples=200)
            psd = dfm.check_path_psd(forward)
            con = dfm.check_path_contraction(forward)
            ok = ok and psd.verdict is dfm.PathVerdict.AUXETIC
            ok = ok and con.verdict is dfm.PathVerdict.AUXETIC
            backward = dfm.catalog_path(tag, THETA_LO, THETA_HI, samples=200)
            ok = ok and dfm.check_path_psd(backward).verdict is dfm.PathVerdict.NOT_AUXETIC
            ok = ok and dfm.check_path_contraction(backward).verdict is dfm.PathVerdict.NOT_AUXETIC
            details.append(f"{tag}: {psd.verdict.value}/{con.verdict.value}")
        worst = -np.inf
        for theta in np.linspace(0.05, np.pi / 2 - 0.05, 100):
            for rate in (quartz_gram_dot(theta), cristobalite_gram_dot(theta)):
                worst = max(worst, np.linalg.eigvalsh(rate).max())
        ok = ok and worst < -1e-9
        sw.finish(ok, "; ".join(details) + f"; max tilt-rate eig {worst:.2e}")


def _random_lattice_paths(seed, count, dim):
    rng = np.random.default_rng(seed)
    paths = []
    for k in range(count):
        if k % 2 == 0:
            m = rng.normal(size=(dim, dim)) * 0.6
            lam0 = np.eye(dim) + 0.2 * rng.normal(size=(dim, dim))

            def lat(t, m=m, lam0=lam0):
                acc = np.eye(dim)
                term = np.eye(dim)
                for j in range(1, 12):
                    term = term @ (t * m) / j
                    acc = acc + term
                return acc @ lam0

        else:
            from auxetica.symcone import psd_sqrt

            b1 = rng.normal(size=(dim, dim))
            b2 = rng.normal(size=(dim, dim))
            w0 = np.eye(dim) * rng.uniform(1.0, 2.0)
            p1 = b1 @ b1.T + 0.1 * np.eye(dim)
            p2 = b2 @ b2.T

            def lat(t, w0=w0, p1=p1, p2=p2):
                w = w0 + t * p1 + 0.5 * t * t * p2
                root = psd_sqrt(SymMatrix.from_matrix(w)).matrix
                c, s = np.cos(0.3 * t), np.sin(0.3 * t)
                rot = np.eye(dim)
                rot[0, 0] = c
                rot[0, 1] = -s
                rot[1, 0] = s
                rot[1, 1] = c
                return rot @ root

        paths.append(dfm.lattice_only_path(lat, (0.0, 1.0), dim))
    return paths


def test_criterion_04_tangent_contraction_equivalence():
    with Stopwatch(4, 30.0) as sw:
        paths = []
        for tag in ("QuartzBeta", "CristobaliteBeta"):
            paths.append(dfm.catalog_path(tag, THETA_HI, THETA_LO, samples=60))
            paths.append(dfm.catalog_path(tag, THETA_LO, THETA_HI, samples=60))
        paths.extend(_random_lattice_paths(40, 25, 2))
        paths.extend(_random_lattice_paths(41, 25, 3))
        disagreements = 0
        for path in paths:
            psd = dfm.check_path_psd(path, samples=40)
            con = dfm.check_path_contraction(path, samples=40)
            if psd.auxetic_compatible != (con.verdict is dfm.PathVerdict.AUXETIC):
                disagreements += 1
        sw.finish(disagreements == 0, f"{len(paths)} paths, {disagreements} disagreements")


def test_criterion_05_honeycomb_pointedness():
    with Stopwatch(5, 30.0) as sw:
        rng = np.random.default_rng(50)
        tested = 0
        mismatch_shape = 0
        mismatch_cone = 0
        while tested < 200:
            l1 = rng.normal(size=2)
            l2 = rng.normal(size=2)
            if abs(l1[0] * l2[1] - l1[1] * l2[0]) < 0.05:
                continue
            pt = planar.honeycomb_point_from_periods(l1, l2)
            f11, f12, f22 = planar.honeycomb_gradient(pt.a11, pt.a12, pt.a22, pt.s)
            delta = planar.honeycomb_discriminant(pt)
            scale = max(1.0, (f11 * f11 + f12 * f12 + f22 * f22) ** 2)
            if abs(delta) <= 1e-9 * scale:
                continue  # excluded tolerance band
            verdict = planar.honeycomb_auxetic_test(pt)
            shape = planar.triangle_angle_class(pt.a11, pt.a12, pt.a22)
            want_nontrivial = shape == "obtuse"
            if (verdict is planar.HoneycombVerdict.NONTRIVIAL) != want_nontrivial:
                mismatch_shape += 1
            fw = catalog(
                "HoneycombEqualEdge", l1x=l1[0], l1y=l1[1], l2x=l2[0], l2y=l2[1]
            )
            cone = dfm.auxetic_cone(fw)
            if (cone.verdict is not dfm.ConeVerdict.TRIVIAL_ONLY) != (
                verdict is planar.HoneycombVerdict.NONTRIVIAL
            ):
                mismatch_cone += 1
            tested += 1
        ok = mismatch_shape == 0 and mismatch_cone == 0
        sw.finish(
            ok,
            f"200 triangles; shape mismatches {mismatch_shape}, cone mismatches {mismatch_cone}",
        )


def test_criterion_06_ppt_generator_theorem():
    with Stopwatch(6, 60.0) as sw:
        rng = np.random.default_rng(60)
        runs = 0
        failures = []
        for n in (1, 2, 3, 4):
            for seed in range(25):
                runs += 1
                lat = np.column_stack(
                    [[1.0, 0.0], [rng.uniform(-0.4, 0.4), rng.uniform(0.7, 1.3)]]
                )
                pts = rng.uniform(0.0, 1.0, size=(n, 2)) @ lat.T
                try:
                    fw = planar.generate_ppt(lat, pts, seed=seed)
                except GeneratorStalled as exc:
                    failures.append(f"n={n} seed={seed}: {exc}")
                    continue
                if fw.m != 2 * n or not planar.is_ppt(fw) or dof(fw) != 1:
                    failures.append(f"n={n} seed={seed}: m={fw.m}")
        detail = f"{runs} runs, {len(failures)} failures"
        if failures:
            detail += f" (first: {failures[0]})"
        sw.finish(not failures, detail)


def test_criterion_07_refinement_counts():
    with Stopwatch(7, 60.0) as sw:
        two = len(planar.enumerate_refinements(catalog("ReentrantHoneycomb"), 2))
        four = len(planar.enumerate_refinements(catalog("ReentrantHoneycombRelaxed"), 2))
        sw.finish(two == 2 and four == 4, f"maximal: {two}, relaxed: {four}")


def test_criterion_08_expansive_implies_auxetic():
    with Stopwatch(8, 120.0) as sw:
        rng = np.random.default_rng(80)
        checked = 0
        problems = []
        attempts = 0
        while checked < 10 and attempts < 40:
            attempts += 1
            n = int(rng.integers(2, 5))
            seed = int(rng.integers(0, 10000))
            lat = np.column_stack(
                [[1.0, 0.0], [rng.uniform(-0.3, 0.3), rng.uniform(0.8, 1.2)]]
            )
            pts = rng.uniform(0.0, 1.0, size=(n, 2)) @ lat.T
            try:
                fw = planar.generate_ppt(lat, pts, seed=seed)
            except GeneratorStalled:
                continue
            pair = dfm.orienting_pair(fw)
            path = dfm.integrate_trajectory(fw, dfm.KernelOneDof(pair), steps=20, h=2e-3)
            # expansiveness is guaranteed only while the deformed framework
            # remains a pseudo-triangulation; truncate to that range
            samples = path.sampled()
            in_range = 0
            for s in samples:
                if not planar.is_ppt(fw.with_geometry(s.positions, s.lattice)):
                    break
                in_range += 1
            if in_range < 3:
                # generated right at the alignment end of its expansive
                # range: nothing measurable, draw another sample
                continue
            if in_range < len(samples):
                path = dfm.DeformationPath.from_samples(
                    fw, [(s.tau, s.positions, s.lattice) for s in samples[:in_range]]
                )
            expansive = dfm.check_expansive(path, radius=2)
            if expansive.verdict is not dfm.PathVerdict.EXPANSIVE:
                problems.append(f"n={n} seed={seed}: {expansive}")
                continue
            psd = dfm.check_path_psd(path)
            if not psd.auxetic_compatible:
                problems.append(f"n={n} seed={seed}: expansive but {psd}")
                continue
            if dfm.check_volume(path).verdict is not dfm.PathVerdict.NON_DECREASING:
                problems.append(f"n={n} seed={seed}: volume decreased on auxetic path")
                continue
            checked += 1
        # silica paths also satisfy the volume corollary
        for tag in ("QuartzBeta", "CristobaliteBeta"):
            path = dfm.catalog_path(tag, THETA_HI, THETA_LO, samples=80)
            if dfm.check_volume(path).verdict is not dfm.PathVerdict.NON_DECREASING:
                problems.append(f"{tag}: volume decreased")
        # determinant-preserving shear: volume passes, tangent test must not
        shear = dfm.lattice_only_path(
            lambda t: np.array([[1.0, t], [0.0, 1.0]]), (0.0, 1.0), 2
        )
        if dfm.check_volume(shear, samples=50).verdict is not dfm.PathVerdict.NON_DECREASING:
            problems.append("shear: volume verdict wrong")
        if dfm.check_path_psd(shear, samples=50).verdict is not dfm.PathVerdict.NOT_AUXETIC:
            problems.append("shear: tangent verdict wrong")
        ok = checked == 10 and not problems
        detail = f"{checked}/10 trajectories"
        if problems:
            detail += f"; problems: {problems[:3]}"
        sw.finish(ok, detail)


def test_criterion_09_dof_table():
    with Stopwatch(9, 1.0) as sw:
        table = {
            "ReentrantHoneycomb": 2,
            "ReentrantHoneycombRelaxed": 3,
            "MissingRibEquivalent": 2,
            "Pyramid3D": 4,
        }
        got = {tag: dof(catalog(tag)) for tag in table}
        sw.finish(got == table, str(got))


def test_criterion_10_non_reproducible_content_note():
    with Stopwatch(10, 1.0) as sw:
        # photographs of physical materials are not reproducible; the
        # symbolic factorization of the tangent-plane discriminant is
        # replaced by the numerical equivalence exercised in criterion 5,
        # whose machinery must exist and agree on a spot check
        pt = planar.honeycomb_point_from_periods([1.0, 0.0], [-0.8, 0.45])
        verdict = planar.honeycomb_auxetic_test(pt)
        shape = planar.triangle_angle_class(pt.a11, pt.a12, pt.a22)
        ok = (verdict is planar.HoneycombVerdict.NONTRIVIAL) == (shape == "obtuse")
        sw.finish(ok, "discriminant factorization replaced by numerical equivalence")
