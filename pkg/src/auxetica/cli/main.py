"""Command-line front end.

Exit codes: 0 success, 1 negative analysis verdict under --strict,
2 usage/data errors, 3 undecided cone search.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .. import deformation as dfm
from .. import planar, study3d
from ..errors import AuxeticaError, Undecided
from ..framework import CATALOG_TAGS, catalog, dof, gram, validate
from . import fileio, render

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2
EXIT_UNDECIDED = 3


def _resolve_seed(args, required=False):
    seed = getattr(args, "seed", None)
    if seed is None:
        env = os.environ.get("AUXETICA_SEED")
        if env is not None:
            seed = int(env)
    if seed is None:
        if required:
            raise AuxeticaError("this command needs --seed (or AUXETICA_SEED)")
        seed = 0
    return int(seed)


def _parse_params(items):
    params = {}
    for item in items or []:
        if "=" not in item:
            raise AuxeticaError(f"--param expects k=v, got {item!r}")
        key, value = item.split("=", 1)
        params[key.strip()] = float(value)
    return params


def _parse_vector(text, count=None):
    vals = [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    if count is not None and len(vals) != count:
        raise AuxeticaError(f"expected {count} numbers, got {len(vals)}")
    return vals


def _parse_matrix(text):
    rows = [
        [float(x) for x in row.split(",") if x.strip()]
        for row in text.split(";")
        if row.strip()
    ]
    return np.array(rows, dtype=float)


def _parse_pair(text, dim):
    vals = [int(x) for x in text.split(",")]
    if len(vals) != 2 + dim:
        raise AuxeticaError(f"--pair expects u,v,{dim} marking entries")
    return (vals[0], vals[1], tuple(vals[2:]))


def _load_path_arg(files, strict=False):
    """Path input: one path JSON, one trace CSV, or several framework files
    taken as successive samples."""
    if len(files) == 1:
        name = files[0]
        if name.endswith(".csv"):
            return ("trace", fileio.read_gram_trace(name))
        return ("path", fileio.load_path(name, strict=strict))
    frameworks = [fileio.load_framework(name, strict=strict)[0] for name in files]
    f0 = frameworks[0]
    samples = [
        (float(k), fw.positions, fw.lattice.matrix) for k, fw in enumerate(frameworks)
    ]
    return ("path", dfm.DeformationPath.from_samples(f0, samples))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_info(args):
    fw, metadata = fileio.load_framework(args.file, strict=args.strict_parse)
    bad = validate(fw)
    print(f"dim: {fw.dim}")
    print(f"vertex orbits: {fw.n}")
    print(f"edge orbits: {fw.m}")
    print(f"dof: {dof(fw)}")
    print(f"gram: {np.array2string(gram(fw).matrix, precision=9)}")
    print(f"validation: {'ok' if not bad else '; '.join(str(v) for v in bad)}")
    if metadata:
        print(f"metadata: {metadata}")
    return EXIT_NEGATIVE if bad and args.strict else EXIT_OK


def cmd_catalog(args):
    params = _parse_params(args.param)
    if args.path_from is not None or args.path_to is not None:
        if args.path_from is None or args.path_to is None:
            raise AuxeticaError("need both --path-from and --path-to")
        path = dfm.catalog_path(args.id, args.path_from, args.path_to, samples=args.path_samples)
        out = args.out or f"{args.id}-path.json"
        fileio.save_path(path, out, metadata={"catalog": args.id})
        print(f"wrote path with {args.path_samples} samples to {out}")
        return EXIT_OK
    fw = catalog(args.id, **params)
    out = args.out or f"{args.id}.json"
    fileio.save_framework(fw, out, metadata={"catalog": args.id})
    print(f"wrote framework (n={fw.n}, m={fw.m}) to {out}")
    return EXIT_OK


def cmd_auxetic_cone(args):
    fw, _ = fileio.load_framework(args.file, strict=args.strict_parse)
    report = dfm.auxetic_cone(fw, tol=args.tol, budget=args.budget, seed=_resolve_seed(args))
    print(f"verdict: {report.verdict.value}")
    print(f"method: {report.method}")
    if report.objective is not None:
        print(f"objective: {report.objective:.12g}")
    if report.witness is not None:
        print(f"witness vertex velocities: {np.array2string(report.witness.vertex_vel, precision=9)}")
        print(
            "witness lattice velocity: "
            f"{np.array2string(report.witness.lattice_vel.matrix, precision=9)}"
        )
        print(
            "witness gram velocity: "
            f"{np.array2string(report.witness_gram_velocity.matrix, precision=9)}"
        )
    if report.dual_certificate is not None:
        print(
            "dual certificate: "
            f"{np.array2string(report.dual_certificate.matrix, precision=9)}"
        )
    negative = report.verdict is dfm.ConeVerdict.TRIVIAL_ONLY
    return EXIT_NEGATIVE if negative and args.strict else EXIT_OK


def cmd_check_path(args):
    kind, payload = _load_path_arg(args.files, strict=args.strict_parse)
    if kind == "trace":
        taus, grams = payload
        if args.mode == "psd":
            result = dfm.check_gram_curve_psd(taus, grams, tol=args.tol)
        elif args.mode == "contraction":
            result = dfm.check_gram_curve_contraction(taus, grams, tol=args.tol)
        elif args.mode == "volume":
            result = dfm.check_gram_curve_volume(taus, grams)
        else:
            raise AuxeticaError("expansive mode needs vertex positions, not a Gram trace")
    else:
        path = payload
        if args.mode == "psd":
            result = dfm.check_path_psd(path, tol=args.tol, samples=args.samples)
        elif args.mode == "contraction":
            result = dfm.check_path_contraction(path, tol=args.tol, samples=args.samples)
        elif args.mode == "expansive":
            result = dfm.check_expansive(path, radius=args.radius, tol=args.tol, samples=args.samples)
        else:
            result = dfm.check_volume(path, samples=args.samples)
    print(result)
    negative = result.verdict in (
        dfm.PathVerdict.NOT_AUXETIC,
        dfm.PathVerdict.NOT_EXPANSIVE,
        dfm.PathVerdict.VIOLATION,
    )
    return EXIT_NEGATIVE if negative and args.strict else EXIT_OK


def cmd_integrate(args):
    fw, _ = fileio.load_framework(args.file, strict=args.strict_parse)
    if args.selector == "auxetic-witness":
        selector = dfm.AuxeticWitness(tol=args.tol, budget=args.budget, seed=_resolve_seed(args))
    elif args.selector == "convex-combination":
        if not args.ray_file:
            raise AuxeticaError("convex-combination needs --ray-file (repeatable)")
        refinements = []
        for name in args.ray_file:
            ray_fw, _ = fileio.load_framework(name, strict=args.strict_parse)
            refinements.append([(e.u, e.v, e.gamma) for e in ray_fw.graph.edges])
        weights = (
            _parse_vector(args.weights, len(refinements))
            if args.weights
            else [1.0] * len(refinements)
        )
        first, _ = fileio.load_framework(args.ray_file[0], strict=args.strict_parse)
        pair = (
            _parse_pair(args.pair, fw.dim)
            if args.pair
            else dfm.orienting_pair(first.with_geometry(fw.positions, fw.lattice.matrix))
        )
        selector = dfm.ConvexCombination(weights, refinements, pair)
    else:
        pair = _parse_pair(args.pair, fw.dim) if args.pair else dfm.orienting_pair(fw)
        selector = dfm.KernelOneDof(pair)
    path = dfm.integrate_trajectory(fw, selector, steps=args.steps, h=args.h)
    out = args.out or "trajectory.json"
    fileio.save_path(path, out)
    print(f"wrote trajectory with {len(path.sampled())} samples to {out}")
    return EXIT_OK


def cmd_gen_ppt(args):
    seed = _resolve_seed(args, required=True)
    lattice = _parse_matrix(args.lattice).T if args.lattice else np.eye(2)
    rng = np.random.default_rng(seed)
    if args.points:
        points = np.array([_parse_vector(row, 2) for row in args.points.split(";") if row.strip()])
    else:
        points = rng.uniform(0.0, 1.0, size=(args.n, 2)) @ lattice.T
    fw = planar.generate_ppt(lattice, points, seed=seed, candidate_radius=args.radius)
    out = args.out or f"ppt-n{points.shape[0]}-seed{seed}.json"
    fileio.save_framework(fw, out, metadata={"generator_seed": seed})
    print(f"wrote pseudo-triangulation (n={fw.n}, m={fw.m}) to {out}")
    return EXIT_OK


def cmd_refinements(args):
    fw, _ = fileio.load_framework(args.file, strict=args.strict_parse)
    results = planar.enumerate_refinements(fw, candidate_radius=args.radius)
    print(f"refinements: {len(results)} (complete up to radius {args.radius})")
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        for k, refined in enumerate(results):
            fileio.save_framework(refined, os.path.join(args.out_dir, f"refinement-{k}.json"))
    for k, refined in enumerate(results):
        extra = sorted(
            e.key for e in refined.graph.edges
            if e.key not in {b.key for b in fw.graph.edges}
        )
        print(f"  [{k}] added edges: {extra}")
    return EXIT_OK


def cmd_study3d(args):
    a = tuple(_parse_vector(args.at, 5)) if args.at else study3d.INITIAL_POINT
    p = study3d.StudyPoint(a, r2=args.r2)
    grad = study3d.quartic_gradient(p)
    print(f"a: ({', '.join(format(x, '.12g') for x in p.a)})")
    print(f"r2: {format(p.r2, '.12g')}")
    print(f"f(a): {format(study3d.quartic_f(p), '.12g')}")
    print(f"gradient: ({', '.join(format(x, '.12g') for x in grad)})")
    direction = study3d.ProjectivePoint5.from_vector(grad)
    print(f"gradient direction: ({', '.join(format(x, '.12g') for x in direction.v)})")
    print("cayley nodes:")
    for node in study3d.cayley_nodes(p):
        print(f"  ({', '.join(format(x, '.12g') for x in node.v)})")
    print("expansive rays:")
    for ray in study3d.expansive_rays(p):
        print(f"  ({', '.join(format(x, '.12g') for x in ray.v)})")
    rep = study3d.cone_inclusion_check(
        p, samples=args.samples, outside_samples=args.outside, seed=_resolve_seed(args)
    )
    print(
        "inclusion check: pass "
        f"(grid={rep.grid_points}, nodes on boundary={rep.boundary_nodes}, "
        f"outside samples={rep.outside_samples})"
    )
    return EXIT_OK


def cmd_render(args):
    fw, _ = fileio.load_framework(args.file, strict=args.strict_parse)
    if args.svg:
        doc = render.render_svg(fw, copies=args.copies)
        with open(args.svg, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(doc)
        print(f"wrote SVG to {args.svg}")
    if args.obj:
        doc = render.render_obj(fw, copies=args.copies)
        with open(args.obj, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(doc)
        print(f"wrote OBJ line set to {args.obj}")
    if not args.svg and not args.obj:
        raise AuxeticaError("render needs --svg or --obj")
    return EXIT_OK


def cmd_gram_trace(args):
    kind, payload = _load_path_arg([args.path_file], strict=args.strict_parse)
    if kind != "path":
        raise AuxeticaError("gram-trace expects a path file")
    path = payload
    fileio.write_gram_trace(path, args.csv, samples=args.samples)
    print(f"wrote Gram trace to {args.csv}")
    if args.fig:
        pts = path.sampled(args.samples)
        grams = [path.gram_at(s) for s in pts]
        rates = dfm._gram_tangents(path, pts)
        render.gram_trace_figure([s.tau for s in pts], grams, rates, args.fig)
        print(f"wrote figure to {args.fig}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="auxetica",
        description="Auxetic and expansive deformation analysis of periodic frameworks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, strict_flag=True):
        p.add_argument("--strict-parse", action="store_true", help="reject unknown file fields")
        if strict_flag:
            p.add_argument(
                "--strict", action="store_true", help="exit 1 on negative analysis verdicts"
            )

    p = sub.add_parser("info", help="framework summary: n, m, dof, validation")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_info)

    from ..framework.catalog import _KEBAB as kebab_names

    p = sub.add_parser("catalog", help="emit a catalog framework or closed-form path")
    p.add_argument("id", choices=sorted(CATALOG_TAGS) + sorted(kebab_names))
    p.add_argument("--param", action="append", metavar="K=V")
    p.add_argument("--out")
    p.add_argument("--path-from", type=float, help="start tilt angle for a closed-form path")
    p.add_argument("--path-to", type=float, help="end tilt angle")
    p.add_argument("--path-samples", type=int, default=200)
    common(p, strict_flag=False)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("auxetic-cone", help="infinitesimal auxetic cone feasibility")
    p.add_argument("file")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--budget", type=int, default=4000)
    p.add_argument("--seed", type=int)
    common(p)
    p.set_defaults(func=cmd_auxetic_cone)

    p = sub.add_parser("check-path", help="auxetic/expansive/volume verdicts for a path")
    p.add_argument("files", nargs="+", help="path JSON, trace CSV, or framework snapshots")
    p.add_argument("--mode", choices=["psd", "contraction", "expansive", "volume"], default="psd")
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--samples", type=int)
    common(p)
    p.set_defaults(func=cmd_check_path)

    p = sub.add_parser("integrate", help="integrate a deformation trajectory")
    p.add_argument("file")
    p.add_argument(
        "--selector",
        choices=["auxetic-witness", "kernel-onedof", "convex-combination"],
        default="auxetic-witness",
    )
    p.add_argument("--pair", help="orientation pair u,v,g1,...,gd for flex selectors")
    p.add_argument(
        "--ray-file",
        action="append",
        help="refinement framework supplying one extremal flex (repeatable)",
    )
    p.add_argument("--weights", help="comma-separated weights, one per --ray-file")
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--h", type=float, default=1e-2)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--budget", type=int, default=4000)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("gen-ppt", help="generate a random periodic pseudo-triangulation")
    p.add_argument("--lattice", help="generators as 'ax,ay;bx,by'")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--points", help="explicit points 'x,y;x,y;...'")
    p.add_argument("--seed", type=int)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--out")
    common(p, strict_flag=False)
    p.set_defaults(func=cmd_gen_ppt)

    p = sub.add_parser("refinements", help="enumerate pseudo-triangulation completions")
    p.add_argument("file")
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--out-dir")
    common(p, strict_flag=False)
    p.set_defaults(func=cmd_refinements)

    p = sub.add_parser("study3d", help="closed-form case study: quartic, nodes, rays, inclusion")
    p.add_argument("--at", help="five Gram coordinates a11,a22,a33,a13,a23")
    p.add_argument("--r2", type=float, default=study3d.DEFAULT_R2)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--outside", type=int, default=1000)
    p.add_argument("--seed", type=int)
    common(p, strict_flag=False)
    p.set_defaults(func=cmd_study3d)

    p = sub.add_parser("render", help="SVG (d=2) or OBJ line set (d=3)")
    p.add_argument("file")
    p.add_argument("--svg")
    p.add_argument("--obj")
    p.add_argument("--copies", type=int, default=2)
    common(p, strict_flag=False)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("gram-trace", help="CSV (and optional figure) of the Gram curve")
    p.add_argument("path_file")
    p.add_argument("--csv", required=True)
    p.add_argument("--fig", help="also render a matplotlib figure to this file")
    p.add_argument("--samples", type=int)
    common(p, strict_flag=False)
    p.set_defaults(func=cmd_gram_trace)

    return parser


def run_command(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except Undecided as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except AuxeticaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
