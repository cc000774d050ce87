"""Command-line interface: ballhull {polar|hull|farthest|conjugate|eta|gamma|transform|certify|check|suite|render}."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import EmptyRegionError
from .functions import certify_farthest, eta, fenchel_conjugate, transform_fR
from .polarity import polar, strong_hull
from .render import render_svg
from .scenes import (
    Scene,
    load_grid_function,
    load_scene,
    region_to_json,
    save_grid_function,
)
from .sets import Ball, BallRegion, Box, PointSet, farthest_distance_finite
from .suites import SUITES, run_suite


def _vector(text: str) -> np.ndarray:
    return np.array([float(t) for t in text.split(",")], dtype=float)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).write_text(text)


def _scene_set(scene: Scene, index: int):
    if not scene.sets:
        raise SystemExit("scene contains no sets")
    if index >= len(scene.sets):
        raise SystemExit(f"scene has {len(scene.sets)} sets; index {index} is out of range")
    return scene.sets[index]


def _points_of(obj) -> PointSet:
    if isinstance(obj, PointSet):
        return obj
    if isinstance(obj, BallRegion):
        return obj.generators
    raise SystemExit("this command needs a point set (or ballregion generators)")


def _radius(args, scene: Scene) -> float:
    if args.R is not None:
        return args.R
    if scene.R is not None:
        return scene.R
    raise SystemExit("no radius: pass --R or set R in the scene")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ballhull",
                                     description="Strongly convex sets, polars, hulls, and farthest functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, scene=True):
        if scene:
            p.add_argument("--scene", required=True, help="scene JSON file")
            p.add_argument("--set-index", type=int, default=0)
        p.add_argument("--R", type=float, default=None)
        p.add_argument("--out", default=None, help="output file (default stdout)")

    p = sub.add_parser("polar", help="polar region of a point set")
    add_common(p)

    p = sub.add_parser("hull", help="strongly convex hull of a point set")
    add_common(p)
    p.add_argument("--backend", choices=["exact2d", "grid"], default=None)
    p.add_argument("--h", type=float, default=None)

    p = sub.add_parser("farthest", help="farthest distance from a point to a scene set")
    add_common(p)
    p.add_argument("--x", required=True, type=_vector)

    p = sub.add_parser("conjugate", help="Fenchel conjugate of a grid function")
    p.add_argument("--fn", required=True)
    p.add_argument("--dual-lo", type=_vector, required=True)
    p.add_argument("--dual-hi", type=_vector, required=True)
    p.add_argument("--dual-h", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["bin", "csv"], default="bin")

    p = sub.add_parser("eta", help="homogenized conjugate at a dual point")
    p.add_argument("--fn", required=True)
    p.add_argument("--xstar", required=True, type=_vector)
    p.add_argument("--out", default=None)

    p = sub.add_parser("gamma", help="recover the center set of a farthest-type function")
    p.add_argument("--fn", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("transform", help="sublevel farthest transform f -> f_R")
    p.add_argument("--fn", required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["bin", "csv"], default="bin")

    p = sub.add_parser("certify", help="farthest-function characterization certificate")
    p.add_argument("--fn", required=True)
    p.add_argument("--probes", type=int, default=100)
    p.add_argument("--pairs", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", default=None)

    p = sub.add_parser("check", help="single polarity property check")
    p.add_argument("--property", required=True,
                   choices=["ordrev", "incl", "triple", "involution", "support-sum", "sigma-convex"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, default=10)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--norm", default="euclidean")
    p.add_argument("--report", default=None)

    p = sub.add_parser("suite", help="run a named verification suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.add_argument("--instances", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--norm", default="euclidean")
    p.add_argument("--report", default=None)

    p = sub.add_parser("render", help="render a scene, region file, or grid function to SVG")
    p.add_argument("--scene", default=None)
    p.add_argument("--fn", default=None)
    p.add_argument("--levels", default=None, help="comma-separated contour levels")
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--hull", action="store_true", help="render the hull instead of the raw sets")
    p.add_argument("--set-index", type=int, default=0)
    p.add_argument("--out", default=None)

    args = parser.parse_args(argv)

    if args.command == "polar":
        scene = load_scene(args.scene)
        C = _points_of(_scene_set(scene, args.set_index))
        region = polar(C, _radius(args, scene), scene.norm)
        if scene.norm.kind == "euclidean" and scene.norm.dim == 2:
            from .arcs import build_arc_region
            out = region_to_json(build_arc_region(region))
        else:
            out = region_to_json(region)
        _write(args.out, json.dumps(out, indent=2, sort_keys=True))
        return 0

    if args.command == "hull":
        scene = load_scene(args.scene)
        C = _points_of(_scene_set(scene, args.set_index))
        hull = strong_hull(C, _radius(args, scene), scene.norm, backend=args.backend, h=args.h)
        _write(args.out, json.dumps(region_to_json(hull), indent=2, sort_keys=True))
        return 0

    if args.command == "farthest":
        scene = load_scene(args.scene)
        obj = _scene_set(scene, args.set_index)
        if isinstance(obj, Ball):
            from .sets import farthest_distance_ball
            out = {"value": farthest_distance_ball(obj, args.x, scene.norm)}
        elif isinstance(obj, BallRegion):
            from .sets import farthest_distance_region
            out = {"value": farthest_distance_region(obj, args.x)}
        else:
            res = farthest_distance_finite(obj, args.x, scene.norm)
            out = {"value": res.value, "witness": res.witness.tolist(), "index": res.index}
        _write(args.out, json.dumps(out, indent=2, sort_keys=True))
        return 0

    if args.command == "conjugate":
        f = load_grid_function(args.fn)
        g = fenchel_conjugate(f, Box(args.dual_lo, args.dual_hi), args.dual_h)
        save_grid_function(g, args.out, payload=args.format)
        return 0

    if args.command == "eta":
        f = load_grid_function(args.fn)
        _write(args.out, json.dumps({"eta": eta(f, args.xstar)}))
        return 0

    if args.command == "gamma":
        from .functions import gamma_recover
        f = load_grid_function(args.fn)
        oracle = gamma_recover(f)
        try:
            pts = oracle.sample_points(f.h)
            out = {"empty": False, "resolution": f.h, "points": pts.tolist()}
        except EmptyRegionError:
            out = {"empty": True, "resolution": f.h, "points": []}
        _write(args.out, json.dumps(out, indent=2, sort_keys=True))
        return 0

    if args.command == "transform":
        f = load_grid_function(args.fn)
        save_grid_function(transform_fR(f, args.R), args.out, payload=args.format)
        return 0

    if args.command == "certify":
        f = load_grid_function(args.fn)
        cert = certify_farthest(f, probe_count=args.probes, pair_count=args.pairs, seed=args.seed)
        out = {
            "cond_a": cert.cond_a.tolist(),
            "cond_a_tol": cert.cond_a_tol,
            "cond_a_probes": cert.probes.tolist(),
            "cond_b_worst_gap": cert.cond_b_worst_gap,
            "cond_b_finite": cert.cond_b_finite,
            "roundtrip_error": cert.roundtrip_error if cert.roundtrip_error < 1e299 else "inf",
            "h": cert.h,
            "passed": cert.passed(),
        }
        _write(args.report, json.dumps(out, indent=2, sort_keys=True))
        return 0 if cert.passed() else 1

    if args.command in ("check", "suite"):
        name = args.property if args.command == "check" else args.suite
        report = run_suite(name, instances=args.instances, seed=args.seed, h=args.h, norm=args.norm)
        _write(args.report, report.dumps())
        return 0 if report.passed else 1

    if args.command == "render":
        style = {}
        if args.levels:
            style["levels"] = [float(t) for t in args.levels.split(",")]
        if args.fn:
            obj = load_grid_function(args.fn)
        elif args.scene:
            scene = load_scene(args.scene)
            if args.hull:
                C = _points_of(_scene_set(scene, args.set_index))
                obj = strong_hull(C, _radius(args, scene), scene.norm)
            else:
                obj = scene
        else:
            raise SystemExit("render needs --scene or --fn")
        _write(args.out, render_svg(obj, style))
        return 0

    raise SystemExit(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
