"""Scene/report file formats and seeded instance generation.

A scene couples a norm with set descriptors (points, balls, ball regions),
optional grid-function file references, and an optional default radius.
Grid functions are stored as a JSON header next to a binary or CSV payload of
row-major float64 values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .arcs import ArcRegion
from .norms import NormSpec
from .polarity import HullResult
from .sets import Ball, BallRegion, Box, PointSet, farthest_values, min_enclosing_circle


@dataclass
class Scene:
    """A norm, some sets, optional grid-function file references, optional R."""

    norm: NormSpec
    sets: list
    functions: list[str] = field(default_factory=list)
    R: float | None = None

    def __post_init__(self):
        for s in self.sets:
            dim = s.dim if not isinstance(s, BallRegion) else s.generators.dim
            if dim != self.norm.dim:
                raise ValueError("scene sets must match the norm dimension")


def _set_to_json(s) -> dict:
    if isinstance(s, PointSet):
        return {"type": "points", "points": s.points.tolist()}
    if isinstance(s, Ball):
        return {"type": "ball", "center": s.center.tolist(), "radius": s.radius}
    if isinstance(s, BallRegion):
        return {"type": "ballregion", "generators": s.generators.points.tolist(), "radius": s.radius}
    raise TypeError(f"cannot encode set of type {type(s).__name__}")


def _set_from_json(d: dict, ns: NormSpec):
    kind = d["type"]
    if kind == "points":
        return PointSet(np.array(d["points"], dtype=float))
    if kind == "ball":
        return Ball(np.array(d["center"], dtype=float), float(d["radius"]))
    if kind == "ballregion":
        return BallRegion(PointSet(np.array(d["generators"], dtype=float)), float(d["radius"]), ns)
    raise ValueError(f"unknown set type {kind!r}")


def scene_to_json(scene: Scene) -> dict:
    d = {"norm": scene.norm.to_json(), "sets": [_set_to_json(s) for s in scene.sets]}
    if scene.functions:
        d["functions"] = list(scene.functions)
    if scene.R is not None:
        d["R"] = scene.R
    return d


def scene_from_json(d: dict) -> Scene:
    ns = NormSpec.from_json(d["norm"])
    sets = [_set_from_json(s, ns) for s in d.get("sets", [])]
    return Scene(ns, sets, list(d.get("functions", [])), d.get("R"))


def save_scene(scene: Scene, path) -> None:
    Path(path).write_text(json.dumps(scene_to_json(scene), indent=2, sort_keys=True))


def load_scene(path) -> Scene:
    path = Path(path)
    scene = scene_from_json(json.loads(path.read_text()))
    for ref in scene.functions:
        target = path.parent / ref
        if not target.exists():
            raise FileNotFoundError(f"scene references a missing grid-function file: {target}")
    return scene


def region_to_json(obj) -> dict:
    """Encode a region: arcs+vertices for arc structures, generators+radius otherwise."""
    if isinstance(obj, HullResult):
        if obj.whole_space:
            return {"whole_space": True, "backend": obj.backend, "resolution": obj.resolution}
        d = region_to_json(obj.region)
        d.update({"backend": obj.backend, "resolution": obj.resolution,
                  "generator_count": obj.generator_count})
        return d
    if isinstance(obj, ArcRegion):
        return {
            "kind": obj.kind,
            "full_disk": obj.full_disk,
            "radius": obj.radius,
            "arcs": [
                {"center": a.center.tolist(), "radius": a.radius,
                 "start_angle": a.a0, "end_angle": a.a1}
                for a in obj.arcs
            ],
            "vertices": [v.point.tolist() for v in obj.vertices],
            "generators": obj.generators.tolist(),
        }
    if isinstance(obj, BallRegion):
        return {"generators": obj.generators.points.tolist(), "radius": obj.radius}
    raise TypeError(f"cannot encode region of type {type(obj).__name__}")


# ---------------------------------------------------------------------------
# Grid-function files: JSON header + binary/CSV payload
# ---------------------------------------------------------------------------

def save_grid_function(f, path, payload: str = "bin") -> None:
    """Write ``path`` (JSON header) plus a sibling payload of row-major float64."""
    from .functions import GridFunction

    assert isinstance(f, GridFunction)
    path = Path(path)
    if payload == "bin":
        payload_path = path.with_suffix(".bin")
        f.values.astype("<f8").ravel().tofile(payload_path)
    elif payload == "csv":
        payload_path = path.with_suffix(".csv")
        np.savetxt(payload_path, f.values.ravel(), fmt="%.17g")
    else:
        raise ValueError(f"unknown payload format {payload!r}")
    header = {
        "box": {"lo": f.box.lo.tolist(), "hi": f.box.hi.tolist()},
        "h": f.h,
        "norm": f.norm.to_json(),
        "shape": list(f.values.shape),
        "payload": payload_path.name,
        "payload_format": payload,
    }
    path.write_text(json.dumps(header, indent=2, sort_keys=True))


def load_grid_function(path):
    from .functions import GridFunction

    path = Path(path)
    header = json.loads(path.read_text())
    payload_path = path.parent / header["payload"]
    shape = tuple(header["shape"])
    if header["payload_format"] == "bin":
        vals = np.fromfile(payload_path, dtype="<f8").reshape(shape)
    else:
        vals = np.loadtxt(payload_path).reshape(shape)
    box = Box(np.array(header["box"]["lo"]), np.array(header["box"]["hi"]))
    return GridFunction(box, float(header["h"]), vals, NormSpec.from_json(header["norm"]))


# ---------------------------------------------------------------------------
# Seeded instance generation
# ---------------------------------------------------------------------------

def generate_instance(
    kind: str,
    seed: int,
    dim: int = 2,
    count: int = 5,
    coord_range: tuple[float, float] = (-1.0, 1.0),
    radius_range: tuple[float, float] = (1.0, 2.0),
    R: float | None = None,
    norm: NormSpec | None = None,
    diam_limit: str = "R",
) -> Scene:
    """Reproducible pseudo-random scene of the given kind.

    ``points``: ``count`` points uniform over the coordinate range.
    ``ball``: one ball with radius uniform in ``radius_range``.
    ``hull``: a point set with a radius R chosen from ``radius_range`` (unless
    given), rescaled so that diam(C) <= R, which guarantees nonempty polars;
    ``diam_limit='2R'`` relaxes the target to diam <= 2R and verifies
    feasibility by search, resampling if the polar would be empty.
    """
    if dim not in (1, 2, 3):
        raise ValueError(f"instance dim must be 1, 2, or 3, got {dim}")
    if count < 1:
        raise ValueError("count must be >= 1")
    if coord_range[0] >= coord_range[1] or radius_range[0] > radius_range[1] or radius_range[0] <= 0:
        raise ValueError("infeasible generation parameters")
    if diam_limit not in ("R", "2R"):
        raise ValueError("diam_limit must be 'R' or '2R'")
    ns = norm or NormSpec.euclidean(dim)
    rng = np.random.default_rng(seed)
    lo, hi = coord_range

    if kind == "points":
        pts = lo + (hi - lo) * rng.random((count, dim))
        return Scene(ns, [PointSet(pts)])
    if kind == "ball":
        center = lo + (hi - lo) * rng.random(dim)
        radius = radius_range[0] + (radius_range[1] - radius_range[0]) * rng.random()
        return Scene(ns, [Ball(center, radius)], R=R)
    if kind != "hull":
        raise ValueError(f"unknown instance kind {kind!r}")

    Rv = R if R is not None else radius_range[0] + (radius_range[1] - radius_range[0]) * rng.random()
    limit = Rv if diam_limit == "R" else 2.0 * Rv
    for _ in range(64):
        pts = lo + (hi - lo) * rng.random((count, dim))
        if count > 1:
            vals, _ = farthest_values(pts, pts, ns)
            diam = float(np.max(vals))
            if diam > 0:
                target = limit * (0.3 + 0.6 * rng.random())
                center = pts.mean(axis=0)
                pts = center + (pts - center) * (target / diam)
        if diam_limit == "R":
            return Scene(ns, [PointSet(pts)], R=Rv)
        # diam <= 2R does not by itself guarantee a nonempty polar; verify.
        if ns.kind == "euclidean" and dim == 2:
            _, rstar = min_enclosing_circle(pts)
            ok = rstar <= Rv
        else:
            box = Box.from_points(pts, margin=0.0)
            cand = np.vstack([pts, box.grid_points(max(box.diameter, 1e-9) / 64.0)])
            vals, _ = farthest_values(pts, cand, ns)
            ok = float(np.min(vals)) <= Rv
        if ok:
            return Scene(ns, [PointSet(pts)], R=Rv)
    raise ValueError("could not generate a feasible hull instance; relax the parameters")
