"""Deterministic SVG rendering of 2D scenes, regions, and level curves.

Arcs are emitted as true SVG elliptical-arc path segments; grid functions are
contoured with marching squares.  Identical inputs produce identical bytes:
floats are formatted to fixed precision and iteration orders are fixed.
"""

from __future__ import annotations

import math

import numpy as np

from .arcs import ArcRegion
from .errors import EmptyRegionError
from .polarity import HullResult
from .scenes import Scene
from .sets import Ball, BallRegion, PointSet


def _fmt(v: float) -> str:
    out = f"{v:.6f}"
    return "0.000000" if out == "-0.000000" else out


def marching_squares(xs: np.ndarray, ys: np.ndarray, V: np.ndarray, level: float) -> list:
    """Level-curve segments of a sampled field at the given level.

    ``V[i, j]`` is the value at (xs[i], ys[j]).  Returns a list of segment
    endpoint pairs ((x1, y1), (x2, y2)) with linearly interpolated crossings.
    Saddle cells are disambiguated by the cell-center average.
    """
    segs = []

    def interp(p, q, vp, vq):
        t = 0.5 if vq == vp else (level - vp) / (vq - vp)
        t = min(1.0, max(0.0, t))
        return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))

    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            corners = [
                ((xs[i], ys[j]), V[i, j]),
                ((xs[i + 1], ys[j]), V[i + 1, j]),
                ((xs[i + 1], ys[j + 1]), V[i + 1, j + 1]),
                ((xs[i], ys[j + 1]), V[i, j + 1]),
            ]
            code = sum(1 << k for k, (_, v) in enumerate(corners) if v > level)
            if code in (0, 15):
                continue
            crossings = []
            for k in range(4):
                (p, vp), (q, vq) = corners[k], corners[(k + 1) % 4]
                if (vp > level) != (vq > level):
                    crossings.append(interp(p, q, vp, vq))
            if len(crossings) == 2:
                segs.append((crossings[0], crossings[1]))
            elif len(crossings) == 4:
                center = 0.25 * sum(v for _, v in corners)
                # Pair crossings so the curve separates the center consistently.
                if (center > level) == (corners[0][1] > level):
                    segs.append((crossings[0], crossings[3]))
                    segs.append((crossings[1], crossings[2]))
                else:
                    segs.append((crossings[0], crossings[1]))
                    segs.append((crossings[2], crossings[3]))
    return segs


def _arc_path(region: ArcRegion) -> str:
    R = region.radius
    if region.kind == "point":
        p = region.vertices[0].point
        return (f"M {_fmt(p[0] - 1e-3)} {_fmt(p[1])} "
                f"A {_fmt(1e-3)} {_fmt(1e-3)} 0 1 1 {_fmt(p[0] + 1e-3)} {_fmt(p[1])} "
                f"A {_fmt(1e-3)} {_fmt(1e-3)} 0 1 1 {_fmt(p[0] - 1e-3)} {_fmt(p[1])} Z")
    if region.kind == "disk":
        c = region.generators[0]
        return (f"M {_fmt(c[0] - R)} {_fmt(c[1])} "
                f"A {_fmt(R)} {_fmt(R)} 0 1 1 {_fmt(c[0] + R)} {_fmt(c[1])} "
                f"A {_fmt(R)} {_fmt(R)} 0 1 1 {_fmt(c[0] - R)} {_fmt(c[1])} Z")
    start = region.arcs[0].start
    parts = [f"M {_fmt(start[0])} {_fmt(start[1])}"]
    for a in region.arcs:
        large = 1 if a.length > math.pi else 0
        end = a.end
        # sweep=1 traverses in the positive-angle (CCW) direction of the
        # pre-transform coordinate frame, matching the arc orientation.
        parts.append(f"A {_fmt(R)} {_fmt(R)} 0 {large} 1 {_fmt(end[0])} {_fmt(end[1])}")
    parts.append("Z")
    return " ".join(parts)


def _svg_document(body: list, lo, hi, style) -> str:
    width = style.get("width", 640)
    pad = 0.05 * max(hi[0] - lo[0], hi[1] - lo[1], 1e-9)
    x0, y0 = lo[0] - pad, -(hi[1] + pad)
    w, h = (hi[0] - lo[0]) + 2 * pad, (hi[1] - lo[1]) + 2 * pad
    height = int(round(width * h / w)) if w > 0 else width
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">\n'
        '<g transform="scale(1,-1)" vector-effect="non-scaling-stroke">\n'
    )
    return head + "\n".join(body) + "\n</g>\n</svg>\n"


def render_svg(obj, style: dict | None = None) -> str:
    """Render a Scene, region, hull result, or grid function to an SVG string.

    ``style`` keys: ``width`` (pixels), ``stroke``, ``fill``, ``stroke_width``,
    ``levels`` (grid-function contour levels).  Only 2D objects are supported.
    """
    style = dict(style or {})
    stroke = style.get("stroke", "#1f77b4")
    fill = style.get("fill", "none")
    sw = style.get("stroke_width", 0.01)

    from .functions import GridFunction

    if isinstance(obj, HullResult):
        if obj.whole_space:
            raise EmptyRegionError("cannot render the whole space")
        return render_svg(obj.region, style)

    if isinstance(obj, BallRegion):
        if obj.norm.kind == "euclidean" and obj.dim == 2:
            from .arcs import build_arc_region
            return render_svg(build_arc_region(obj), style)
        raise ValueError("only Euclidean 2D regions have an exact rendering")

    if isinstance(obj, ArcRegion):
        if obj.is_empty:
            raise EmptyRegionError("cannot render an empty region")
        pts = obj.boundary_points()
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        body = [f'<path d="{_arc_path(obj)}" fill="{fill}" stroke="{stroke}" stroke-width="{_fmt(sw)}"/>']
        return _svg_document(body, lo, hi, style)

    if isinstance(obj, GridFunction):
        if obj.dim != 2:
            raise ValueError("level-curve rendering requires a 2D grid")
        axes = obj.box.grid_axes(obj.h, strict=True)
        levels = style.get("levels")
        if levels is None:
            vmin, vmax = float(np.min(obj.values)), float(np.max(obj.values))
            levels = [vmin + t * (vmax - vmin) for t in (0.25, 0.5, 0.75)]
        body = []
        for lv in levels:
            for (x1, y1), (x2, y2) in marching_squares(axes[0], axes[1], obj.values, lv):
                body.append(
                    f'<path d="M {_fmt(x1)} {_fmt(y1)} L {_fmt(x2)} {_fmt(y2)}" '
                    f'fill="none" stroke="{stroke}" stroke-width="{_fmt(sw)}"/>'
                )
        return _svg_document(body, obj.box.lo, obj.box.hi, style)

    if isinstance(obj, Scene):
        if obj.norm.dim != 2:
            raise ValueError("scene rendering requires dimension 2")
        body = []
        los, his = [], []
        for s in obj.sets:
            if isinstance(s, PointSet):
                for p in s.points:
                    body.append(f'<circle cx="{_fmt(p[0])}" cy="{_fmt(p[1])}" r="{_fmt(0.02)}" fill="{stroke}"/>')
                los.append(s.points.min(axis=0))
                his.append(s.points.max(axis=0))
            elif isinstance(s, Ball):
                body.append(
                    f'<circle cx="{_fmt(s.center[0])}" cy="{_fmt(s.center[1])}" r="{_fmt(s.radius)}" '
                    f'fill="{fill}" stroke="{stroke}" stroke-width="{_fmt(sw)}"/>'
                )
                los.append(s.center - s.radius)
                his.append(s.center + s.radius)
            elif isinstance(s, BallRegion):
                from .arcs import build_arc_region
                A = build_arc_region(s)
                if not A.is_empty:
                    body.append(f'<path d="{_arc_path(A)}" fill="{fill}" stroke="{stroke}" stroke-width="{_fmt(sw)}"/>')
                    pts = A.boundary_points()
                    los.append(pts.min(axis=0))
                    his.append(pts.max(axis=0))
        if not body:
            raise EmptyRegionError("nothing to render")
        lo = np.min(np.array(los), axis=0)
        hi = np.max(np.array(his), axis=0)
        return _svg_document(body, lo, hi, style)

    raise TypeError(f"cannot render object of type {type(obj).__name__}")
