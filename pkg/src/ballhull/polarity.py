"""Polarity calculus for strongly convex sets.

For a fixed radius R, the polar of a set C is the set of points within
distance R of every point of C, i.e. the intersection of the balls B(x, R)
over x in C, equivalently the R-sublevel set of the farthest-distance
function of C.  The second polar is the R-strongly convex hull: the smallest
intersection of radius-R balls containing C.

The exact 2D Euclidean backend composes two maps on finite generator sets:
the arc structure of a polar, and the vertex set of an arc structure.  The
hull of C is the intersection of the balls B(v, R) over the vertices v of
C's polar; interiors of polar arcs never bind, because for any point y in a
nearby exclusion cone the vertex ball at the arc endpoint nearest the cone
direction already excludes y (arcs span at most pi, so some endpoint is
within pi/2 of the cone direction).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arcs import Arc, ArcRegion, ArcVertex, TWO_PI, build_arc_region
from .errors import EmptyRegionError, UnsupportedNormError
from .norms import DEFAULT_TOL, DirectionSet, NormSpec, unit_sphere_samples
from .sets import (
    Ball,
    BallRegion,
    Box,
    PointSet,
    SetOracle,
    farthest_values,
    nearest_values,
    support_function,
)


def polar(C, R: float, ns: NormSpec) -> BallRegion:
    """The radius-R polar of a finite point set: the region ∩_{c in C} B(c, R).

    The representation is exact for every norm; the region may be empty as a
    set (exactly when C fits in no radius-R ball), which the region's
    emptiness test reports.
    """
    if not (np.isfinite(R) and R > 0):
        raise ValueError(f"polar radius must be > 0, got {R}")
    ps = C if isinstance(C, PointSet) else PointSet(C)
    return BallRegion(ps, R, ns)


def _point_region(p, R, ns) -> ArcRegion:
    return ArcRegion([], [ArcVertex(np.asarray(p, float), ())], False, ns,
                     np.asarray(p, float)[None, :], R, kind="point",
                     interior_point=np.asarray(p, float))


def _disk_region(c, R, ns) -> ArcRegion:
    c = np.asarray(c, float)
    return ArcRegion([Arc(c, R, 0.0, TWO_PI)], [], True, ns, c[None, :], R,
                     kind="disk", interior_point=c.copy())


def polar_region(S: BallRegion | ArcRegion, R: float | None = None) -> ArcRegion:
    """Exact 2D Euclidean polar of a strongly convex region, as an ArcRegion.

    ``S`` must be built from balls of the polarity radius itself (the common
    situation: S is some polar, or a hull).  Degenerate kinds map to their
    closed forms: a full disk's polar is its center, a point's polar is the
    full ball, and an empty region's polar is the whole plane (represented by
    kind ``all``).
    """
    A = S if isinstance(S, ArcRegion) else build_arc_region(S)
    if R is None:
        R = A.radius
    if abs(A.radius - R) > 1e-12 * max(1.0, R):
        raise ValueError("polar_region requires the region radius to equal the polarity radius")
    ns = A.norm
    if A.kind == "empty":
        return ArcRegion([], [], False, ns, A.generators, R, kind="all")
    if A.kind == "all":
        return ArcRegion([], [], False, ns, A.generators, R, kind="empty")
    if A.kind == "point":
        return _disk_region(A.vertices[0].point, R, ns)
    if A.kind == "disk":
        return _point_region(A.generators[0], R, ns)
    verts = np.array([v.point for v in A.vertices])
    return build_arc_region(BallRegion(PointSet(verts), R, ns))


@dataclass
class HullResult:
    """Result of a strongly convex hull computation.

    ``region`` is an ArcRegion (exact 2D backend) or BallRegion (grid
    backend); ``whole_space`` marks the case where C fits in no radius-R ball,
    so the only strongly convex superset is the whole space.  ``polar`` is
    the intermediate first polar (arc structure or sampled generators).
    """

    region: ArcRegion | BallRegion | None
    backend: str
    resolution: float
    generator_count: int
    whole_space: bool = False
    polar: ArcRegion | BallRegion | None = None

    def membership(self, X, band: float = 0.0):
        if self.whole_space:
            single = np.asarray(X).ndim == 1
            n = 1 if single else len(np.atleast_2d(X))
            out = np.ones(n, dtype=bool)
            return bool(out[0]) if single else out
        return self.region.membership(X, band=band)


def _chebyshev_upper_bound(C: PointSet, ns: NormSpec, h: float | None) -> float:
    """Grid upper bound for min_y F_C(y): best candidate seen at resolution h."""
    box = C.bounding_box()
    if h is None:
        h = max(box.diameter, 1e-9) / 128.0
    cand = np.vstack([C.points, box.grid_points(h)])
    vals, _ = farthest_values(C.points, cand, ns)
    return float(np.min(vals))


def strong_hull(
    C,
    R: float,
    ns: NormSpec,
    backend: str | None = None,
    h: float | None = None,
    angular_step: float = TWO_PI / 720.0,
) -> HullResult:
    """Smallest strongly convex superset of C w.r.t. R, via the double polar.

    exact2d backend (Euclidean, dim 2): the hull is the intersection of the
    balls B(v, R) over the vertices of C's polar, with degenerate polars
    (disk, point, empty) handled in closed form.  Membership is exact.

    grid backend: the polar is discretized as the grid points y with
    F_C(y) <= R; the hull is the ball region on those generators, and the
    boundary error budget is one grid spacing h.

    When C is contained in no radius-R ball, the hull is the whole space,
    returned as a first-class result rather than an error.
    """
    ps = C if isinstance(C, PointSet) else PointSet(C)
    if not (np.isfinite(R) and R > 0):
        raise ValueError(f"hull radius must be > 0, got {R}")
    if backend is None:
        backend = "exact2d" if (ns.kind == "euclidean" and ns.dim == 2) else "grid"
    if backend == "exact2d":
        if ns.kind != "euclidean" or ns.dim != 2:
            raise UnsupportedNormError("exact2d hull backend requires the Euclidean norm in dimension 2")
        first = build_arc_region(polar(ps, R, ns))
        if first.kind == "empty":
            return HullResult(None, "exact2d", 0.0, 0, whole_space=True, polar=first)
        hull_region = polar_region(first, R)
        count = 1 if first.kind in ("disk", "point") else len(first.vertices)
        return HullResult(hull_region, "exact2d", 0.0, count, polar=first)
    if backend != "grid":
        raise ValueError(f"unknown hull backend {backend!r}")

    first = polar(ps, R, ns)
    try:
        box = first.bounding_box()
    except EmptyRegionError:
        return HullResult(None, "grid", h or 0.0, 0, whole_space=True, polar=first)
    if h is None:
        h = max(box.diameter, 1e-9) / 256.0
    grid = box.grid_points(h)
    fvals = first.farthest_to_generators(grid)
    gens = grid[fvals <= R]
    if len(gens) == 0:
        # The polar is thinner than the grid; fall back to the best Chebyshev
        # candidate so a nonempty polar is never misreported as whole-space.
        cand = np.vstack([ps.points, grid])
        vals, _ = farthest_values(ps.points, cand, ns)
        i = int(np.argmin(vals))
        if vals[i] > R:
            return HullResult(None, "grid", h, 0, whole_space=True, polar=first)
        gens = cand[i][None, :]
    region = BallRegion(PointSet(gens), R, ns)
    return HullResult(region, "grid", h, len(gens), polar=region)


def is_strongly_convex(
    S: SetOracle,
    R: float,
    ns: NormSpec | None = None,
    tol: float | None = None,
    h: float | None = None,
    probe_count: int = 20000,
    seed: int = 0,
    max_witnesses: int = 10,
) -> tuple[bool, dict]:
    """Hull-fixed-point test: is S (approximately) an intersection of radius-R balls?

    Samples S at resolution h, builds the strongly convex hull of the samples,
    and compares memberships on a probe cloud.  A witness is a probe in the
    hull but more than ``tol`` away from S (strict enlargement), or deep
    inside S yet more than ``tol`` outside the hull.  The verdict is
    resolution-bounded and the report says so.
    """
    ns = ns or S.norm
    box = S.bounding_box
    if h is None:
        h = max(box.diameter, 1e-9) / 256.0
    if tol is None:
        tol = 2.0 * h
    samples = S.sample_points(h)
    hull = strong_hull(PointSet(samples), R, ns, h=h)

    rng = np.random.default_rng(seed)
    probe_box = box.expand(0.25 * box.diameter + R * 0.1)
    probes = probe_box.lo + (probe_box.hi - probe_box.lo) * rng.random((probe_count, box.dim))
    in_set = np.asarray(S.membership(probes), dtype=bool)
    in_hull = np.asarray(hull.membership(probes), dtype=bool)

    witnesses = []
    # Enlargement: in the hull, well outside S.
    cand = np.nonzero(in_hull & ~in_set)[0]
    if len(cand):
        d_samples, _ = nearest_values(samples, probes[cand], ns)
        for j in np.nonzero(d_samples > tol + h)[0]:
            witnesses.append({
                "point": probes[cand[j]].tolist(),
                "kind": "hull_exceeds_set",
                "distance_to_set_samples": float(d_samples[j]),
            })
    # Deficit: deep in S, outside the hull by more than the band.
    if not hull.whole_space:
        cand = np.nonzero(in_set & ~in_hull)[0]
        if len(cand):
            if isinstance(hull.region, BallRegion):
                margin = hull.region.farthest_to_generators(probes[cand]) - R
            else:
                margin = hull.region.membership_margin(probes[cand])
            for j in np.nonzero(margin > tol)[0]:
                witnesses.append({
                    "point": probes[cand[j]].tolist(),
                    "kind": "set_exceeds_hull",
                    "hull_margin": float(margin[j]),
                })
    verdict = len(witnesses) == 0 and not hull.whole_space
    report = {
        "strongly_convex": verdict,
        "R": float(R),
        "h": float(h),
        "tol": float(tol),
        "sample_count": int(len(samples)),
        "probe_count": int(probe_count),
        "hull_whole_space": bool(hull.whole_space),
        "witness_count": len(witnesses),
        "witnesses": witnesses[:max_witnesses],
        "resolution_bounded": True,
    }
    return verdict, report


def polar_oracle(C: SetOracle, R: float, h: float | None = None) -> SetOracle:
    """Oracle for the radius-R polar of the set behind ``C``.

    Closed forms where available: Ball(c, r) maps to Ball(c, R - r) (empty for
    r > R, the singleton {c} for r = R); a ball region built from radius-R
    balls maps to the hull of its generators.  Otherwise membership is the
    sampled condition max_{z in samples(C)} ||y - z|| <= R at resolution h.
    """
    ns = C.norm
    src = C.source
    if isinstance(src, Ball):
        if src.radius > R:
            raise EmptyRegionError(f"polar of a ball with radius {src.radius} > R={R} is empty", resolution=None)
        if src.radius == R:
            return SetOracle.from_points(PointSet(src.center[None, :]), ns)
        return SetOracle.from_ball(Ball(src.center, R - src.radius), ns)
    if isinstance(src, ArcRegion) and abs(src.radius - R) <= 1e-12 * max(1.0, R):
        return polar_region(src, R).as_oracle()
    if isinstance(src, BallRegion) and abs(src.radius - R) <= 1e-12 * max(1.0, R):
        if ns.kind == "euclidean" and ns.dim == 2:
            return polar_region(build_arc_region(src), R).as_oracle()
        hull = strong_hull(src.generators, R, ns, backend="grid", h=h)
        return SetOracle.from_ball_region(hull.region)
    if isinstance(src, PointSet):
        return SetOracle.from_ball_region(polar(src, R, ns))
    samples = C.sample_points(h)
    used_h = C.resolution or (h if h is not None else max(C.bounding_box.diameter, 1e-9) / 512.0)

    def member(X):
        vals, _ = farthest_values(samples, X, ns)
        return vals <= R

    box = Box(samples.max(axis=0) - R, samples.min(axis=0) + R) if np.all(
        samples.max(axis=0) - R <= samples.min(axis=0) + R) else C.bounding_box
    return SetOracle.from_predicate(member, box, ns, resolution=used_h, source=("polar", C))


def support_sum_check(
    C: SetOracle,
    R: float,
    directions: DirectionSet | int = 360,
    h: float | None = None,
) -> float:
    """Max deviation over directions of |sigma_C(u) + sigma_polar(-u) - R*||u||_2|.

    A small value certifies the Minkowski identity C - C^polar = B(0, R).
    Euclidean only; the identity is specific to inner-product spaces.
    """
    if C.norm.kind != "euclidean":
        raise UnsupportedNormError("the support-sum identity holds for the Euclidean norm only")
    if isinstance(directions, int):
        directions = unit_sphere_samples(C.norm, "primal", directions)
    U = directions.directions
    pol = polar_oracle(C, R, h=h)
    worst = 0.0
    for u in U:
        s1 = support_function(C, u, h=h)
        s2 = support_function(pol, -u, h=h)
        dev = abs(s1 + s2 - R * float(np.hypot(*u) if len(u) == 2 else np.sqrt(np.sum(u * u))))
        worst = max(worst, dev)
    return worst


def sigma_convexity_check(
    C: SetOracle,
    R: float,
    segments: int = 1000,
    seed: int = 0,
    h: float | None = None,
    tol: float = DEFAULT_TOL,
) -> tuple[bool, float]:
    """Midpoint-convexity scan of g = R*||.||_2 - sigma_C on random segments.

    Returns ``(plausibly_convex, worst_violation)`` where the violation at a
    segment (u, v) is g((u+v)/2) - (g(u)+g(v))/2; any value above ``tol``
    breaks convexity, which happens exactly when C is not strongly convex
    w.r.t. R.  Alongside Gaussian pairs, axis-mirrored pairs are included
    because support functions of non-strongly-convex bodies typically kink on
    the axes of their flat faces.
    """
    if C.norm.kind != "euclidean":
        raise UnsupportedNormError("sigma-convexity check is specific to the Euclidean norm")
    rng = np.random.default_rng(seed)
    dim = C.dim
    n_rand = max(1, segments // 2)
    U = rng.standard_normal((n_rand, dim))
    V = rng.standard_normal((n_rand, dim))
    mirrored_u = rng.standard_normal((segments - n_rand, dim))
    flip_axis = rng.integers(0, dim, size=len(mirrored_u))
    mirrored_v = mirrored_u.copy()
    mirrored_v[np.arange(len(mirrored_v)), flip_axis] *= -1.0
    U = np.vstack([U, mirrored_u])
    V = np.vstack([V, mirrored_v])

    def g(W):
        out = np.empty(len(W))
        for i, w in enumerate(W):
            out[i] = R * float(np.sqrt(np.sum(w * w))) - support_function(C, w, h=h)
        return out

    mids = 0.5 * (U + V)
    viol = g(mids) - 0.5 * (g(U) + g(V))
    worst = float(np.max(viol))
    return worst <= tol, worst
