"""Exact boundary structure of 2D Euclidean intersections of equal-radius disks.

A region ∩_i B(g_i, R) in the Euclidean plane is bounded by circular arcs of
the generator circles.  On circle i, the admissible set is the intersection of
one angular interval per other generator, each of length <= pi; intersecting
intervals of length <= pi on a circle keeps a single interval, so every circle
contributes at most one boundary arc.  Emptiness is decided exactly by the
smallest enclosing circle of the generators (nonempty iff its radius <= R).

Queries on the built structure (membership, farthest, nearest, support) are
exact and vectorized over probe batches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyRegionError, UnsupportedNormError
from .norms import NormSpec
from .sets import BallRegion, TANGENCY_RTOL, convex_hull_2d, min_enclosing_circle

TWO_PI = 2.0 * math.pi

# Arcs shorter than this (radians) are collapsed; they are tangency artifacts.
_ARC_MIN = 1e-12

# Angular slack when testing whether a candidate angle lies on an arc.
_ANG_TOL = 1e-9


def _wrap_pi(a):
    """Wrap angles into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(a, float), TWO_PI)


def _wrap_2pi(a):
    return np.mod(np.asarray(a, float), TWO_PI)


@dataclass
class Arc:
    """CCW arc of the circle around ``center`` with the common radius.

    Angles are radians with ``a0 <= a1 <= a0 + 2*pi``; a full circle is
    (0, 2*pi).
    """

    center: np.ndarray
    radius: float
    a0: float
    a1: float

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).ravel()

    @property
    def length(self) -> float:
        return self.a1 - self.a0

    def point_at(self, theta: float | np.ndarray) -> np.ndarray:
        t = np.asarray(theta, dtype=float)
        return self.center + self.radius * np.stack([np.cos(t), np.sin(t)], axis=-1)

    @property
    def start(self) -> np.ndarray:
        return self.point_at(self.a0)

    @property
    def end(self) -> np.ndarray:
        return self.point_at(self.a1)

    def contains_angle(self, theta, tol: float = _ANG_TOL):
        rel = _wrap_2pi(np.asarray(theta, float) - self.a0)
        return (rel <= self.length + tol) | (rel >= TWO_PI - tol)


@dataclass
class ArcVertex:
    """Boundary vertex: an intersection point of two generator circles."""

    point: np.ndarray
    arcs: tuple[int, ...]

    def __post_init__(self):
        self.point = np.asarray(self.point, dtype=float).ravel()


@dataclass
class ArcRegion:
    """Boundary decomposition of a 2D Euclidean equal-radius disk intersection.

    ``kind`` is one of ``region`` (arcs + vertices, CCW closed), ``disk``
    (single generator, full circle), ``point`` (degenerate singleton), or
    ``empty``.  ``generators`` is the reduced generator set actually used
    (convex-hull vertices of the originals; the intersection is unchanged
    because the farthest distance over a hull is attained at its extreme
    points).  Membership is evaluated exactly from the generators.
    """

    arcs: list[Arc]
    vertices: list[ArcVertex]
    full_disk: bool
    norm: NormSpec
    generators: np.ndarray
    radius: float
    kind: str = "region"
    interior_point: np.ndarray | None = None

    def __post_init__(self):
        self.generators = np.atleast_2d(np.asarray(self.generators, dtype=float))
        if self.interior_point is not None:
            self.interior_point = np.asarray(self.interior_point, dtype=float).ravel()
        self._centers = np.array([a.center for a in self.arcs]).reshape(-1, 2)
        self._a0 = np.array([a.a0 for a in self.arcs])
        self._alen = np.array([a.length for a in self.arcs])
        self._vx = np.array([v.point for v in self.vertices]).reshape(-1, 2)

    # -- basic predicates ---------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return self.kind == "empty"

    def _require_nonempty(self):
        if self.is_empty:
            raise EmptyRegionError("region is empty", resolution=None)
        if self.kind == "all":
            raise ValueError("query is unbounded on the whole-space region")

    def membership_margin(self, X) -> np.ndarray:
        """Signed membership margin (<= 0 inside): max_g ||x - g|| - R.

        For the degenerate point kind this is the distance to the point.
        """
        self._require_nonempty()
        Xb = np.atleast_2d(np.asarray(X, dtype=float))
        if self.kind == "point":
            p = self.vertices[0].point
            return np.hypot(Xb[:, 0] - p[0], Xb[:, 1] - p[1])
        d = Xb[:, None, :] - self.generators[None, :, :]
        return np.max(np.sqrt(np.sum(d * d, axis=-1)), axis=1) - self.radius

    def membership(self, X, band: float = 0.0):
        if self.kind in ("empty", "all"):
            single = np.asarray(X).ndim == 1
            n = 1 if single else len(np.atleast_2d(X))
            out = np.full(n, self.kind == "all")
            return bool(out[0]) if single else out
        slack = band + 1e-12 if self.kind == "point" else band
        ok = self.membership_margin(X) <= slack
        return bool(ok[0]) if np.asarray(X).ndim == 1 else ok

    # -- exact batched queries ------------------------------------------------

    def farthest_batch(self, X) -> np.ndarray:
        """Exact max over the region of ||x - .|| for each probe row of X."""
        self._require_nonempty()
        Xb = np.atleast_2d(np.asarray(X, dtype=float))
        if self.kind == "point":
            p = self.vertices[0].point
            return np.hypot(Xb[:, 0] - p[0], Xb[:, 1] - p[1])
        if self.kind == "disk":
            g = self.generators[0]
            return np.hypot(Xb[:, 0] - g[0], Xb[:, 1] - g[1]) + self.radius
        diff = Xb[:, None, :] - self._vx[None, :, :]
        best = np.max(np.sqrt(np.sum(diff * diff, axis=-1)), axis=1)
        # Antipodal candidate per arc: g + R*(g-x)/||g-x||, admissible when its
        # angle lies on the arc.  Probes at an arc center are skipped (d=0);
        # the arc endpoints, already counted as vertices, dominate there.
        for k in range(len(self.arcs)):
            g = self._centers[k]
            vx = g[0] - Xb[:, 0]
            vy = g[1] - Xb[:, 1]
            d = np.hypot(vx, vy)
            ok = d > 1e-15
            theta = np.arctan2(vy, vx)
            rel = np.mod(theta - self._a0[k], TWO_PI)
            on_arc = (rel <= self._alen[k] + _ANG_TOL) | (rel >= TWO_PI - _ANG_TOL)
            cand = np.where(ok & on_arc, d + self.radius, -np.inf)
            best = np.maximum(best, cand)
        return best

    def nearest_batch(self, X) -> np.ndarray:
        """Exact min over the region of ||x - .|| (zero for interior probes)."""
        self._require_nonempty()
        Xb = np.atleast_2d(np.asarray(X, dtype=float))
        if self.kind == "point":
            p = self.vertices[0].point
            return np.hypot(Xb[:, 0] - p[0], Xb[:, 1] - p[1])
        if self.kind == "disk":
            g = self.generators[0]
            d = np.hypot(Xb[:, 0] - g[0], Xb[:, 1] - g[1]) - self.radius
            return np.maximum(d, 0.0)
        inside = self.membership(Xb)
        if len(self._vx):
            diff = Xb[:, None, :] - self._vx[None, :, :]
            best = np.min(np.sqrt(np.sum(diff * diff, axis=-1)), axis=1)
        else:
            best = np.full(len(Xb), np.inf)
        # Radial projection onto each arc: the closest point of circle k to x
        # sits at angle atan2(x - g); it is a candidate when on the arc.
        for k in range(len(self.arcs)):
            g = self._centers[k]
            vx = Xb[:, 0] - g[0]
            vy = Xb[:, 1] - g[1]
            d = np.hypot(vx, vy)
            theta = np.arctan2(vy, vx)
            rel = np.mod(theta - self._a0[k], TWO_PI)
            on_arc = (rel <= self._alen[k] + _ANG_TOL) | (rel >= TWO_PI - _ANG_TOL)
            cand = np.where(on_arc, np.abs(d - self.radius), np.inf)
            best = np.minimum(best, cand)
        return np.where(inside, 0.0, best)

    def support_batch(self, U) -> np.ndarray:
        """Exact support function values over a batch of directions."""
        self._require_nonempty()
        Ub = np.atleast_2d(np.asarray(U, dtype=float))
        norms = np.hypot(Ub[:, 0], Ub[:, 1])
        if self.kind == "point":
            return Ub @ self.vertices[0].point
        if self.kind == "disk":
            return Ub @ self.generators[0] + self.radius * norms
        best = np.max(Ub @ self._vx.T, axis=1)
        # Tangency candidate: the boundary point with outward normal u on arc k.
        theta = np.arctan2(Ub[:, 1], Ub[:, 0])
        for k in range(len(self.arcs)):
            rel = np.mod(theta - self._a0[k], TWO_PI)
            on_arc = (rel <= self._alen[k] + _ANG_TOL) | (rel >= TWO_PI - _ANG_TOL)
            cand = np.where(on_arc, Ub @ self._centers[k] + self.radius * norms, -np.inf)
            best = np.maximum(best, cand)
        return best

    # -- export helpers -------------------------------------------------------

    def boundary_points(self, angular_step: float = TWO_PI / 720.0) -> np.ndarray:
        """Boundary sample points: all vertices plus arc samples at the given step.

        Export density never affects membership answers; those always come from
        the generators.
        """
        self._require_nonempty()
        if self.kind == "point":
            return self._vx.copy()
        pts = [self._vx] if len(self._vx) else []
        for a in self.arcs:
            n = max(2, int(math.ceil(a.length / angular_step)) + 1)
            t = a.a0 + (a.length / (n - 1)) * np.arange(n)
            pts.append(a.point_at(t))
        return np.vstack(pts)

    def diameter_upper_bound(self, directions: int = 720) -> float:
        """Width sweep max_u (sigma(u) + sigma(-u)) over evenly spread directions."""
        ang = TWO_PI * np.arange(directions) / directions
        U = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        return float(np.max(self.support_batch(U) + self.support_batch(-U)))

    def as_oracle(self):
        from .sets import Box, SetOracle
        self._require_nonempty()
        if self.kind == "point":
            p = self.vertices[0].point
            box = Box(p, p)
        else:
            g = self.generators
            box = Box(g.max(axis=0) - self.radius, g.min(axis=0) + self.radius)
        return SetOracle(lambda X: np.atleast_1d(self.membership(X)), box, 2, self.norm, 0.0, self)


def _empty_region(generators, radius, ns) -> ArcRegion:
    return ArcRegion([], [], False, ns, generators, radius, kind="empty")


def build_arc_region(region: BallRegion) -> ArcRegion:
    """Exact boundary decomposition of a 2D Euclidean BallRegion.

    Returns an ArcRegion of kind ``region``, ``disk`` (single generator),
    ``point`` (the intersection degenerates to one point, e.g. two tangent
    circles), or ``empty``.  Near-tangent circle pairs, |d - 2R| <= 1e-9*R,
    are collapsed to a tangency so no spurious micro-arcs appear.

    The result is cached on the region instance.
    """
    if region.norm.kind != "euclidean" or region.norm.dim != 2:
        raise UnsupportedNormError("exact arc boundaries exist only for the Euclidean norm in dimension 2")
    if getattr(region, "_arcs", None) is not None:
        return region._arcs
    out = _build_arc_region(region)
    region._arcs = out
    return out


def _build_arc_region(region: BallRegion) -> ArcRegion:
    R = region.radius
    ns = region.norm
    G = convex_hull_2d(region.generators.points)
    if len(G) == 1:
        c = G[0]
        arcs = [Arc(c, R, 0.0, TWO_PI)]
        return ArcRegion(arcs, [], True, ns, G, R, kind="disk", interior_point=c.copy())

    cen, rstar = min_enclosing_circle(G)
    if rstar > R * (1.0 + TANGENCY_RTOL):
        return _empty_region(G, R, ns)

    tang_band = TANGENCY_RTOL * R + 1e-12
    m = len(G)
    raw: list[tuple[int, float, float]] = []
    for i in range(m):
        v = np.delete(G, i, axis=0) - G[i]
        d = np.hypot(v[:, 0], v[:, 1])
        phi = np.arccos(np.clip(d / (2.0 * R), -1.0, 1.0))
        phi[np.abs(d - 2.0 * R) <= tang_band] = 0.0
        alpha = np.arctan2(v[:, 1], v[:, 0])
        # Anchor the unwrap at the tightest constraint; every interval has
        # half-width <= pi/2, so line intersection equals circular intersection.
        c0 = float(alpha[int(np.argmin(phi))])
        rel = c0 + _wrap_pi(alpha - c0)
        lo = float(np.max(rel - phi))
        hi = float(np.min(rel + phi))
        if hi - lo > _ARC_MIN:
            raw.append((i, lo, hi))

    if not raw:
        # Every circle is fully clipped: the region is (numerically) the single
        # point realizing the min-enclosing radius, which must then equal R.
        vtx = ArcVertex(cen, ())
        return ArcRegion([], [vtx], False, ns, G, R, kind="point", interior_point=cen.copy())

    arcs = [Arc(G[i], R, _wrap_2pi(lo), float(_wrap_2pi(lo) + (hi - lo))) for i, lo, hi in raw]

    # Order arcs CCW around an interior point (the min-enclosing center lies in
    # the region since its farthest generator distance is rstar <= R).
    mids = np.array([a.point_at(0.5 * (a.a0 + a.a1)) for a in arcs])
    order = np.argsort(np.arctan2(mids[:, 1] - cen[1], mids[:, 0] - cen[0]), kind="stable")
    arcs = [arcs[int(k)] for k in order]

    n = len(arcs)
    verts = []
    scale = max(1.0, R)
    for k in range(n):
        p_end = arcs[k].end
        p_next = arcs[(k + 1) % n].start
        gap = float(np.hypot(*(p_end - p_next)))
        if gap > 1e-6 * scale:
            raise RuntimeError(f"arc boundary failed to close (gap {gap:.3e}); degenerate input?")
        verts.append(ArcVertex(0.5 * (p_end + p_next), (k, (k + 1) % n)))
    return ArcRegion(arcs, verts, False, ns, G, R, kind="region", interior_point=cen.copy())
