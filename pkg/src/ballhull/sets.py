"""Point sets, balls, and ball-intersection regions with distance/support queries.

The workhorse is the batched distance kernel: farthest and nearest distances
from probe points to a finite generator set, in any supported norm.  Exact 2D
Euclidean backends for regions live in :mod:`ballhull.arcs`; the dispatchers
here fall back to membership-filtered grid sampling elsewhere and report the
resolution they used.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import EmptyRegionError, EmptySetError
from .norms import NormSpec

# Target element count for chunked pairwise-distance sweeps.
_CHUNK_ELEMS = 4_000_000

# Relative band for treating a min-enclosing radius as equal to R.
TANGENCY_RTOL = 1e-9


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2:
        raise ValueError(f"expected an (n, dim) array of points, got shape {pts.shape}")
    return pts


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lo, hi] in R^n."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float).ravel()
        hi = np.asarray(self.hi, dtype=float).ravel()
        if lo.shape != hi.shape:
            raise ValueError("lo and hi must have the same length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("box bounds must be finite")
        if np.any(lo > hi):
            raise ValueError(f"empty box: lo={lo} exceeds hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_points(cls, points, margin: float = 0.0) -> "Box":
        pts = _as_points(points)
        return cls(pts.min(axis=0) - margin, pts.max(axis=0) + margin)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    @property
    def diameter(self) -> float:
        """Euclidean diagonal length."""
        return float(np.sqrt(np.sum((self.hi - self.lo) ** 2)))

    def expand(self, margin: float) -> "Box":
        return Box(self.lo - margin, self.hi + margin)

    def contains(self, X, tol: float = 0.0) -> np.ndarray | bool:
        pts = _as_points(X)
        ok = np.all((pts >= self.lo - tol) & (pts <= self.hi + tol), axis=1)
        return bool(ok[0]) if np.asarray(X).ndim == 1 else ok

    def clip(self, X) -> np.ndarray:
        return np.clip(np.asarray(X, dtype=float), self.lo, self.hi)

    def grid_axes(self, h: float, strict: bool = False) -> list[np.ndarray]:
        """Per-axis sample coordinates at spacing ~h.

        With ``strict=True`` the box extent must be an integer multiple of ``h``
        (within 1e-9) and the spacing is exactly ``h``; otherwise the count is
        rounded up and the spacing shrinks to cover the box evenly.
        """
        if h <= 0:
            raise ValueError("grid spacing h must be positive")
        axes = []
        for a in range(self.dim):
            span = self.hi[a] - self.lo[a]
            if span == 0.0:
                axes.append(np.array([self.lo[a]]))
                continue
            steps = span / h
            if strict:
                m = int(round(steps))
                if m < 1 or abs(steps - m) > 1e-9 * max(1.0, steps):
                    raise ValueError(f"box span {span} along axis {a} is not an integer multiple of h={h}")
            else:
                m = max(1, int(np.ceil(steps - 1e-12)))
            axes.append(self.lo[a] + (span / m) * np.arange(m + 1))
        return axes

    def grid_points(self, h: float, strict: bool = False) -> np.ndarray:
        axes = self.grid_axes(h, strict=strict)
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass
class PointSet:
    """A finite set of points in R^n.  Immutable by convention after creation."""

    points: np.ndarray

    def __post_init__(self):
        pts = _as_points(self.points)
        if pts.shape[0] == 0:
            raise EmptySetError("PointSet must be nonempty")
        if not np.all(np.isfinite(pts)):
            raise ValueError("PointSet coordinates must be finite (no NaN/Inf)")
        self.points = pts

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def dedup(self) -> "PointSet":
        """Remove exactly-coincident points (exact coordinate equality only)."""
        return PointSet(np.unique(self.points, axis=0))

    def bounding_box(self, margin: float = 0.0) -> Box:
        return Box.from_points(self.points, margin)


@dataclass
class Ball:
    """Closed ball B(center, radius) for whatever norm the caller pairs it with."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError("ball center must be finite")
        if not (np.isfinite(self.radius) and self.radius >= 0.0):
            raise ValueError(f"ball radius must be >= 0, got {self.radius}")
        self.center = c
        self.radius = float(self.radius)

    @property
    def dim(self) -> int:
        return len(self.center)


# ---------------------------------------------------------------------------
# Batched distance kernels
# ---------------------------------------------------------------------------

def _pair_norms(X: np.ndarray, P: np.ndarray, ns: NormSpec) -> np.ndarray:
    """(N, M) matrix of ||x_i - p_j||."""
    if ns.kind == "euclidean":
        # Quadratic expansion keeps the inner loop in BLAS.
        d2 = (np.sum(X * X, axis=1)[:, None]
              + np.sum(P * P, axis=1)[None, :]
              - 2.0 * (X @ P.T))
        return np.sqrt(np.maximum(d2, 0.0))
    if ns.kind in ("l1", "linf"):
        # Per-axis accumulation avoids the (N, M, d) intermediate.
        acc = np.abs(X[:, 0][:, None] - P[:, 0][None, :])
        for a in range(1, X.shape[1]):
            term = np.abs(X[:, a][:, None] - P[:, a][None, :])
            if ns.kind == "l1":
                acc += term
            else:
                np.maximum(acc, term, out=acc)
        return acc
    return ns.eval(X[:, None, :] - P[None, :, :])


def farthest_values(points, X, ns: NormSpec) -> tuple[np.ndarray, np.ndarray]:
    """Max distance from each probe in ``X`` to the finite set ``points``.

    Returns ``(values, argmax_indices)``.  Ties break to the lowest index so
    witnesses are deterministic.
    """
    P = _as_points(points)
    Xb = _as_points(X)
    n = len(Xb)
    vals = np.empty(n)
    idx = np.empty(n, dtype=np.intp)
    step = max(1, _CHUNK_ELEMS // max(1, len(P)))
    for s in range(0, n, step):
        d = _pair_norms(Xb[s:s + step], P, ns)
        idx[s:s + step] = np.argmax(d, axis=1)
        vals[s:s + step] = np.take_along_axis(d, idx[s:s + step, None], axis=1)[:, 0]
    return vals, idx


def nearest_values(points, X, ns: NormSpec) -> tuple[np.ndarray, np.ndarray]:
    """Min distance from each probe in ``X`` to the finite set ``points``."""
    P = _as_points(points)
    Xb = _as_points(X)
    n = len(Xb)
    vals = np.empty(n)
    idx = np.empty(n, dtype=np.intp)
    step = max(1, _CHUNK_ELEMS // max(1, len(P)))
    for s in range(0, n, step):
        d = _pair_norms(Xb[s:s + step], P, ns)
        idx[s:s + step] = np.argmin(d, axis=1)
        vals[s:s + step] = np.take_along_axis(d, idx[s:s + step, None], axis=1)[:, 0]
    return vals, idx


class FarthestResult(NamedTuple):
    value: float
    witness: np.ndarray
    index: int


def farthest_distance_finite(C: PointSet, x, ns: NormSpec) -> FarthestResult:
    """Exact max of ||x - c|| over a finite set, with an argmax witness."""
    if len(C) == 0:
        raise EmptySetError("farthest distance over an empty set is undefined")
    vals, idx = farthest_values(C.points, x, ns)
    i = int(idx[0])
    return FarthestResult(float(vals[0]), C.points[i].copy(), i)


def farthest_distance_ball(B: Ball, x, ns: NormSpec) -> float:
    """max over the ball of ||x - .||, which is ||x - c|| + r in every norm."""
    return float(ns.eval(np.asarray(x, float) - B.center)) + B.radius


# ---------------------------------------------------------------------------
# 2D Euclidean utilities: convex hull and smallest enclosing circle
# ---------------------------------------------------------------------------

def convex_hull_2d(points) -> np.ndarray:
    """Convex hull vertices in CCW order (monotone chain).

    Collinear interior points are dropped; 1 or 2 distinct input points are
    returned as-is.  The result is deterministic: input is deduplicated and
    sorted lexicographically first.
    """
    pts = np.unique(_as_points(points), axis=0)
    if pts.shape[1] != 2:
        raise ValueError("convex_hull_2d requires 2D points")
    n = len(pts)
    if n <= 2:
        return pts
    span = float(np.max(np.abs(pts))) or 1.0
    area_tol = 1e-12 * span * span

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def half(seq):
        chain: list[np.ndarray] = []
        for p in seq:
            while len(chain) >= 2 and cross(chain[-2], chain[-1], p) <= area_tol:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    return np.array(hull)


def _in_circle(c, p) -> bool:
    return c is not None and np.hypot(p[0] - c[0], p[1] - c[1]) <= c[2] * (1 + 1e-14)


def _circle_diameter(a, b):
    cx, cy = (a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0
    r = max(np.hypot(cx - a[0], cy - a[1]), np.hypot(cx - b[0], cy - b[1]))
    return (cx, cy, r)


def _circumcircle(a, b, c):
    ox = (min(a[0], b[0], c[0]) + max(a[0], b[0], c[0])) / 2.0
    oy = (min(a[1], b[1], c[1]) + max(a[1], b[1], c[1])) / 2.0
    ax, ay = a[0] - ox, a[1] - oy
    bx, by = b[0] - ox, b[1] - oy
    cx, cy = c[0] - ox, c[1] - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0
    if d == 0.0:
        return None
    x = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
              + (cx * cx + cy * cy) * (ay - by)) / d
    y = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
              + (cx * cx + cy * cy) * (bx - ax)) / d
    r = max(np.hypot(x - a[0], y - a[1]), np.hypot(x - b[0], y - b[1]), np.hypot(x - c[0], y - c[1]))
    return (x, y, r)


def _circle_two_points(pts, p, q):
    circ = _circle_diameter(p, q)
    left = None
    right = None
    px, py = p
    qx, qy = q
    for r in pts:
        if _in_circle(circ, r):
            continue
        cross = (qx - px) * (r[1] - py) - (qy - py) * (r[0] - px)
        c = _circumcircle(p, q, r)
        if c is None:
            continue
        cc = (qx - px) * (c[1] - py) - (qy - py) * (c[0] - px)
        if cross > 0.0 and (left is None or cc > (qx - px) * (left[1] - py) - (qy - py) * (left[0] - px)):
            left = c
        elif cross < 0.0 and (right is None or cc < (qx - px) * (right[1] - py) - (qy - py) * (right[0] - px)):
            right = c
    if left is None and right is None:
        return circ
    if left is None:
        return right
    if right is None:
        return left
    return left if left[2] <= right[2] else right


def _circle_one_point(pts, p):
    c = (p[0], p[1], 0.0)
    for i, q in enumerate(pts):
        if not _in_circle(c, q):
            c = _circle_diameter(p, q) if c[2] == 0.0 else _circle_two_points(pts[:i + 1], p, q)
    return c


def min_enclosing_circle(points, seed: int = 0x5EED) -> tuple[np.ndarray, float]:
    """Smallest enclosing circle of 2D points (randomized incremental, expected O(n)).

    The shuffle is seeded, so results are deterministic.  The returned radius
    is also the Chebyshev radius min_y max_i ||y - p_i|| for the Euclidean norm.
    """
    arr = np.unique(_as_points(points), axis=0)
    if len(arr) > 64:
        # Only convex-position points can touch the circle.
        arr = convex_hull_2d(arr)
    pts = [(float(x), float(y)) for x, y in arr]
    rnd = random.Random(seed)
    rnd.shuffle(pts)
    c = None
    for i, p in enumerate(pts):
        if c is None or not _in_circle(c, p):
            c = _circle_one_point(pts[:i + 1], p)
    return np.array([c[0], c[1]]), float(c[2])


# ---------------------------------------------------------------------------
# BallRegion and SetOracle
# ---------------------------------------------------------------------------

@dataclass
class BallRegion:
    """Intersection of balls of common radius R centered at a generator set.

    Membership is the defining identity: y belongs to the region iff
    max_g ||y - g|| <= R.  Generators are deduplicated on construction
    (exact coordinate equality only); redundant generators are harmless.
    """

    generators: PointSet
    radius: float
    norm: NormSpec

    def __post_init__(self):
        if isinstance(self.generators, np.ndarray) or isinstance(self.generators, (list, tuple)):
            self.generators = PointSet(self.generators)
        if not (np.isfinite(self.radius) and self.radius > 0.0):
            raise ValueError(f"region radius must be > 0, got {self.radius}")
        if self.generators.dim != self.norm.dim:
            raise ValueError("generator dimension does not match the norm dimension")
        self.radius = float(self.radius)
        self.generators = self.generators.dedup()
        self._arcs = None  # lazily built exact 2D boundary, see arcs.py

    @property
    def dim(self) -> int:
        return self.generators.dim

    def farthest_to_generators(self, X) -> np.ndarray:
        vals, _ = farthest_values(self.generators.points, X, self.norm)
        return vals

    def membership(self, X, band: float = 0.0) -> np.ndarray | bool:
        vals = self.farthest_to_generators(X)
        ok = vals <= self.radius + band
        return bool(ok[0]) if np.asarray(X).ndim == 1 else ok

    def bounding_box(self) -> Box:
        """Tight axis box: the region lies in every B(g, R), so coordinates are pinched.

        Raises :class:`EmptyRegionError` when even the box intersection is empty.
        """
        g = self.generators.points
        lo = g.max(axis=0) - self.radius
        hi = g.min(axis=0) + self.radius
        if np.any(lo > hi):
            raise EmptyRegionError("region is empty (bounding boxes of generator balls do not intersect)", resolution=None)
        return Box(lo, hi)

    def is_empty(self, h: float | None = None) -> bool:
        """Emptiness test: exact for Euclidean 2D, resolution-bounded otherwise.

        For the Euclidean plane the region is nonempty iff the smallest circle
        enclosing the generators has radius <= R.  For other norms/dimensions a
        grid search at spacing ``h`` (default: box diagonal / 512) decides
        "empty at resolution h" only.
        """
        if self.norm.kind == "euclidean" and self.dim == 2:
            _, rstar = min_enclosing_circle(self.generators.points)
            return rstar > self.radius * (1.0 + TANGENCY_RTOL)
        try:
            box = self.bounding_box()
        except EmptyRegionError:
            return True
        if h is None:
            h = max(box.diameter, 1e-9) / 512.0
        vals = self.farthest_to_generators(box.grid_points(h))
        return bool(np.min(vals) > self.radius)


@dataclass
class SetOracle:
    """Uniform membership-query view over the set types in this package.

    ``membership_fn`` maps an (N, dim) array to an (N,) boolean array.
    ``resolution`` is 0.0 when membership is exact and the grid spacing of the
    underlying discretization otherwise.  ``source`` keeps the concrete object
    (PointSet, Ball, BallRegion, ArcRegion, ...) so queries can dispatch to
    exact backends when one exists.
    """

    membership_fn: Callable[[np.ndarray], np.ndarray]
    bounding_box: Box
    dim: int
    norm: NormSpec
    resolution: float = 0.0
    source: object = None

    def membership(self, X) -> np.ndarray | bool:
        out = self.membership_fn(_as_points(X))
        return bool(out[0]) if np.asarray(X).ndim == 1 else np.asarray(out, dtype=bool)

    def sample_points(self, h: float | None = None) -> np.ndarray:
        """Representative points of the set at resolution ``h``.

        Point sets return their own points.  Everything else returns the
        membership-filtered grid of the bounding box (cached per spacing); an
        empty filter raises :class:`EmptyRegionError` tagged with the
        resolution used.
        """
        if isinstance(self.source, PointSet):
            return self.source.points
        box = self.bounding_box
        if h is None:
            h = max(box.diameter, 1e-9) / 512.0
        cache = self.__dict__.setdefault("_samples_cache", {})
        if h in cache:
            return cache[h]
        grid = box.grid_points(h)
        keep = self.membership_fn(grid)
        pts = grid[np.asarray(keep, dtype=bool)]
        if len(pts) == 0:
            raise EmptyRegionError(f"set is empty at resolution h={h:g}", resolution=h)
        cache[h] = pts
        return pts

    @classmethod
    def from_points(cls, ps: PointSet, ns: NormSpec, match_tol: float = 0.0) -> "SetOracle":
        pts = ps.points

        def member(X):
            vals, _ = nearest_values(pts, X, ns)
            return vals <= match_tol + 1e-12

        return cls(member, ps.bounding_box(), ps.dim, ns, 0.0, ps)

    @classmethod
    def from_ball(cls, b: Ball, ns: NormSpec) -> "SetOracle":
        def member(X):
            return np.atleast_1d(ns.eval(X - b.center)) <= b.radius

        box = Box(b.center - b.radius, b.center + b.radius)
        return cls(member, box, b.dim, ns, 0.0, b)

    @classmethod
    def from_ball_region(cls, region: BallRegion) -> "SetOracle":
        def member(X):
            return np.atleast_1d(region.membership(X))

        return cls(member, region.bounding_box(), region.dim, region.norm, 0.0, region)

    @classmethod
    def from_predicate(cls, fn, box: Box, ns: NormSpec, resolution: float = 0.0, source=None) -> "SetOracle":
        return cls(fn, box, box.dim, ns, resolution, source)


# ---------------------------------------------------------------------------
# Query dispatchers
# ---------------------------------------------------------------------------

def _as_oracle(S) -> SetOracle:
    """Accept a SetOracle or a concrete set type and return an oracle view."""
    if isinstance(S, SetOracle):
        return S
    if isinstance(S, BallRegion):
        return SetOracle.from_ball_region(S)
    from .arcs import ArcRegion
    if isinstance(S, ArcRegion):
        return S.as_oracle()
    raise TypeError(f"expected SetOracle, BallRegion, or ArcRegion, got {type(S).__name__}")


def nearest_distance(S: SetOracle, x, h: float | None = None) -> float:
    """min over the set of ||x - .||.

    Exact for point sets, balls, and Euclidean-2D ball regions; otherwise the
    minimum over membership-filtered samples at resolution ``h`` (error at
    most about 2h for this Lipschitz-1 quantity; the oracle records the
    resolution it carries).  An empty set raises :class:`EmptyRegionError`
    rather than silently returning zero.
    """
    from .arcs import ArcRegion, build_arc_region

    S = _as_oracle(S)
    xv = np.asarray(x, dtype=float)
    src = S.source
    if isinstance(src, PointSet):
        vals, _ = nearest_values(src.points, xv, S.norm)
        return float(vals[0])
    if isinstance(src, Ball):
        return max(0.0, float(S.norm.eval(xv - src.center)) - src.radius)
    if isinstance(src, BallRegion) and src.norm.kind == "euclidean" and src.dim == 2:
        src = build_arc_region(src)
    if isinstance(src, ArcRegion):
        return float(src.nearest_batch(xv)[0])
    pts = S.sample_points(h)
    vals, _ = nearest_values(pts, xv, S.norm)
    return float(vals[0])


def support_function(S: SetOracle, u, h: float | None = None) -> float:
    """sup over the set of <., u>.

    Exact for point sets, balls (support = <c,u> + r*||u||_*), and
    Euclidean-2D ball regions via their arc boundary; otherwise the max over
    membership-filtered grid samples, with error at most ||u||_2 * h * sqrt(n).
    """
    from .arcs import ArcRegion, build_arc_region

    S = _as_oracle(S)
    uv = np.asarray(u, dtype=float)
    src = S.source
    if isinstance(src, PointSet):
        return float(np.max(src.points @ uv))
    if isinstance(src, Ball):
        return float(np.dot(src.center, uv)) + src.radius * float(S.norm.dual_eval(uv))
    if isinstance(src, BallRegion) and src.norm.kind == "euclidean" and src.dim == 2:
        src = build_arc_region(src)
    if isinstance(src, ArcRegion):
        return float(src.support_batch(uv)[0])
    pts = S.sample_points(h)
    return float(np.max(pts @ uv))


def farthest_distance_region(S, x, h: float | None = None) -> float:
    """max over a ball-intersection region of ||x - .||.

    Euclidean 2D is exact: the max over the arc boundary is attained at a
    vertex or at the antipodal point of an arc (skipped when x coincides with
    that arc's center, where the endpoints already suffice).  Other norms fall
    back to a membership-filtered grid max with error at most 2h.
    """
    from .arcs import ArcRegion, build_arc_region

    xv = np.asarray(x, dtype=float)
    src = S.source if isinstance(S, SetOracle) else S
    if isinstance(src, BallRegion) and src.norm.kind == "euclidean" and src.dim == 2:
        src = build_arc_region(src)
    if isinstance(src, ArcRegion):
        return float(src.farthest_batch(xv)[0])
    if isinstance(src, BallRegion):
        box = src.bounding_box()
        if h is None:
            h = max(box.diameter, 1e-9) / 512.0
        grid = box.grid_points(h)
        keep = np.atleast_1d(src.membership(grid))
        pts = grid[keep]
        if len(pts) == 0:
            raise EmptyRegionError(f"region is empty at resolution h={h:g}", resolution=h)
        vals, _ = farthest_values(pts, xv, src.norm)
        return float(vals[0])
    if isinstance(S, SetOracle):
        pts = S.sample_points(h)
        vals, _ = farthest_values(pts, xv, S.norm)
        return float(vals[0])
    raise TypeError(f"unsupported region type {type(S).__name__}")
