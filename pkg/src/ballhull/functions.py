"""Sampled convex-function machinery: conjugates, the homogenized conjugate
eta, farthest-function certificates, center-set recovery, and the sublevel
farthest transform.

All quantifiers over R^n are truncated to the grid box.  That is sound for
the operators here as long as the box contains a generous neighborhood of the
underlying compact set (binding points live within roughly R + diam of it);
the harness enforces the box choice, and the docstrings state the truncation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import EmptyRegionError
from .norms import NormSpec, unit_sphere_samples
from .sets import Ball, BallRegion, Box, PointSet, SetOracle, farthest_values

#: Sentinel standing in for +infinity in grids; anything >= 1e299 prints as "inf".
INF_SENTINEL = 1e300

_CHUNK_ELEMS = 4_000_000


@dataclass
class GridFunction:
    """A scalar field sampled on an axis-aligned grid.

    ``values`` has one axis per space dimension, index i along axis a
    corresponding to coordinate lo[a] + i*h.  The box must be covered exactly:
    (hi - lo)/h integral within 1e-9.  Values must be finite or the
    INF_SENTINEL (never NaN).  ``extend_mode`` controls evaluation outside the
    box: ``reject`` (default) raises, ``lipschitz-extend`` returns the value
    at the nearest box point plus the distance to it (only sensible for
    Lipschitz-1 fields; used by rendering).
    """

    box: Box
    h: float
    values: np.ndarray
    norm: NormSpec
    extend_mode: str = "reject"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        axes = self.box.grid_axes(self.h, strict=True)
        shape = tuple(len(a) for a in axes)
        if self.values.shape != shape:
            raise ValueError(f"values shape {self.values.shape} does not match the grid shape {shape}")
        if np.any(np.isnan(self.values)) or np.any(np.isinf(self.values)):
            raise ValueError("grid values must be finite; use INF_SENTINEL for indicator-style infinities")
        if self.extend_mode not in ("reject", "lipschitz-extend"):
            raise ValueError(f"unknown extend_mode {self.extend_mode!r}")
        self._axes = axes

    @classmethod
    def from_callable(cls, box: Box, h: float, fn, norm: NormSpec, extend_mode: str = "reject") -> "GridFunction":
        """Sample ``fn`` (taking an (N, d) batch, returning (N,)) on the grid."""
        pts = box.grid_points(h, strict=True)
        vals = np.asarray(fn(pts), dtype=float)
        shape = tuple(len(a) for a in box.grid_axes(h, strict=True))
        return cls(box, h, vals.reshape(shape), norm, extend_mode)

    @property
    def dim(self) -> int:
        return self.box.dim

    def grid_points(self) -> np.ndarray:
        mesh = np.meshgrid(*self._axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def flat_values(self) -> np.ndarray:
        return self.values.ravel()

    def min(self) -> float:
        return float(np.min(self.values))

    def argmin_point(self) -> np.ndarray:
        idx = np.unravel_index(int(np.argmin(self.values)), self.values.shape)
        return np.array([self._axes[a][idx[a]] for a in range(self.dim)])

    def sublevel_points(self, level: float) -> np.ndarray:
        """Grid points x with f(x) <= level (exact inequality, no band)."""
        return self.grid_points()[self.flat_values() <= level]

    def eval(self, X) -> float | np.ndarray:
        """Multilinear interpolation at arbitrary points (dims 1..3 in practice)."""
        single = np.asarray(X).ndim == 1
        pts = np.atleast_2d(np.asarray(X, dtype=float))
        lo, hi = self.box.lo, self.box.hi
        inside = np.all((pts >= lo - 1e-12) & (pts <= hi + 1e-12), axis=1)
        extra = np.zeros(len(pts))
        if not np.all(inside):
            if self.extend_mode == "reject":
                bad = pts[~inside][0]
                raise ValueError(f"point {bad.tolist()} lies outside the grid box")
            clipped = self.box.clip(pts)
            extra = np.where(inside, 0.0, np.atleast_1d(self.norm.eval(pts - clipped)))
            pts = clipped
        t = (pts - lo) / self.h
        cells = np.array(self.values.shape) - 1
        i0 = np.clip(np.floor(t).astype(int), 0, np.maximum(cells - 1, 0))
        w = t - i0
        out = np.zeros(len(pts))
        for corner in range(2 ** self.dim):
            idx = []
            wgt = np.ones(len(pts))
            for a in range(self.dim):
                bit = (corner >> a) & 1
                idx.append(np.minimum(i0[:, a] + bit, cells[a]))
                wgt = wgt * (w[:, a] if bit else 1.0 - w[:, a])
            out += wgt * self.values[tuple(idx)]
        out = out + extra
        return float(out[0]) if single else out


def _chunked_score_max(Xg: np.ndarray, fv: np.ndarray, Ys: np.ndarray, fscale: np.ndarray | None = None) -> np.ndarray:
    """max over grid x of <x, y> - s(y)*f(x) for each y, computed in chunks."""
    n = len(Ys)
    out = np.empty(n)
    step = max(1, _CHUNK_ELEMS // max(1, len(Xg)))
    for s in range(0, n, step):
        block = Ys[s:s + step] @ Xg.T
        if fscale is None:
            block -= fv[None, :]
        else:
            block -= fscale[s:s + step, None] * fv[None, :]
        out[s:s + step] = np.max(block, axis=1)
    return out


def fenchel_conjugate(f: GridFunction, dual_box: Box, dual_h: float) -> GridFunction:
    """Conjugate f*(y) = max over the grid of <x,y> - f(x), on a dual grid.

    The sup over R^n is truncated to f's grid, which underestimates the true
    conjugate by at most h*(||y||_2*sqrt(n)/2 + Lip(f)) near interior maxima
    and by the usual indicator truncation outside f's growth cone.  Pointwise
    monotone: f <= g implies f* >= g*.
    """
    if np.any(f.flat_values() >= 1e299):
        raise ValueError("fenchel_conjugate requires f finite on its box")
    Xg = f.grid_points()
    fv = f.flat_values()
    Ys = dual_box.grid_points(dual_h, strict=True)
    vals = _chunked_score_max(Xg, fv, Ys)
    shape = tuple(len(a) for a in dual_box.grid_axes(dual_h, strict=True))
    return GridFunction(dual_box, dual_h, vals.reshape(shape), f.norm)


def eta_batch(f: GridFunction, Xstar) -> np.ndarray:
    """Homogenized conjugate at a batch of dual points.

    eta(y) = ||y||_* f*(y / ||y||_*) for y != 0 and 0 at y = 0, with f*
    evaluated by direct maximization over f's grid at the normalized point,
    never by dual-grid interpolation.  Positive homogeneity is exact by
    construction.
    """
    Ys = np.atleast_2d(np.asarray(Xstar, dtype=float))
    dual = f.norm.dual()
    lens = np.atleast_1d(dual.eval(Ys))
    out = np.zeros(len(Ys))
    nz = lens > 0.0
    if np.any(nz):
        # ||y|| * max(<x, y/||y||> - f(x)) = max(<x, y> - ||y|| f(x))
        out[nz] = _chunked_score_max(f.grid_points(), f.flat_values(), Ys[nz], fscale=lens[nz])
    return out


def eta(f: GridFunction, xstar) -> float:
    return float(eta_batch(f, xstar)[0])


def condition_a_tolerance(h: float, eps: float) -> float:
    """Default certification band for the subgradient-sphere estimate.

    2*eps covers the curvature of the difference quotient, 2h/eps the grid
    interpolation error of two function evaluations.
    """
    return 2.0 * eps + 2.0 * h / eps


def check_condition_a(
    f: GridFunction,
    probes,
    k: int = 64,
    eps: float | None = None,
    seed: int = 0,
) -> np.ndarray:
    """Max directional difference quotient at each probe.

    For convex Lipschitz-1 f the sup over primal-unit directions d of
    f'(x; d) equals the largest dual norm over the subdifferential at x, so
    an estimate near 1 certifies that the subdifferential meets the dual unit
    sphere at that probe (and only at the probes; the estimate says nothing
    about unprobed points).  Probes that would step outside the box are
    shrunk onto it, with a warning.
    """
    if eps is None:
        eps = 4.0 * f.h
    dirs = unit_sphere_samples(f.norm, "primal", k, seed=seed).directions
    span = float(np.max(np.abs(dirs)))
    P = np.atleast_2d(np.asarray(probes, dtype=float))
    safe_lo = f.box.lo + eps * span
    safe_hi = f.box.hi - eps * span
    clipped = np.clip(P, safe_lo, safe_hi)
    if np.any(np.abs(clipped - P) > 0):
        warnings.warn("some probes were shrunk into the grid box to keep steps interior", stacklevel=2)
    base = f.eval(clipped)
    est = np.full(len(P), -np.inf)
    for d in dirs:
        est = np.maximum(est, (f.eval(clipped + eps * d) - base) / eps)
    return est


def check_condition_b(
    f: GridFunction,
    pair_count: int = 10000,
    seed: int = 0,
    scale: float = 1.0,
) -> float:
    """Worst midpoint-concavity gap of eta over random dual pairs.

    Each sampled pair (u, v) contributes eta((u+v)/2) - (eta(u)+eta(v))/2,
    positive where concavity holds; the minimum over pairs is returned, so a
    value >= -tol certifies concavity at the sampled triples.  By positive
    homogeneity the sampling scale is immaterial up to truncation effects.
    """
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((pair_count, f.dim)) * scale
    V = rng.standard_normal((pair_count, f.dim)) * scale
    stacked = np.vstack([U, V, 0.5 * (U + V)])
    vals = eta_batch(f, stacked)
    eu, ev, em = vals[:pair_count], vals[pair_count:2 * pair_count], vals[2 * pair_count:]
    gaps = em - 0.5 * (eu + ev)
    return float(np.min(gaps))


def gamma_recover(f: GridFunction, tol: float | None = None) -> SetOracle:
    """Center-set oracle: points c with ||x - c|| <= f(x) for all grid x.

    The universal quantifier is truncated to f's box (sound when the box
    dwarfs the candidate region, since the binding constraints for a center c
    are the far-away x).  ``tol`` is the allowed constraint slack; the default
    h/2 keeps the recovered set within half a spacing of the true one.
    Membership resolution is recorded on the oracle; an empty recovery
    surfaces as empty-at-resolution when sampled.
    """
    if tol is None:
        tol = 0.5 * f.h
    Xg = f.grid_points()
    fv = f.flat_values()
    ns = f.norm

    # Conservative prefilter: a center must satisfy the constraint at every
    # grid point, in particular at the box corners and the grid argmin, so
    # candidates violating one of those few constraints are excluded up front.
    corners = np.array(np.meshgrid(*zip(f.box.lo, f.box.hi), indexing="ij")).reshape(f.dim, -1).T
    pre_pts = np.vstack([corners, f.argmin_point()[None, :]])
    pre_vals = np.array([f.eval(p) for p in pre_pts])

    from .sets import _pair_norms

    def member(Cs):
        Cs = np.atleast_2d(np.asarray(Cs, dtype=float))
        out = np.zeros(len(Cs), dtype=bool)
        alive = np.max(_pair_norms(Cs, pre_pts, ns) - pre_vals[None, :], axis=1) <= tol
        idx = np.nonzero(alive)[0]
        step = max(1, _CHUNK_ELEMS // max(1, len(Xg)))
        for s in range(0, len(idx), step):
            sel = idx[s:s + step]
            d = _pair_norms(Cs[sel], Xg, ns)
            out[sel] = np.max(d - fv[None, :], axis=1) <= tol
        return out

    return SetOracle.from_predicate(member, f.box, ns, resolution=f.h, source=("gamma", f))


def _max_dist_to_sublevel(f: GridFunction, R: float, Y: np.ndarray) -> np.ndarray:
    sub = f.sublevel_points(R)
    if len(sub) == 0:
        raise EmptyRegionError(
            f"sublevel set {{f <= {R:g}}} is empty on the grid (min f = {f.min():.9g})",
            resolution=f.h,
        )
    vals, _ = farthest_values(sub, Y, f.norm)
    return vals


def transform_fR(f: GridFunction, R: float) -> GridFunction:
    """The sublevel farthest transform: f_R(y) = max{||y - x|| : f(x) <= R}.

    Computed over the grid sublevel set, on f's own grid.  The result is
    Lipschitz-1 and convex up to grid error, and monotone in R (larger R,
    larger sublevel set, pointwise larger transform).
    """
    vals = _max_dist_to_sublevel(f, R, f.grid_points())
    return GridFunction(f.box, f.h, vals.reshape(f.values.shape), f.norm, f.extend_mode)


def farthest_over_sublevel(f: GridFunction, R: float, y) -> float:
    """Single-point version of :func:`transform_fR` at y."""
    return float(_max_dist_to_sublevel(f, R, np.atleast_2d(np.asarray(y, float)))[0])


def alpha_convexity_gap(f: GridFunction, x, y, lam: float, alpha: float) -> float:
    """Quadratic convexity gap along a segment.

    Returns (1-lam) f(x) + lam f(y) - alpha lam (1-lam) ||x - y||_2^2
    - f((1-lam) x + lam y); nonnegative everywhere iff f is plausibly
    alpha-convex on the sampled triples.  The quadratic term always uses the
    Euclidean norm.
    """
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    mid = (1.0 - lam) * xv + lam * yv
    quad = alpha * lam * (1.0 - lam) * float(np.sum((xv - yv) ** 2))
    return (1.0 - lam) * f.eval(xv) + lam * f.eval(yv) - quad - f.eval(mid)


def find_negative_alpha_gap(
    f: GridFunction,
    alpha: float,
    min_length: float = 0.0,
    samples: int = 10000,
    seed: int = 0,
) -> tuple[float, dict | None]:
    """Search for an alpha-convexity violation on grid-aligned midpoint triples.

    Endpoints are grid nodes with even index differences so the lam = 1/2
    midpoint is also a node: all three values are table lookups, free of
    interpolation bias.  Returns the most negative gap seen and its witness
    (or None when every sampled gap is nonnegative up to 1e-9).
    """
    rng = np.random.default_rng(seed)
    shape = np.array(f.values.shape)
    best = np.inf
    witness = None
    min_steps = min_length / f.h
    found = 0
    for _ in range(samples):
        i = rng.integers(0, shape)
        j = rng.integers(0, shape)
        if np.any((i - j) % 2 != 0):
            j = j - ((j - i) % 2)
            if np.any(j < 0):
                continue
        step_len = float(np.sqrt(np.sum((i.astype(float) - j) ** 2)))
        if step_len < min_steps or step_len == 0.0:
            continue
        found += 1
        m = (i + j) // 2
        xv = f.box.lo + i * f.h
        yv = f.box.lo + j * f.h
        quad = alpha * 0.25 * float(np.sum((xv - yv) ** 2))
        gap = 0.5 * (f.values[tuple(i)] + f.values[tuple(j)]) - quad - f.values[tuple(m)]
        if gap < best:
            best = gap
            witness = {"x": xv.tolist(), "y": yv.tolist(), "lam": 0.5, "gap": float(gap)}
    if found == 0:
        raise ValueError(f"no grid segment of length >= {min_length} fits in the box")
    if best > -1e-9:
        return float(best), None
    return float(best), witness


def farthest_field(S, box: Box, h: float, norm: NormSpec | None = None) -> GridFunction:
    """Materialize the farthest-distance function of a set on a grid.

    Exact per node for point sets, balls, and Euclidean-2D regions (via the
    arc backend); resolution-bounded via set samples otherwise.
    """
    from .arcs import ArcRegion, build_arc_region

    src = S.source if isinstance(S, SetOracle) else S
    ns = norm or (S.norm if isinstance(S, SetOracle) else None)
    pts = box.grid_points(h, strict=True)
    if isinstance(src, PointSet):
        vals, _ = farthest_values(src.points, pts, ns)
    elif isinstance(src, Ball):
        vals = np.atleast_1d(ns.eval(pts - src.center)) + src.radius
    else:
        if isinstance(src, BallRegion) and src.norm.kind == "euclidean" and src.dim == 2:
            src = build_arc_region(src)
        if isinstance(src, ArcRegion):
            ns = ns or src.norm
            vals = src.farthest_batch(pts)
        elif isinstance(S, SetOracle):
            samples = S.sample_points(h)
            vals, _ = farthest_values(samples, pts, S.norm)
            ns = S.norm
        else:
            raise TypeError(f"unsupported set type {type(S).__name__}")
    shape = tuple(len(a) for a in box.grid_axes(h, strict=True))
    return GridFunction(box, h, np.asarray(vals).reshape(shape), ns)


@dataclass
class FarthestCertificate:
    """Evidence that a sampled function is the farthest-distance function of
    some compact convex set: subgradient-sphere estimates at the probes,
    the worst concavity gap of the homogenized conjugate, the recovered
    center set, and the reconstruction error of the farthest function it
    induces.  All statements are at the probe/grid resolution recorded here.
    """

    cond_a: np.ndarray
    cond_a_tol: float
    probes: np.ndarray
    cond_b_worst_gap: float
    cond_b_finite: bool
    gamma_set: SetOracle
    roundtrip_error: float
    h: float

    def passed(self, tol_b: float | None = None, roundtrip_tol: float | None = None) -> bool:
        tol_b = 2.0 * self.h if tol_b is None else tol_b
        roundtrip_tol = 4.0 * self.h if roundtrip_tol is None else roundtrip_tol
        ok_a = bool(np.all(np.abs(self.cond_a - 1.0) <= self.cond_a_tol))
        ok_b = self.cond_b_finite and self.cond_b_worst_gap >= -tol_b
        return ok_a and ok_b and self.roundtrip_error <= roundtrip_tol


def certify_farthest(
    f: GridFunction,
    probe_count: int = 100,
    k_dirs: int = 64,
    pair_count: int = 10000,
    seed: int = 0,
    eps: float | None = None,
) -> FarthestCertificate:
    """Run the full farthest-function characterization battery on f."""
    if eps is None:
        eps = 4.0 * f.h
    rng = np.random.default_rng(seed)
    lo, hi = f.box.lo, f.box.hi
    margin = eps * 2.0
    probes = lo + margin + (hi - lo - 2 * margin) * rng.random((probe_count, f.dim))
    est = check_condition_a(f, probes, k=k_dirs, eps=eps, seed=seed)
    worst_gap = check_condition_b(f, pair_count=pair_count, seed=seed)
    gamma = gamma_recover(f)
    try:
        centers = gamma.sample_points(f.h)
        fg, _ = farthest_values(centers, f.grid_points(), f.norm)
        roundtrip = float(np.max(np.abs(fg - f.flat_values())))
    except EmptyRegionError:
        roundtrip = math.inf
    return FarthestCertificate(
        cond_a=est,
        cond_a_tol=condition_a_tolerance(f.h, eps),
        probes=probes,
        cond_b_worst_gap=worst_gap,
        cond_b_finite=bool(abs(worst_gap) < 1e299),
        gamma_set=gamma,
        roundtrip_error=roundtrip,
        h=f.h,
    )
