"""Seeded property-verification suites with budgeted tolerances.

Every suite runs seeded random instances, measures a worst-case error for its
property, and passes iff that error stays within a budget of the form
k*h + eps (k documented per suite).  Reports are deterministic given
(seed, config): instances derive their seeds from the suite seed, and
aggregation is order-independent.  BALLHULL_THREADS > 1 evaluates instances
in a thread pool; results are still merged in instance order.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .arcs import ArcRegion, build_arc_region
from .errors import EmptyRegionError
from .functions import (
    GridFunction,
    certify_farthest,
    farthest_field,
    farthest_over_sublevel,
    find_negative_alpha_gap,
    transform_fR,
)
from .norms import NormSpec
from .polarity import (
    is_strongly_convex,
    polar,
    polar_region,
    sigma_convexity_check,
    strong_hull,
    support_sum_check,
)
from .scenes import generate_instance
from .sets import Ball, BallRegion, Box, PointSet, SetOracle, farthest_values

REPORT_SCHEMA = "ballhull-report/1"


def _sanitize(x):
    if isinstance(x, float):
        return "inf" if abs(x) >= 1e299 else x
    if isinstance(x, (np.floating, np.integer)):
        return _sanitize(float(x))
    if isinstance(x, dict):
        return {k: _sanitize(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_sanitize(v) for v in x]
    if isinstance(x, np.ndarray):
        return _sanitize(x.tolist())
    return x


@dataclass
class VerificationReport:
    property: str
    instances: int
    seed: int
    h: float
    tolerance: float
    budget_desc: str
    max_error: float
    passed: bool
    per_instance: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    schema: str = REPORT_SCHEMA

    def to_json(self) -> dict:
        return _sanitize({
            "schema": self.schema,
            "property": self.property,
            "instances": self.instances,
            "seed": self.seed,
            "h": self.h,
            "tolerance": self.tolerance,
            "budget": self.budget_desc,
            "max_error": self.max_error,
            "passed": self.passed,
            "per_instance": self.per_instance,
            "witnesses": self.witnesses,
            "extra": self.extra,
        })

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def _instance_seed(seed: int, i: int) -> int:
    return (seed * 1_000_003 + i) % (2 ** 31 - 1)


def _uniform_probes(box: Box, n: int, rng) -> np.ndarray:
    return box.lo + (box.hi - box.lo) * rng.random((n, box.dim))


def _hull_points(iseed: int, ns: NormSpec, count=None, R=None) -> tuple[PointSet, float]:
    rng = np.random.default_rng(iseed)
    k = int(count if count is not None else rng.integers(3, 13))
    scene = generate_instance("hull", iseed, dim=ns.dim, count=k, norm=ns,
                              radius_range=(0.8, 1.6), R=R)
    return scene.sets[0], scene.R


def _region_instance(iseed: int, ns: NormSpec) -> BallRegion:
    C, R = _hull_points(iseed, ns, count=3 + iseed % 6)
    return BallRegion(C, R, ns)


def _polar_samples(C: PointSet, R: float, ns: NormSpec, h: float) -> np.ndarray:
    """Grid discretization of the polar: all grid points y with F_C(y) <= R."""
    region = polar(C, R, ns)
    box = region.bounding_box()
    grid = box.grid_points(h)
    vals = region.farthest_to_generators(grid)
    pts = grid[vals <= R]
    if len(pts) == 0:
        raise EmptyRegionError(f"polar empty at resolution h={h:g}", resolution=h)
    return pts


def _level_distance(C: PointSet, R: float, ns: NormSpec, Y: np.ndarray) -> np.ndarray:
    """|F_C(y) - R|, the distance of probes to the polar's level boundary."""
    vals, _ = farthest_values(C.points, Y, ns)
    return np.abs(vals - R)


# ---------------------------------------------------------------------------
# Polarity calculus suites
# ---------------------------------------------------------------------------

def _suite_ordrev(iseed, h, ns, params):
    rng = np.random.default_rng(iseed)
    C, R = _hull_points(iseed, ns)
    extra = C.bounding_box(margin=0.2).lo + 0.4 * rng.random((3, ns.dim))
    D = PointSet(np.vstack([C.points, extra]))
    probes = _uniform_probes(D.bounding_box(margin=R * 1.2), params.get("probes", 10000), rng)
    fD, _ = farthest_values(D.points, probes, ns)
    fC, _ = farthest_values(C.points, probes, ns)
    # C subset of D forces F_C <= F_D, so polar(D) subset of polar(C) exactly.
    inside_D = fD <= R
    worst = float(np.max(np.where(inside_D, np.maximum(fC - R, 0.0), 0.0), initial=0.0))
    return {"error": worst, "witnesses": []}


def _suite_incl(iseed, h, ns, params):
    C, R = _hull_points(iseed, ns)
    hull = strong_hull(C, R, ns, h=h)
    if hull.whole_space:
        return {"error": 0.0, "witnesses": []}
    if isinstance(hull.region, ArcRegion):
        margins = hull.region.membership_margin(C.points)
    else:
        margins = hull.region.farthest_to_generators(C.points) - R
    worst = float(np.max(np.maximum(margins, 0.0), initial=0.0))
    return {"error": worst, "witnesses": []}


def _membership_chain_error(memberships_a, memberships_b, level_dist):
    """Worst level distance among disagreeing probes (0 when none disagree)."""
    diff = memberships_a != memberships_b
    return float(np.max(level_dist[diff], initial=0.0)), int(np.sum(diff))


def _suite_triple(iseed, h, ns, params):
    rng = np.random.default_rng(iseed)
    C, R = _hull_points(iseed, ns)
    probes = _uniform_probes(C.bounding_box(margin=R * 1.3), params.get("probes", 10000), rng)
    lvl = _level_distance(C, R, ns, probes)
    fC, _ = farthest_values(C.points, probes, ns)
    in_polar_C = fC <= R
    if ns.kind == "euclidean" and ns.dim == 2:
        # Polar of the hull is the R-sublevel of the hull's farthest function.
        hull_region = polar_region(build_arc_region(polar(C, R, ns)), R)
        in_polar_hull = hull_region.farthest_batch(probes) <= R
        err, n = _membership_chain_error(in_polar_C, np.asarray(in_polar_hull), lvl)
    else:
        hull = strong_hull(C, R, ns, backend="grid", h=h)
        hull_samples = hull.region.bounding_box().grid_points(h)
        hull_pts = hull_samples[np.atleast_1d(hull.region.membership(hull_samples))]
        fH, _ = farthest_values(hull_pts, probes, ns)
        err, n = _membership_chain_error(in_polar_C, fH <= R, lvl)
    return {"error": err, "witnesses": [], "extra": {"disagreements": n}}


def _suite_hull_idem(iseed, h, ns, params):
    rng = np.random.default_rng(iseed)
    C, R = _hull_points(iseed, ns)
    probes = _uniform_probes(C.bounding_box(margin=R * 1.3), params.get("probes", 10000), rng)
    if ns.kind == "euclidean" and ns.dim == 2:
        H1 = strong_hull(C, R, ns).region
        H2 = polar_region(polar_region(H1, R), R)
        m1 = np.atleast_1d(H1.membership(probes))
        m2 = np.atleast_1d(H2.membership(probes))
        lvl = np.abs(H1.farthest_batch(probes) - R) if H1.kind == "region" else np.ones(len(probes))
        err, n = _membership_chain_error(m1, m2, lvl)
    else:
        H1 = strong_hull(C, R, ns, backend="grid", h=h)
        box = H1.region.bounding_box()
        pts1 = box.grid_points(h)
        inside1 = np.atleast_1d(H1.region.membership(pts1))
        H2 = strong_hull(PointSet(pts1[inside1]), R, ns, backend="grid", h=h)
        m1 = np.atleast_1d(H1.region.membership(probes))
        m2 = np.atleast_1d(H2.region.membership(probes))
        lvl = np.abs(H1.region.farthest_to_generators(probes) - R)
        err, n = _membership_chain_error(m1, m2, lvl)
    return {"error": err, "witnesses": [], "extra": {"disagreements": n}}


def _suite_involution(iseed, h, ns, params):
    rng = np.random.default_rng(iseed)
    C, R = _hull_points(iseed, ns)
    probes = _uniform_probes(C.bounding_box(margin=R * 1.3), params.get("probes", 10000), rng)
    S = polar(C, R, ns)
    m1 = np.atleast_1d(S.membership(probes))
    lvl = _level_distance(C, R, ns, probes)
    if ns.kind == "euclidean" and ns.dim == 2:
        T = polar_region(polar_region(build_arc_region(S), R), R)
        m2 = np.atleast_1d(T.membership(probes))
    else:
        pol1 = _polar_samples(C, R, ns, h)              # samples of S = polar(C)
        hull_pts = _polar_samples(PointSet(pol1), R, ns, h)  # samples of polar(S)
        fH, _ = farthest_values(hull_pts, probes, ns)
        m2 = fH <= R                                    # membership in polar(polar(S))
    err, n = _membership_chain_error(m1, m2, lvl)
    return {"error": err, "witnesses": [], "extra": {"disagreements": n}}


def _suite_ball_polar(iseed, h, ns, params):
    if ns.kind != "euclidean" or ns.dim != 2:
        raise ValueError("ball-polar suite is Euclidean-2D")
    rng = np.random.default_rng(iseed)
    c = rng.uniform(-0.5, 0.5, size=2)
    r = rng.uniform(0.3, 1.0)
    n_samp = params.get("boundary_samples", 64)
    ang = 2 * np.pi * np.arange(n_samp) / n_samp
    C = PointSet(c + r * np.stack([np.cos(ang), np.sin(ang)], axis=1))
    worst = 0.0
    witnesses = []

    R_gt = r * rng.uniform(1.05, 2.0)
    A = build_arc_region(polar(C, R_gt, ns))
    ang720 = 2 * np.pi * np.arange(720) / 720
    U = np.stack([np.cos(ang720), np.sin(ang720)], axis=1)
    dev = np.abs(A.support_batch(U) - (U @ c + (R_gt - r)))
    worst = max(worst, float(np.max(dev)))

    R_lt = r * rng.uniform(0.2, 0.9)
    A_lt = build_arc_region(polar(C, R_lt, ns))
    if not A_lt.is_empty:
        worst = math.inf
        witnesses.append({"case": "R<r not empty", "r": r, "R": R_lt})

    A_eq = build_arc_region(polar(C, r, ns))
    if A_eq.is_empty:
        worst = math.inf
        witnesses.append({"case": "R=r empty", "r": r})
    else:
        diam = A_eq.diameter_upper_bound() if A_eq.kind != "point" else 0.0
        worst = max(worst, diam)
    return {"error": worst, "witnesses": witnesses}


def _suite_ub_farthest(iseed, h, ns, params):
    S = _region_instance(iseed, ns)
    A = build_arc_region(S)
    Apol = polar_region(A)
    box = S.bounding_box().expand(S.radius)
    n_side = params.get("grid_side", 256)
    probes = box.grid_points(box.diameter / (n_side * math.sqrt(2)))
    F = A.farthest_batch(probes)
    d = Apol.nearest_batch(probes)
    worst = float(np.max(F - d - S.radius))
    return {"error": worst, "witnesses": []}


def _suite_gap_bound(iseed, h, ns, params):
    S = _region_instance(iseed, ns)
    A = build_arc_region(S)
    Apol = polar_region(A)
    box = S.bounding_box().expand(S.radius)
    n_side = params.get("grid_side", 256)
    probes = box.grid_points(box.diameter / (n_side * math.sqrt(2)))
    gap = np.abs(Apol.farthest_batch(probes) - A.farthest_batch(probes))
    worst = float(np.max(gap) - S.radius)
    return {"error": worst, "witnesses": []}


def _field_of_region(S: BallRegion, h: float, margin: float) -> GridFunction:
    lo = S.bounding_box().lo - margin
    hi = S.bounding_box().hi + margin
    span = np.max(hi - lo)
    m = max(1, int(math.ceil(span / h)))
    box = Box(lo, lo + m * h)
    return farthest_field(SetOracle.from_ball_region(S), box, h, S.norm)


def _suite_farth_polar(iseed, h, ns, params):
    rng = np.random.default_rng(iseed)
    S = _region_instance(iseed, ns)
    A = build_arc_region(S)
    Apol = polar_region(A)
    f = _field_of_region(S, h, margin=S.radius * 1.1)
    probes = _uniform_probes(f.box.expand(-2 * h), params.get("probes", 40), rng)
    worst = 0.0
    for x in probes:
        lhs = float(Apol.farthest_batch(x)[0])
        rhs = farthest_over_sublevel(f, S.radius, x)
        worst = max(worst, abs(lhs - rhs))
    return {"error": worst, "witnesses": []}


def _suite_funct_eq(iseed, h, ns, params):
    rng = np.random.default_rng(iseed)
    S = _region_instance(iseed, ns)
    A = build_arc_region(S)
    f = _field_of_region(S, h, margin=S.radius * 1.1)
    # Sublevel samples of F_S, then the polar of those samples, both from the grid.
    Y = f.sublevel_points(S.radius)
    grid = f.grid_points()
    fY, _ = farthest_values(Y, grid, ns)
    W = grid[fY <= S.radius]
    probes = _uniform_probes(f.box.expand(-2 * h), params.get("probes", 100), rng)
    lhs = A.farthest_batch(probes)
    rhs, _ = farthest_values(W, probes, ns)
    err = np.abs(lhs - rhs)
    inside = np.atleast_1d(A.membership(probes))
    worst = float(np.max(err))
    extra = {
        "max_error_inside": float(np.max(err[inside], initial=0.0)),
        "max_error_outside": float(np.max(err[~inside], initial=0.0)),
        "probes_inside": int(np.sum(inside)),
        "probes_outside": int(np.sum(~inside)),
    }
    return {"error": worst, "witnesses": [], "extra": extra}


def _suite_support_sum(iseed, h, ns, params):
    rng = np.random.default_rng(iseed)
    if iseed % 3 == 0:
        c = rng.uniform(-0.5, 0.5, size=2)
        r = rng.uniform(0.2, 0.8)
        R = r + rng.uniform(0.2, 1.0)
        oracle = SetOracle.from_ball(Ball(c, r), ns)
    else:
        S = _region_instance(iseed, ns)
        R = S.radius
        oracle = SetOracle.from_ball_region(S)
    dev = support_sum_check(oracle, R, directions=params.get("directions", 360), h=h)
    return {"error": float(dev), "witnesses": []}


def _suite_sigma_convex(iseed, h, ns, params):
    S = _region_instance(iseed, ns)
    ok, worst = sigma_convexity_check(SetOracle.from_ball_region(S), S.radius,
                                      segments=params.get("segments", 400), seed=iseed, h=h)
    return {"error": float(worst), "witnesses": []}


def _suite_char_farthest(iseed, h, ns, params):
    rng = np.random.default_rng(iseed)
    k = int(rng.integers(3, 9))
    C = PointSet(rng.uniform(-0.8, 0.8, size=(k, ns.dim)))
    half = params.get("box_half", 5.0)
    box = Box(-half * np.ones(ns.dim), half * np.ones(ns.dim))
    f = farthest_field(SetOracle.from_points(C, ns), box, h, ns)
    cert = certify_farthest(
        f,
        probe_count=params.get("probes", 100),
        pair_count=params.get("pairs", 10000),
        seed=iseed,
    )
    slack_a = float(np.max(np.abs(cert.cond_a - 1.0)) - cert.cond_a_tol)
    slack_b = float(-cert.cond_b_worst_gap - 2.0 * h)
    slack_rt = float(cert.roundtrip_error - 4.0 * h)
    worst = max(slack_a, slack_b, slack_rt)
    extra = {
        "cond_a_max_defect": float(np.max(np.abs(cert.cond_a - 1.0))),
        "cond_a_tol": cert.cond_a_tol,
        "cond_b_worst_gap": cert.cond_b_worst_gap,
        "roundtrip_error": cert.roundtrip_error,
    }
    return {"error": worst, "witnesses": [], "extra": extra}


def _suite_fr_involution(iseed, h, ns, params):
    cases = [(0.0, 1.0), (0.3, 1.0), (0.5, 2.0)]
    r, R = cases[iseed % len(cases)]
    half = params.get("box_half", 4.0)
    box = Box(-half * np.ones(ns.dim), half * np.ones(ns.dim))
    f = GridFunction.from_callable(box, h, lambda X: np.atleast_1d(ns.eval(X)) + r, ns)
    fR = transform_fR(f, R)
    target = np.atleast_1d(ns.eval(fR.grid_points())) + (R - r)
    err1 = float(np.max(np.abs(fR.flat_values() - target)))
    fRR = transform_fR(fR, R)
    err2 = float(np.max(np.abs(fRR.flat_values() - f.flat_values())))
    worst = max(err1, 0.5 * err2)
    return {"error": worst, "witnesses": [], "extra": {"shift_error": err1, "roundtrip_error": err2, "r": r, "R": R}}


def _suite_no_strong_convexity(iseed, h, ns, params):
    rng = np.random.default_rng(iseed)
    k = int(rng.integers(2, 7))
    C = PointSet(rng.uniform(-1.0, 1.0, size=(k, ns.dim)))
    half = params.get("box_half", 12.0)
    m = int(round(2 * half / h))
    box = Box(-half * np.ones(ns.dim), -half + m * h * np.ones(ns.dim))
    f = farthest_field(SetOracle.from_points(C, ns), box, h, ns)
    best, witness = find_negative_alpha_gap(
        f, alpha=params.get("alpha", 0.01),
        min_length=params.get("min_length", 10.0),
        samples=params.get("samples", 10000), seed=iseed)
    return {"error": float(best), "witnesses": [witness] if witness else []}


def _suite_sublevel_sc(iseed, h, ns, params):
    rng = np.random.default_rng(iseed)
    k = int(rng.integers(3, 9))
    C = PointSet(rng.uniform(-1.0, 1.0, size=(k, ns.dim)))
    from .sets import min_enclosing_circle
    _, rstar = min_enclosing_circle(C.points)
    worst = 0.0
    witnesses = []
    for mult in params.get("R_multipliers", (1.1, 1.6, 3.0)):
        R = rstar * mult
        S = SetOracle.from_ball_region(polar(C, R, ns))
        ok, report = is_strongly_convex(S, R, ns, seed=iseed, probe_count=params.get("probes", 20000))
        worst = max(worst, float(report["witness_count"]))
        if not ok:
            witnesses.append({"R": R, "report": {k2: v for k2, v in report.items() if k2 != "witnesses"},
                              "first_witnesses": report["witnesses"][:3]})
    return {"error": worst, "witnesses": witnesses}


# ---------------------------------------------------------------------------
# Registry and runner
# ---------------------------------------------------------------------------

def _budget(name: str, h: float) -> tuple[float, str]:
    table = {
        "ordrev": (1e-9, "exact membership comparison; 0*h + 1e-9"),
        "incl": (1e-9, "exact hull membership margin; 0*h + 1e-9"),
        "triple": (None, "2*h + 1e-9 (1e-9 with the exact2d backend)"),
        "hull-idem": (None, "2*h + 1e-9 (1e-9 with the exact2d backend)"),
        "involution": (None, "2*h + 1e-9 (1e-9 with the exact2d backend)"),
        "ball-polar": (None, "2*h on support deviation / empty / diameter"),
        "ub-farthest": (None, "2*h slack on F <= d_polar + R"),
        "gap-bound": (None, "4*h slack on sup|F_polar - F| <= R"),
        "farth-polar": (None, "4*h on |F_polar(x) - max over sublevel| (grid sublevel undersamples hull corners by ~h/sin(tip angle/2))"),
        "funct-eq": (None, "4*h on the farthest/sublevel identity (same hull-corner sampling factor)"),
        "support-sum": (None, "2*h + 1e-6 on the Minkowski support identity"),
        "sigma-convex": (1e-9, "midpoint convexity violation of R||.|| - sigma; 1e-9"),
        "char-farthest": (0.0, "certificate slacks (cond-a within tol_a, cond-b >= -2h, roundtrip <= 4h)"),
        "fR-involution": (None, "max(shift error, roundtrip error / 2) <= 2*h"),
        "no-strong-convexity": (-1e-9, "negative alpha-gap witness required (max best gap <= -1e-9)"),
        "sublevel-sc": (0.0, "out-of-band witness count must be zero"),
    }
    tol, desc = table[name]
    if tol is None:
        base = {"triple": 2 * h + 1e-9, "hull-idem": 2 * h + 1e-9, "involution": 2 * h + 1e-9,
                "ball-polar": 2 * h, "ub-farthest": 2 * h, "gap-bound": 4 * h,
                "farth-polar": 2 * h, "funct-eq": 2 * h, "support-sum": 2 * h + 1e-6,
                "fR-involution": 2 * h}[name]
        tol = base
    return tol, desc


SUITES = {
    "ordrev": _suite_ordrev,
    "incl": _suite_incl,
    "triple": _suite_triple,
    "hull-idem": _suite_hull_idem,
    "involution": _suite_involution,
    "ball-polar": _suite_ball_polar,
    "ub-farthest": _suite_ub_farthest,
    "gap-bound": _suite_gap_bound,
    "farth-polar": _suite_farth_polar,
    "funct-eq": _suite_funct_eq,
    "support-sum": _suite_support_sum,
    "sigma-convex": _suite_sigma_convex,
    "char-farthest": _suite_char_farthest,
    "fR-involution": _suite_fr_involution,
    "no-strong-convexity": _suite_no_strong_convexity,
    "sublevel-sc": _suite_sublevel_sc,
}

_DEFAULT_H = {
    "char-farthest": 10.0 / 128.0,
    "fR-involution": 1.0 / 16.0,
    "no-strong-convexity": 24.0 / 256.0,
}


def run_suite(
    name: str,
    instances: int = 10,
    seed: int = 0,
    h: float | None = None,
    norm: NormSpec | str = "euclidean",
    dim: int = 2,
    tolerance: float | None = None,
    **params,
) -> VerificationReport:
    """Run a named suite and aggregate a deterministic report.

    Unknown names raise ValueError (the CLI maps this to a usage error).
    """
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}")
    ns = norm if isinstance(norm, NormSpec) else NormSpec(norm, dim)
    if h is None:
        h = _DEFAULT_H.get(name, 0.02)
    tol, desc = _budget(name, h)
    if tolerance is not None:
        tol = tolerance
    fn = SUITES[name]

    def one(i):
        iseed = _instance_seed(seed, i)
        out = fn(iseed, h, ns, params)
        out["seed"] = iseed
        return out

    threads = int(os.environ.get("BALLHULL_THREADS", "1") or "1")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(instances)))
    else:
        results = [one(i) for i in range(instances)]

    per_instance = [{"seed": r["seed"], "error": r["error"]} for r in results]
    witnesses = []
    extra = {}
    for r in results:
        for w in r.get("witnesses", []):
            witnesses.append({"instance_seed": r["seed"], **w})
        if r.get("extra"):
            extra[str(r["seed"])] = r["extra"]
    max_error = max((r["error"] for r in results), default=0.0)
    passed = max_error <= tol and all(math.isfinite(r["error"]) for r in results)
    if name == "no-strong-convexity":
        passed = max_error <= tol
    return VerificationReport(
        property=name,
        instances=instances,
        seed=seed,
        h=h,
        tolerance=tol,
        budget_desc=desc,
        max_error=float(max_error),
        passed=bool(passed),
        per_instance=per_instance,
        witnesses=witnesses,
        extra=extra,
    )
