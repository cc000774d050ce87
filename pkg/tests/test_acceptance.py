"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Budgets are pinned here, not tuned at runtime: geometric tolerances are
k*h + eps with the k stated per check, exact backends get absolute bands.
Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion lines.
"""

import math
import time

import numpy as np
import pytest

from ballhull.functions import (
    GridFunction,
    check_condition_a,
    find_negative_alpha_gap,
)
from ballhull.norms import NormSpec
from ballhull.polarity import polar, strong_hull
from ballhull.sets import Box, PointSet, farthest_values
from ballhull.suites import run_suite

E2 = NormSpec.euclidean(2)
L1 = NormSpec.l1(2)


def report(num, name, passed, detail):
    line = f"ACCEPTANCE {num:02d} {name}: {'PASS' if passed else 'FAIL'} ({detail})"
    print(line)
    assert passed, line


def test_criterion_01_ball_polar_law():
    h = 0.01
    t0 = time.time()
    rep = run_suite("ball-polar", instances=50, seed=101, h=h)
    dt = time.time() - t0
    ok = rep.passed and rep.max_error <= 2 * h and dt < 30.0
    report(1, "ball-polar-law", ok,
           f"max_err={rep.max_error:.3e} <= 2h={2*h:.3e}, 50 instances in {dt:.1f}s")


def test_criterion_02_polarity_calculus():
    h = 0.02
    details = []
    ok = True
    for ns, label, band in ((E2, "euclidean", 1e-9), (L1, "l1", 2 * h)):
        for name in ("ordrev", "incl", "triple", "hull-idem", "involution"):
            rep = run_suite(name, instances=10, seed=202, h=h, norm=ns, probes=10000)
            good = rep.max_error <= band + 1e-12
            ok = ok and good
            details.append(f"{label}/{name}={rep.max_error:.2e}")
    report(2, "polarity-calculus", ok,
           "bands: exact2d 1e-9, grid 2h; " + ", ".join(details))


def test_criterion_03_hull_example():
    C = PointSet([[0.0, 0.0], [1.0, 0.0]])
    H = strong_hull(C, 1.0, E2)
    inside = bool(H.membership(np.array([0.5, 0.13])))
    outside = not bool(H.membership(np.array([0.5, 0.14])))

    lo, hi = 0.0, 0.5
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if H.membership(np.array([0.5, mid])):
            lo = mid
        else:
            hi = mid
    exact_threshold = 1.0 - math.sqrt(3) / 2
    thr_ok = abs(lo - exact_threshold) <= 1e-9

    # independent grid oracle at h = 0.002: double-polar membership
    h = 0.002
    region = polar(C, 1.0, E2)
    grid = region.bounding_box().grid_points(h)
    P = grid[region.farthest_to_generators(grid) <= 1.0]
    ys = np.arange(0.10, 0.20, 1e-4)
    probes = np.stack([np.full_like(ys, 0.5), ys], axis=1)
    vals, _ = farthest_values(P, probes, E2)
    inside_oracle = vals <= 1.0
    grid_thr = ys[np.nonzero(~inside_oracle)[0][0]] if np.any(~inside_oracle) else ys[-1]
    grid_ok = abs(grid_thr - exact_threshold) <= 2 * h

    ok = inside and outside and thr_ok and grid_ok
    report(3, "hull-example", ok,
           f"contains(0.5,0.13)={inside}, excludes(0.5,0.14)={outside}, "
           f"threshold={lo:.12f} vs {exact_threshold:.12f}, grid_thr={grid_thr:.4f}")


def test_criterion_04_farthest_gap_bounds():
    h = 0.01
    rep_ub = run_suite("ub-farthest", instances=50, seed=404, h=h, grid_side=256)
    rep_gap = run_suite("gap-bound", instances=50, seed=404, h=h, grid_side=256)
    ok = rep_ub.max_error <= 2 * h and rep_gap.max_error <= 4 * h
    report(4, "farthest-gap-bounds", ok,
           f"ub slack={rep_ub.max_error:.3e} <= {2*h}, gap slack={rep_gap.max_error:.3e} <= {4*h}")


def test_criterion_05_support_sum_identity():
    h = 0.01
    rep = run_suite("support-sum", instances=25, seed=505, h=h, directions=360)
    ok = rep.max_error <= 2 * h + 1e-6
    report(5, "support-sum-identity", ok, f"max_dev={rep.max_error:.3e} <= 2h+1e-6={2*h+1e-6:.3e}")


def test_criterion_06_function_transform():
    h = 1.0 / 16
    box = Box([-4.0, -4.0], [4.0, 4.0])
    worst_shift = 0.0
    worst_rt = 0.0
    from ballhull.functions import transform_fR
    for r, R in ((0.0, 1.0), (0.3, 1.0), (0.5, 2.0)):
        f = GridFunction.from_callable(box, h, lambda X, rr=r: np.sqrt(np.sum(X * X, axis=1)) + rr, E2)
        fR = transform_fR(f, R)
        target = np.sqrt(np.sum(fR.grid_points() ** 2, axis=1)) + (R - r)
        worst_shift = max(worst_shift, float(np.max(np.abs(fR.flat_values() - target))))
        fRR = transform_fR(fR, R)
        worst_rt = max(worst_rt, float(np.max(np.abs(fRR.flat_values() - f.flat_values()))))
    ok = worst_shift <= 2 * h and worst_rt <= 4 * h
    report(6, "function-transform", ok,
           f"sup|f_R-shift|={worst_shift:.4f} <= {2*h}, sup|f_RR-f|={worst_rt:.4f} <= {4*h}")


def test_criterion_07_characterization_certificate():
    h = 10.0 / 128
    rep = run_suite("char-farthest", instances=20, seed=707, h=h, probes=100, pairs=10000)
    # slacks <= 0 mean: cond-a within tol_a, eta gap >= -2h, roundtrip <= 4h
    cert_ok = rep.max_error <= 0.0

    f2 = GridFunction.from_callable(Box([-2.0, -2.0], [2.0, 2.0]), 1.0 / 32,
                                    lambda X: 0.5 * np.sum(X * X, axis=1), E2)
    est0 = check_condition_a(f2, np.array([[0.0, 0.0]]), k=64)
    parabola_ok = est0[0] <= 0.1

    ok = cert_ok and parabola_ok
    report(7, "characterization-certificate", ok,
           f"worst slack={rep.max_error:.3e} <= 0 over 20 instances; "
           f"parabola cond-a at 0: {est0[0]:.4f} <= 0.1")


def test_criterion_08_no_lipschitz_strong_convexity():
    rep = run_suite("no-strong-convexity", instances=10, seed=808,
                    alpha=0.01, min_length=10.0, samples=10000)
    witnesses_ok = rep.passed  # every instance produced a strictly negative gap

    h = 24.0 / 256
    f = GridFunction.from_callable(Box([-12.0, -12.0], [12.0, 12.0]), h,
                                   lambda X: 0.5 * np.sum(X * X, axis=1), E2)
    best, witness = find_negative_alpha_gap(f, alpha=0.5, min_length=0.0, samples=10000, seed=5)
    parabola_ok = witness is None

    ok = witnesses_ok and parabola_ok
    report(8, "no-lipschitz-strong-convexity", ok,
           f"all 10 farthest instances found gap <= {rep.max_error:.3e}; "
           f"exact-modulus parabola best gap {best:.2e} (no witness: {parabola_ok})")


def test_criterion_09_sublevel_strong_convexity():
    rep = run_suite("sublevel-sc", instances=20, seed=909, R_multipliers=(1.1, 1.6, 3.0))
    ok = rep.passed and rep.max_error == 0.0
    report(9, "sublevel-strong-convexity", ok,
           f"out-of-band witnesses={int(rep.max_error)} over 20 instances x 3 radii")


def test_criterion_10_performance():
    rng = np.random.default_rng(10)
    pts = PointSet(rng.uniform(-0.4, 0.4, size=(10000, 2)))
    t0 = time.time()
    region = polar(pts, 1.0, E2)
    hull = strong_hull(pts, 1.0, E2)
    assert not hull.whole_space
    assert bool(np.all(np.atleast_1d(hull.membership(pts.points[:100], band=1e-9))))
    t_hull = time.time() - t0

    t0 = time.time()
    rep = run_suite("gap-bound", instances=1, seed=1010, h=0.01, grid_side=512)
    t_grid = time.time() - t0

    ok = t_hull < 5.0 and t_grid < 10.0 and rep.passed
    report(10, "performance-sanity", ok,
           f"polar+hull of 1e4 generators: {t_hull:.2f}s < 5s; 512^2 suite instance: {t_grid:.2f}s < 10s")
