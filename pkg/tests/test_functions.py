import numpy as np
import pytest

from ballhull.errors import EmptyRegionError
from ballhull.norms import NormSpec
from ballhull.functions import (
    GridFunction,
    alpha_convexity_gap,
    certify_farthest,
    check_condition_a,
    check_condition_b,
    condition_a_tolerance,
    eta,
    farthest_field,
    farthest_over_sublevel,
    fenchel_conjugate,
    find_negative_alpha_gap,
    gamma_recover,
    transform_fR,
)
from ballhull.sets import (
    Ball,
    BallRegion,
    Box,
    PointSet,
    SetOracle,
    farthest_values,
)

E2 = NormSpec.euclidean(2)


def norm2(X):
    return np.sqrt(np.sum(np.asarray(X, float) ** 2, axis=-1))


def field(fn, half=4.0, h=1.0 / 16.0, ns=E2):
    box = Box([-half] * 2, [half] * 2)
    return GridFunction.from_callable(box, h, fn, ns)


# ---------------------------------------------------------------------------
# GridFunction basics
# ---------------------------------------------------------------------------

def test_grid_cover_must_be_exact():
    with pytest.raises(ValueError, match="integer multiple"):
        GridFunction(Box([0, 0], [1, 1]), 0.3, np.zeros((4, 4)), E2)


def test_grid_rejects_nan_inf():
    with pytest.raises(ValueError):
        GridFunction(Box([0, 0], [1, 1]), 0.5, np.full((3, 3), np.nan), E2)
    with pytest.raises(ValueError):
        GridFunction(Box([0, 0], [1, 1]), 0.5, np.full((3, 3), np.inf), E2)


def test_eval_interpolates_and_rejects_outside():
    f = field(norm2)
    assert f.eval([1.0, 0.0]) == pytest.approx(1.0)
    assert f.eval([1.0 / 32, 0.0]) == pytest.approx(0.5 * (0.0 + 1.0 / 16), abs=1e-12)
    with pytest.raises(ValueError, match="outside"):
        f.eval([5.0, 0.0])


def test_eval_lipschitz_extend():
    f = field(norm2)
    f.extend_mode = "lipschitz-extend"
    assert f.eval([5.0, 0.0]) == pytest.approx(f.eval([4.0, 0.0]) + 1.0)


# ---------------------------------------------------------------------------
# Fenchel conjugate
# ---------------------------------------------------------------------------

def test_conjugate_of_half_square_norm_is_itself():
    h = 1.0 / 32
    f = GridFunction.from_callable(Box([-2, -2], [2, 2]), h, lambda X: 0.5 * norm2(X) ** 2, E2)
    g = fenchel_conjugate(f, Box([-1, -1], [1, 1]), 1.0 / 16)
    pts = g.grid_points()
    err = np.abs(g.flat_values() - 0.5 * norm2(pts) ** 2)
    assert np.max(err) <= h * h  # interior truncation error is O(h^2)


def test_conjugate_of_norm_is_truncated_indicator():
    f = field(norm2)
    g = fenchel_conjugate(f, Box([-2, -2], [2, 2]), 1.0 / 8)
    pts = g.grid_points()
    dn = norm2(pts)
    inside = dn <= 1.0
    assert np.max(np.abs(g.flat_values()[inside])) <= 1e-12
    # outside the dual ball the truncated value grows like (||y|| - 1) * box radius
    y = np.array([2.0, 0.0])
    assert eta_like_direct(f, y) == pytest.approx((2.0 - 1.0) * 4.0)


def eta_like_direct(f, y):
    return float(np.max(f.grid_points() @ y - f.flat_values()))


def test_conjugate_constant_shift():
    # conjugate of ||.|| + 1 equals -1 on the dual unit ball
    f = field(lambda X: norm2(X) + 1.0)
    g = fenchel_conjugate(f, Box([-1, -1], [1, 1]), 1.0 / 8)
    pts = g.grid_points()
    on_ball = norm2(pts) <= 1.0
    assert np.max(np.abs(g.flat_values()[on_ball] - (-1.0))) <= 1e-12
    assert g.eval([0.0, 0.0]) == pytest.approx(-1.0)


def test_conjugate_monotone():
    f = field(norm2)
    g = field(lambda X: norm2(X) + 0.5)
    fstar = fenchel_conjugate(f, Box([-1, -1], [1, 1]), 1.0 / 8)
    gstar = fenchel_conjugate(g, Box([-1, -1], [1, 1]), 1.0 / 8)
    assert np.all(fstar.flat_values() >= gstar.flat_values() - 1e-12)


def test_fenchel_young_on_grid_pairs():
    f = field(norm2, half=2.0, h=1.0 / 8)
    fstar = fenchel_conjugate(f, Box([-1, -1], [1, 1]), 1.0 / 4)
    rng = np.random.default_rng(0)
    X = f.grid_points()[rng.integers(0, len(f.grid_points()), 200)]
    Y = fstar.grid_points()[rng.integers(0, len(fstar.grid_points()), 200)]
    lhs = f.eval(X) + fstar.eval(Y)
    rhs = np.sum(X * Y, axis=1)
    assert np.all(lhs >= rhs - 1e-9)


# ---------------------------------------------------------------------------
# eta
# ---------------------------------------------------------------------------

def test_eta_examples():
    f = field(lambda X: norm2(X) + 1.0)
    assert eta(f, [3, 4]) == pytest.approx(-5.0)
    assert eta(f, [0, 0]) == 0.0


def test_eta_positive_homogeneity_exact():
    f = field(lambda X: norm2(X) + 0.3)
    u = np.array([0.7, -0.4])
    for t in (0.5, 2.0, 7.5):
        assert eta(f, t * u) == pytest.approx(t * eta(f, u), rel=1e-12)


def test_eta_matches_direct_sup_oracle():
    C = PointSet([[0.0, 0.0], [2.0, 0.0]])
    f = farthest_field(SetOracle.from_points(C, E2), Box([-4, -4], [4, 4]), 1.0 / 16, E2)
    xstar = np.array([1.0, 0.0])
    # oracle: ||y|| * max over grid of <x, y/||y||> - f(x)
    got = eta(f, xstar)
    dual_len = float(norm2(xstar))
    oracle = dual_len * float(np.max(f.grid_points() @ (xstar / dual_len) - f.flat_values()))
    assert got == pytest.approx(oracle, abs=1e-12)


# ---------------------------------------------------------------------------
# condition (a): subgradient meets the dual sphere
# ---------------------------------------------------------------------------

def test_condition_a_on_norm():
    f = field(norm2, half=2.0, h=1.0 / 32)
    est = check_condition_a(f, np.array([[1.0, 0.0]]), k=64)
    assert abs(est[0] - 1.0) <= condition_a_tolerance(f.h, 4 * f.h)


def test_condition_a_fails_at_smooth_minimum():
    f = GridFunction.from_callable(Box([-2, -2], [2, 2]), 1.0 / 32, lambda X: 0.5 * norm2(X) ** 2, E2)
    est = check_condition_a(f, np.array([[0.0, 0.0]]), k=64)
    assert est[0] <= 0.1


def test_condition_a_farthest_function_against_exact_differences():
    rng = np.random.default_rng(6)
    C = rng.uniform(-0.5, 0.5, size=(3, 2))
    eps = 0.05
    dirs = np.stack([np.cos(2 * np.pi * np.arange(64) / 64),
                     np.sin(2 * np.pi * np.arange(64) / 64)], axis=1)
    probes = rng.uniform(-2, 2, size=(100, 2))
    # Exact farthest values; independent of any grid.
    base, _ = farthest_values(C, probes, E2)
    best = np.full(100, -np.inf)
    for d in dirs:
        stepped, _ = farthest_values(C, probes + eps * d, E2)
        best = np.maximum(best, (stepped - base) / eps)
    assert np.all(best <= 1.0 + 1e-12)
    assert np.all(best >= 1.0 - 2 * eps)


def test_condition_a_probes_outside_box_shrunk_with_warning():
    f = field(norm2, half=2.0, h=1.0 / 16)
    with pytest.warns(UserWarning, match="shrunk"):
        check_condition_a(f, np.array([[2.0, 2.0]]), k=8)


# ---------------------------------------------------------------------------
# condition (b): concavity of eta
# ---------------------------------------------------------------------------

def test_condition_b_norm_shift_concave():
    f = field(lambda X: norm2(X) + 1.0)
    worst = check_condition_b(f, pair_count=4000, seed=0)
    assert worst >= -1e-9


def test_condition_b_segment_farthest_function():
    C = PointSet([[0.0, 0.0], [1.0, 0.0]])
    f = farthest_field(SetOracle.from_points(C, E2), Box([-5, -5], [5, 5]), 10.0 / 128, E2)
    worst = check_condition_b(f, pair_count=10000, seed=1)
    assert worst >= -2 * f.h


# ---------------------------------------------------------------------------
# center-set recovery
# ---------------------------------------------------------------------------

def test_gamma_of_norm_is_origin():
    f = field(norm2)
    pts = gamma_recover(f).sample_points(f.h)
    assert len(pts) == 1 and np.allclose(pts[0], [0, 0])


def test_gamma_of_shifted_norm_is_unit_ball():
    f = field(lambda X: norm2(X) + 1.0)
    pts = gamma_recover(f).sample_points(f.h)
    d = norm2(pts)
    assert np.max(d) <= 1.0 + f.h
    # covers the ball: its extreme coordinate reaches 1 within a spacing
    assert np.max(pts[:, 0]) >= 1.0 - f.h


def test_gamma_of_infeasible_function_empty():
    f = field(lambda X: norm2(X) - 0.1)
    with pytest.raises(EmptyRegionError):
        gamma_recover(f).sample_points(f.h)


def test_gamma_roundtrip_recovers_farthest_function():
    rng = np.random.default_rng(2)
    C = PointSet(rng.uniform(-0.8, 0.8, size=(5, 2)))
    f = farthest_field(SetOracle.from_points(C, E2), Box([-5, -5], [5, 5]), 10.0 / 128, E2)
    pts = gamma_recover(f).sample_points(f.h)
    fg, _ = farthest_values(pts, f.grid_points(), E2)
    assert np.max(np.abs(fg - f.flat_values())) <= 4 * f.h


# ---------------------------------------------------------------------------
# the sublevel farthest transform
# ---------------------------------------------------------------------------

def test_transform_norm_example():
    f = field(norm2)
    assert farthest_over_sublevel(f, 1.0, [2.0, 0.0]) == pytest.approx(3.0, abs=2 * f.h)
    fr = transform_fR(f, 1.0)
    err = np.abs(fr.flat_values() - (norm2(fr.grid_points()) + 1.0))
    assert np.max(err) <= 2 * f.h


def test_transform_shifted_norm():
    f = field(lambda X: norm2(X) + 0.3)
    fr = transform_fR(f, 1.0)
    err = np.abs(fr.flat_values() - (norm2(fr.grid_points()) + 0.7))
    assert np.max(err) <= 2 * f.h


def test_transform_involution_on_norm_shifts():
    for r, R in ((0.0, 1.0), (0.3, 1.0), (0.5, 2.0)):
        f = field(lambda X: norm2(X) + r)
        frr = transform_fR(transform_fR(f, R), R)
        assert np.max(np.abs(frr.flat_values() - f.flat_values())) <= 4 * f.h


def test_transform_monotone_in_R():
    f = field(norm2)
    f1 = transform_fR(f, 0.5)
    f2 = transform_fR(f, 1.5)
    assert np.all(f1.flat_values() <= f2.flat_values() + 1e-12)


def test_transform_empty_sublevel_error_names_R_and_min():
    f = field(lambda X: norm2(X) + 5.0)
    with pytest.raises(EmptyRegionError, match="min f"):
        transform_fR(f, 1.0)


def test_farthest_over_sublevel_matches_exact_region_farthest():
    # f = F of lens generators; the transform at R reproduces F of the hull.
    from ballhull.polarity import strong_hull
    C = PointSet([[0.0, 0.0], [1.0, 0.0]])
    f = farthest_field(SetOracle.from_points(C, E2), Box([-4, -4], [4, 4]), 1.0 / 32, E2)
    H = strong_hull(C, 1.0, E2)
    for x in ([2.0, 0.5], [-1.0, 1.0], [0.5, 0.0]):
        lhs = farthest_over_sublevel(f, 1.0, x)
        rhs = float(H.polar.farthest_batch(np.asarray(x))[0])
        assert abs(lhs - rhs) <= 2 * f.h


def test_farthest_over_sublevel_inside_point():
    f = field(norm2)
    assert farthest_over_sublevel(f, 1.0, [0.0, 0.0]) == pytest.approx(1.0, abs=f.h)


def test_transform_gap_bounded_by_R_for_strongly_convex_source():
    # f = F of an intersection of radius-R balls; sup|f_R - f| <= R + 4h.
    rng = np.random.default_rng(11)
    R = 1.2
    region = BallRegion(PointSet(rng.uniform(-0.4, 0.4, size=(5, 2))), R, E2)
    h = 1.0 / 16
    f = farthest_field(SetOracle.from_ball_region(region), Box([-4, -4], [4, 4]), h, E2)
    fr = transform_fR(f, R)
    assert np.max(np.abs(fr.flat_values() - f.flat_values())) <= R + 4 * h


# ---------------------------------------------------------------------------
# alpha-convexity
# ---------------------------------------------------------------------------

def test_alpha_gap_norm_fails_on_ray():
    f = field(norm2)
    gap = alpha_convexity_gap(f, [1.0, 0.0], [3.0, 0.0], 0.5, 0.01)
    assert gap == pytest.approx(-0.01, abs=1e-9)


def test_alpha_gap_half_square_norm_zero_at_exact_modulus():
    f = field(lambda X: 0.5 * norm2(X) ** 2)
    # grid-aligned triple: all three evaluations are exact table entries
    gap = alpha_convexity_gap(f, [1.0, 0.0], [2.0, 0.0], 0.5, 0.5)
    assert abs(gap) <= 1e-12


def test_negative_gap_search_farthest_function():
    rng = np.random.default_rng(3)
    C = PointSet(rng.uniform(-1, 1, size=(4, 2)))
    h = 24.0 / 256
    f = farthest_field(SetOracle.from_points(C, E2), Box([-12, -12], [12, 12]), h, E2)
    best, witness = find_negative_alpha_gap(f, alpha=0.01, min_length=10.0, samples=10000, seed=0)
    assert witness is not None and best < -1e-9
    # witness is re-runnable through the public gap operation
    gap = alpha_convexity_gap(f, witness["x"], witness["y"], witness["lam"], 0.01)
    assert gap == pytest.approx(best, abs=1e-12)


def test_no_negative_gap_for_exact_modulus_parabola():
    h = 24.0 / 256
    f = GridFunction.from_callable(Box([-12, -12], [12, 12]), h, lambda X: 0.5 * norm2(X) ** 2, E2)
    best, witness = find_negative_alpha_gap(f, alpha=0.5, min_length=0.0, samples=10000, seed=1)
    assert witness is None


# ---------------------------------------------------------------------------
# farthest fields
# ---------------------------------------------------------------------------

def test_farthest_field_singleton_is_norm():
    f = farthest_field(SetOracle.from_points(PointSet([[0.0, 0.0]]), E2), Box([-2, -2], [2, 2]), 0.25, E2)
    assert np.allclose(f.flat_values(), norm2(f.grid_points()))


def test_farthest_field_ball():
    f = farthest_field(SetOracle.from_ball(Ball([0.0, 0.0], 1.0), E2), Box([-2, -2], [2, 2]), 0.25, E2)
    assert np.allclose(f.flat_values(), norm2(f.grid_points()) + 1.0)


def test_farthest_field_lens_matches_exact_queries():
    region = BallRegion(PointSet([[0.0, 0.0], [1.0, 0.0]]), 1.0, E2)
    f = farthest_field(SetOracle.from_ball_region(region), Box([-2, -2], [3, 3]), 0.25, E2)
    from ballhull.arcs import build_arc_region
    A = build_arc_region(region)
    assert np.max(np.abs(f.flat_values() - A.farthest_batch(f.grid_points()))) <= 1e-9


def test_farthest_field_lipschitz_across_neighbors():
    rng = np.random.default_rng(4)
    C = PointSet(rng.uniform(-1, 1, size=(6, 2)))
    f = farthest_field(SetOracle.from_points(C, E2), Box([-3, -3], [3, 3]), 0.125, E2)
    dx = np.abs(np.diff(f.values, axis=0))
    dy = np.abs(np.diff(f.values, axis=1))
    assert max(dx.max(), dy.max()) <= f.h * (1 + 1e-9)


# ---------------------------------------------------------------------------
# the full certificate
# ---------------------------------------------------------------------------

def test_certificate_passes_for_farthest_function():
    rng = np.random.default_rng(7)
    C = PointSet(rng.uniform(-0.8, 0.8, size=(4, 2)))
    f = farthest_field(SetOracle.from_points(C, E2), Box([-5, -5], [5, 5]), 10.0 / 128, E2)
    cert = certify_farthest(f, probe_count=50, pair_count=4000, seed=0)
    assert cert.passed()
    assert np.all(cert.cond_a <= 1.0 + cert.cond_a_tol)


def test_certificate_fails_for_parabola():
    f = GridFunction.from_callable(Box([-2, -2], [2, 2]), 1.0 / 32, lambda X: 0.5 * norm2(X) ** 2, E2)
    est = check_condition_a(f, np.array([[0.0, 0.0]]), k=64)
    assert est[0] <= 0.1  # condition (a) fails at the smooth minimum
