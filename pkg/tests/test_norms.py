import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ballhull.norms import (
    DirectionSet,
    NormSpec,
    dual_norm_eval,
    norm_eval,
    pairing,
    unit_sphere_samples,
)

ALL_NORMS = [
    NormSpec.euclidean(2),
    NormSpec.l1(2),
    NormSpec.linf(2),
    NormSpec.lp(3.0, 2),
    NormSpec.lp(1.5, 3),
]


def test_norm_eval_examples():
    assert norm_eval(NormSpec.euclidean(2), [3, 4]) == pytest.approx(5.0)
    assert norm_eval(NormSpec.l1(2), [3, -4]) == pytest.approx(7.0)
    assert norm_eval(NormSpec.lp(3.0, 2), [1, 1]) == pytest.approx(2.0 ** (1.0 / 3.0))


def test_dual_norm_examples():
    assert dual_norm_eval(NormSpec.l1(2), [3, -4]) == pytest.approx(4.0)
    assert dual_norm_eval(NormSpec.euclidean(2), [3, 4]) == pytest.approx(5.0)
    # Conjugate exponent of p=3 is q=3/2.
    assert dual_norm_eval(NormSpec.lp(3.0, 2), [1, 1]) == pytest.approx(2.0 ** (2.0 / 3.0))


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError, match="dimension mismatch"):
        norm_eval(NormSpec.euclidean(2), [1, 2, 3])


def test_invalid_specs_rejected():
    with pytest.raises(ValueError):
        NormSpec("l3", 2)
    with pytest.raises(ValueError):
        NormSpec.lp(1.0, 2)
    with pytest.raises(ValueError):
        NormSpec("euclidean", 2, p=2.0)
    with pytest.raises(ValueError):
        NormSpec("euclidean", 0)


@pytest.mark.parametrize("ns", ALL_NORMS, ids=str)
def test_norm_axioms_random(ns):
    rng = np.random.default_rng(5)
    X = rng.standard_normal((200, ns.dim))
    Y = rng.standard_normal((200, ns.dim))
    a = rng.standard_normal(200)
    nx, ny = ns.eval(X), ns.eval(Y)
    assert np.all(nx >= 0)
    assert np.allclose(ns.eval(a[:, None] * X), np.abs(a) * nx, atol=1e-12)
    assert np.all(ns.eval(X + Y) <= nx + ny + 1e-12)
    assert ns.eval(np.zeros(ns.dim)) == 0.0


@pytest.mark.parametrize("ns", ALL_NORMS, ids=str)
def test_holder_pairing(ns):
    rng = np.random.default_rng(7)
    X = rng.standard_normal((10000, ns.dim))
    Y = rng.standard_normal((10000, ns.dim))
    lhs = np.sum(X * Y, axis=1)
    rhs = ns.eval(X) * ns.dual_eval(Y)
    assert np.all(lhs <= rhs + 1e-12)


@pytest.mark.parametrize("ns", [NormSpec.euclidean(2), NormSpec.l1(2), NormSpec.lp(3.0, 2)], ids=str)
def test_bidual_reproduces_norm(ns):
    # Maximizing <x, d> over dual-unit directions recovers ||x||.
    dirs = unit_sphere_samples(ns, "dual", 720).directions
    rng = np.random.default_rng(11)
    X = rng.standard_normal((50, 2))
    approx = np.max(X @ dirs.T, axis=1)
    assert np.max(np.abs(approx - ns.eval(X))) <= 1e-3


@given(x=st.lists(st.floats(-50, 50), min_size=2, max_size=2),
       y=st.lists(st.floats(-50, 50), min_size=2, max_size=2))
@settings(max_examples=200, deadline=None)
def test_triangle_inequality_hypothesis(x, y):
    for ns in (NormSpec.euclidean(2), NormSpec.l1(2), NormSpec.lp(2.5, 2)):
        assert ns.eval(np.add(x, y)) <= ns.eval(x) + ns.eval(y) + 1e-9


def test_systematic_samples_euclidean_quarter_turns():
    d = unit_sphere_samples(NormSpec.euclidean(2), "primal", 4).directions
    expect = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float)
    assert np.allclose(d, expect, atol=1e-12)


def test_systematic_samples_linf_on_square():
    d = unit_sphere_samples(NormSpec.linf(2), "primal", 4).directions
    assert np.allclose(np.max(np.abs(d), axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("ns", ALL_NORMS, ids=str)
@pytest.mark.parametrize("which", ["primal", "dual"])
def test_samples_are_unit(ns, which):
    ds = unit_sphere_samples(ns, which, 37, seed=3)
    target = ns if which == "primal" else ns.dual()
    assert np.max(np.abs(target.eval(ds.directions) - 1.0)) <= 1e-12


def test_random_samples_deterministic_and_higher_dim():
    ns = NormSpec.lp(2.5, 5)
    a = unit_sphere_samples(ns, "primal", 16, seed=9)
    b = unit_sphere_samples(ns, "primal", 16, seed=9)
    assert np.array_equal(a.directions, b.directions)
    with pytest.raises(ValueError):
        unit_sphere_samples(ns, "primal", 4, mode="systematic")


def test_systematic_samples_dims_one_and_three():
    d1 = unit_sphere_samples(NormSpec.euclidean(1), "primal", 4).directions
    assert np.array_equal(d1, [[1.0], [-1.0], [1.0], [-1.0]])
    d3 = unit_sphere_samples(NormSpec.euclidean(3), "primal", 100).directions
    assert np.max(np.abs(np.sqrt(np.sum(d3 * d3, axis=1)) - 1.0)) <= 1e-12
    # evenly spread: every strict octant is hit
    signs = {tuple(np.sign(v).astype(int)) for v in d3 if np.all(v != 0)}
    assert len(signs) == 8


def test_direction_set_rejects_non_unit():
    ns = NormSpec.euclidean(2)
    with pytest.raises(ValueError, match="unit"):
        DirectionSet(np.array([[2.0, 0.0]]), "primal", ns)


def test_json_round_trip():
    for ns in ALL_NORMS:
        d = json.loads(json.dumps(ns.to_json()))
        assert NormSpec.from_json(d) == ns
    assert NormSpec.lp(3.0, 2).to_json() == {"kind": "lp", "dim": 2, "p": 3.0}
    assert NormSpec.euclidean(2).to_json() == {"kind": "euclidean", "dim": 2}


def test_pairing_is_dot_product():
    assert pairing([1, 2], [3, -1]) == pytest.approx(1.0)
