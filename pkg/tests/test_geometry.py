import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlsh.geometry import (
    DomainError,
    HalfSpacePoint,
    HyperboloidPoint,
    PoincarePoint,
    distance_halfspace,
    distance_hyperboloid,
    distance_poincare,
    halfspace_to_hyperboloid,
    halfspace_to_poincare,
    hyperboloid_to_halfspace,
    hyperboloid_to_poincare,
    minkowski_dot,
    mobius_add,
    pairwise_distances_poincare,
    point_at_distance,
    poincare_norm,
    poincare_to_halfspace,
    poincare_to_hyperboloid,
    stable_arccosh1p,
)

# values from 30-digit mpmath
LN3 = 1.0986122886681098
LN199 = 5.293304824724492
ACOSH_1_5 = 0.9624236501192069
ACOSH_3 = 1.762747174039086


def test_origin_to_half():
    assert distance_poincare([0.0, 0.0], [0.5, 0.0]) == pytest.approx(LN3, rel=1e-15)


def test_origin_to_near_boundary():
    assert distance_poincare([0.0, 0.0], [0.99, 0.0]) == pytest.approx(LN199, rel=1e-14)


def test_halfspace_unit_shift():
    assert distance_halfspace([1.0, 0.0], [1.0, 1.0]) == pytest.approx(ACOSH_1_5, rel=1e-15)


def test_halfspace_vertical():
    # heights 1 and e are at distance 1
    assert distance_halfspace([1.0, 0.0], [math.e, 0.0]) == pytest.approx(1.0, rel=1e-15)


def test_hyperboloid_distance():
    a = np.array([1.0, 0.0, 0.0])
    b = np.array([3.0, math.sqrt(8.0), 0.0])
    assert distance_hyperboloid(a, b) == pytest.approx(ACOSH_3, rel=1e-15)


def test_self_distance_zero():
    assert distance_poincare([0.3, -0.2], [0.3, -0.2]) == 0.0


def test_halfspace_base_point_maps_to_origin():
    np.testing.assert_allclose(halfspace_to_poincare([1.0, 0.0, 0.0]), [0.0, 0.0, 0.0], atol=1e-16)


def test_halfspace_to_ball_oracle():
    # (z, x) = (2, 0.5): (2x, 1 - x^2 - z^2) / (x^2 + (1 + z)^2)
    np.testing.assert_allclose(halfspace_to_poincare([2.0, 0.5]), [4.0 / 37.0, -13.0 / 37.0], rtol=1e-15)


def test_stable_arccosh_small_argument():
    w = 1e-12
    assert stable_arccosh1p(w) == pytest.approx(math.sqrt(2e-12) * (1 - w / 12), rel=1e-15)


def test_stable_arccosh_matches_half_angle_identity():
    # arccosh(1 + w) = 2 asinh(sqrt(w / 2)), free of cancellation
    w = np.array([1e-7, 1e-6, 0.1, 1.0, 100.0])
    np.testing.assert_allclose(stable_arccosh1p(w), 2.0 * np.arcsinh(np.sqrt(w / 2.0)), rtol=1e-14)


def test_stable_arccosh_rejects_negative():
    with pytest.raises(DomainError):
        stable_arccosh1p(-1e-3)


def test_boundary_point_rejected():
    with pytest.raises(DomainError):
        distance_poincare([0.0, 0.0], [1.0, 0.0])
    with pytest.raises(DomainError):
        PoincarePoint(np.array([0.6, 0.8]))


def test_nonpositive_height_rejected():
    with pytest.raises(DomainError):
        HalfSpacePoint(0.0, np.array([1.0]))
    with pytest.raises(DomainError):
        distance_halfspace([-1.0, 0.0], [1.0, 0.0])


def test_off_sheet_hyperboloid_rejected():
    with pytest.raises(DomainError):
        HyperboloidPoint(np.array([2.0, 0.0, 0.0]))


def test_point_types_as_arrays():
    p = HalfSpacePoint(2.0, np.array([0.5, -1.0]))
    np.testing.assert_array_equal(np.asarray(p), [2.0, 0.5, -1.0])
    np.testing.assert_array_equal(np.asarray(HalfSpacePoint.from_array([2.0, 0.5, -1.0])), np.asarray(p))
    assert p.dim == 3
    h = HyperboloidPoint(poincare_to_hyperboloid([0.1, 0.2]))
    assert h.dim == 2


def test_poincare_norm():
    assert poincare_norm([0.5, 0.0]) == pytest.approx(LN3, rel=1e-15)


def test_pairwise_distances_match_direct():
    rng = np.random.default_rng(0)
    for d in (2, 20):
        u = rng.uniform(-1, 1, (30, d))
        u *= 0.9 * rng.random((30, 1)) / np.linalg.norm(u, axis=1, keepdims=True)
        full = pairwise_distances_poincare(u)
        i, j = np.triu_indices(30, 1)
        np.testing.assert_allclose(full[i, j], distance_poincare(u[i], u[j]), rtol=1e-9, atol=1e-12)


def test_point_at_distance():
    rng = np.random.default_rng(1)
    p = np.array([[0.3, 0.4], [-0.9, 0.1]])
    q = point_at_distance(p, [0.2, 1.5], rng)
    np.testing.assert_allclose(distance_poincare(p, q), [0.2, 1.5], rtol=1e-10)


def test_mobius_add_origin_identity():
    np.testing.assert_allclose(mobius_add([0.0, 0.0], [0.3, 0.1]), [0.3, 0.1])
    np.testing.assert_allclose(mobius_add([0.3, 0.1], [0.0, 0.0]), [0.3, 0.1])


# -- properties ---------------------------------------------------------

coord = st.floats(-1.0, 1.0, allow_nan=False)


def _ball(vals, shrink):
    v = np.array(vals)
    n = np.linalg.norm(v)
    return v if n == 0 else v / n * shrink


ball_pt = st.builds(_ball, st.lists(coord, min_size=3, max_size=3), st.floats(0.0, 0.95))


@settings(max_examples=300, deadline=None)
@given(ball_pt, ball_pt)
def test_models_agree(u, v):
    d = distance_poincare(u, v)
    dh = distance_halfspace(poincare_to_halfspace(u), poincare_to_halfspace(v))
    dq = distance_hyperboloid(poincare_to_hyperboloid(u), poincare_to_hyperboloid(v))
    assert dh == pytest.approx(d, rel=1e-8, abs=1e-9)
    assert dq == pytest.approx(d, rel=1e-8, abs=1e-9)


@settings(max_examples=300, deadline=None)
@given(ball_pt)
def test_round_trips(u):
    np.testing.assert_allclose(halfspace_to_poincare(poincare_to_halfspace(u)), u, atol=1e-12)
    np.testing.assert_allclose(hyperboloid_to_poincare(poincare_to_hyperboloid(u)), u, atol=1e-12)
    p = poincare_to_halfspace(u)
    np.testing.assert_allclose(hyperboloid_to_halfspace(halfspace_to_hyperboloid(p)), p, rtol=1e-9)


@settings(max_examples=300, deadline=None)
@given(ball_pt)
def test_hyperboloid_lift_on_sheet(u):
    x = poincare_to_hyperboloid(u)
    assert minkowski_dot(x, x) == pytest.approx(-1.0, abs=1e-9 * x[0] ** 2)
    assert x[0] >= 1.0


@settings(max_examples=300, deadline=None)
@given(ball_pt, ball_pt, ball_pt)
def test_triangle_inequality_and_symmetry(u, v, w):
    duv, dvw, duw = distance_poincare(u, v), distance_poincare(v, w), distance_poincare(u, w)
    assert duv == distance_poincare(v, u)
    assert duw <= duv + dvw + 1e-9


@settings(max_examples=200, deadline=None)
@given(ball_pt, ball_pt, ball_pt)
def test_mobius_add_is_isometry(p, u, v):
    pu, pv = mobius_add(p, u), mobius_add(p, v)
    if max(np.linalg.norm(pu), np.linalg.norm(pv)) > 1 - 1e-6:
        return
    assert distance_poincare(pu, pv) == pytest.approx(distance_poincare(u, v), rel=1e-6, abs=1e-8)
