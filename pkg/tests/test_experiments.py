import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from hyperlsh.experiments import (
    CSV_COLUMNS,
    ExperimentConfig,
    InsufficientPairs,
    PairStatistics,
    RadialLaw,
    RhoEstimate,
    boundary_pair_experiment,
    csv_rows,
    estimate_p1_p2,
    generate_dataset,
    rho_curve,
    rho_from_probabilities,
    sample_uniform_ball,
    separation_counts,
    to_csv,
)
from hyperlsh.geometry import DomainError, distance_poincare, poincare_norm
from hyperlsh.lsh2d import separation_scale

LN199 = math.log(199.0)
SIX_GRID = tuple(1.5 + k for k in range(18))


def test_config_validation():
    with pytest.raises(DomainError):
        ExperimentConfig(2, 10, 1.0, 0.2, (3.0, 2.0))
    with pytest.raises(DomainError):
        ExperimentConfig(2, 10, 1.0, 0.2, (1.0,))
    assert ExperimentConfig(2, 10, 1.0, 0.2, [2, 3]).c_grid == (2.0, 3.0)


def test_rho_from_probabilities():
    assert rho_from_probabilities(0.9, 0.5) == pytest.approx(math.log(0.9) / math.log(0.5))
    assert rho_from_probabilities(1.0, 0.5) == 0.0


def test_tiny_ball_gives_origin():
    pts = sample_uniform_ball(3, 1e-9, 1, np.random.default_rng(0))
    assert np.linalg.norm(pts) <= 1e-9


def test_plane_points_inside_099():
    pts = sample_uniform_ball(2, LN199, 5000, np.random.default_rng(1))
    assert np.all(np.linalg.norm(pts, axis=1) <= 0.99)


@pytest.mark.parametrize("d", [2, 10])
def test_radial_law_ks_against_quadrature(d):
    R = 3.0
    total = integrate.quad(lambda s: math.sinh(s) ** (d - 1), 0, R)[0]
    cdf = np.vectorize(lambda t: integrate.quad(lambda s: math.sinh(s) ** (d - 1), 0, t)[0] / total)
    radii = poincare_norm(sample_uniform_ball(d, R, 100_000, np.random.default_rng(d)))
    assert stats.kstest(radii, cdf).statistic < 0.01


def test_radial_law_plane_closed_form():
    law = RadialLaw(2, LN199)
    u = np.linspace(0.0, 1.0, 101)
    closed = np.arccosh(1 + u * (math.cosh(LN199) - 1))
    np.testing.assert_allclose(law.ppf(u), closed, atol=1e-9)


def test_radial_law_high_dimension_finite():
    law = RadialLaw(1000, LN199)
    t = law.ppf(np.array([0.01, 0.5, 0.99]))
    assert np.all(np.isfinite(t)) and np.all(np.diff(t) > 0) and t[-1] <= LN199


def test_separation_counts_identical_points():
    x = np.array([[0.1, 0.2], [0.1, 0.2], [-0.5, 0.0]])
    seps = separation_counts(x, 2.0, 500, np.random.default_rng(0))
    assert seps[0, 1] == 0 and np.all(np.diag(seps) == 0)
    assert np.array_equal(seps, seps.T)


def test_insufficient_pairs():
    x = np.array([[0.1, 0.2], [0.1, 0.2]])
    with pytest.raises(InsufficientPairs) as exc:
        estimate_p1_p2(x, 0.2, 2.0, 2.0, 10, np.random.default_rng(0))
    assert (exc.value.n_near, exc.value.n_far) == (1, 0)


def test_boundary_annuli_empty():
    x = np.array([[0.0, 0.0], [0.5, 0.0]])
    with pytest.raises(InsufficientPairs):
        boundary_pair_experiment(x, 0.2, 2.0, 2.0, 10, np.random.default_rng(0))


def test_all_near_pairs_mean():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-0.05, 0.05, (20, 2))
    R, reps = 2.0, 200_000
    est = estimate_p1_p2(np.vstack((pts, [[0.9, 0.0]])), 0.5, 2.0, R, reps, rng)
    i, j = np.triu_indices(20, 1)
    expected = np.mean(1 - distance_poincare(pts[i], pts[j]) / separation_scale(R))
    assert est.p1_hat == pytest.approx(expected, abs=3 * est.p1_se)


def test_curve_below_inverse_c_plane():
    cfg = ExperimentConfig(2, 1000, LN199, 0.2, SIX_GRID, 1000, 0)
    res = rho_curve(cfg)
    assert len(res) == 18
    for est in res:
        assert isinstance(est, RhoEstimate)
        assert est.rho_hat < 1 / est.c
        assert est.p1_hat >= est.p2_hat - 3 * (est.p1_se + est.p2_se)


def test_small_c_sweep_plane():
    cfg = ExperimentConfig(2, 1000, LN199, 0.2, tuple(1 + 0.1 * k for k in range(1, 11)), 1000, 0)
    assert all(est.rho_hat < 1 / est.c for est in rho_curve(cfg))


def test_curve_deterministic():
    cfg = ExperimentConfig(3, 200, 2.0, 0.8, (2.0, 3.0), 300, 42)
    assert rho_curve(cfg) == rho_curve(cfg)
    np.testing.assert_array_equal(generate_dataset(cfg), generate_dataset(cfg))


def test_curve_reports_insufficient_slot():
    cfg = ExperimentConfig(2, 50, 1.0, 1e-6, (2.0,), 10, 0)
    (res,) = rho_curve(cfg)
    assert isinstance(res, InsufficientPairs)


def test_csv_layout():
    cfg = ExperimentConfig(2, 300, LN199, 0.2, (2.0, 4.0), 200, 5)
    text = to_csv(csv_rows(cfg, rho_curve(cfg)))
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3
    row = dict(zip(CSV_COLUMNS, lines[1].split(",")))
    assert float(row["one_over_c"]) == 0.5 and row["seed"] == "5"


def test_csv_insufficient_row_has_counts():
    cfg = ExperimentConfig(2, 50, 1.0, 1e-6, (2.0,), 10, 0)
    line = to_csv(csv_rows(cfg, rho_curve(cfg))).splitlines()[1].split(",")
    row = dict(zip(CSV_COLUMNS, line))
    assert row["rho_hat"] == "nan" and row["n_near"] == "0"


def test_pair_statistics_rates():
    stats_ = PairStatistics(np.array([0.1, 0.5, 3.0]), np.array([0, 10, 50]), 100)
    p, _ = stats_.collision_rate(np.array([True, True, False]))
    assert p == pytest.approx(0.95)
    est = stats_.threshold_estimate(0.5, 2.0)
    assert (est.n_near_pairs, est.n_far_pairs) == (2, 1)
    assert est.p2_hat == pytest.approx(0.5)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.floats(0.1, 6.0), st.integers(0, 2**32 - 1))
def test_samples_inside_ball(d, R, seed):
    pts = sample_uniform_ball(d, R, 50, np.random.default_rng(seed))
    assert pts.shape == (50, d)
    assert np.all(poincare_norm(pts) <= R + 1e-8)


def test_curve_below_inverse_c_three_dimensions():
    # volume-uniform data in H^3 has no pairs within 0.2, so use r = 1
    cfg = ExperimentConfig(3, 1000, LN199, 1.0, (1.5, 2.5, 3.5, 4.5, 5.5), 1000, 0)
    for est in rho_curve(cfg):
        assert isinstance(est, RhoEstimate)
        assert est.rho_hat < 1 / est.c


def test_high_dimension_has_no_near_pairs_at_small_r():
    cfg = ExperimentConfig(10, 1000, LN199, 0.2, (2.0,), 10, 0)
    (res,) = rho_curve(cfg)
    assert isinstance(res, InsufficientPairs) and res.n_near == 0
