import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from hiassess.degradation import (
    REFERENCE_PARAMS,
    DegradationParams,
    derive_coefficients,
    scale_at,
    scale_curve,
    simulate_ensemble,
    simulate_trajectory,
    trend_at,
    trend_curve,
)
from hiassess.errors import InvalidParametersError, OutOfRangeError


@pytest.fixture(scope="module")
def coeffs():
    return derive_coefficients(REFERENCE_PARAMS)


def test_reference_coefficients(coeffs):
    expected = dict(a1=1.6669e-4, b1=0.9998, a2=1.6667e-3, a3=7.4049e-5, b3=1.2730e-3)
    for name, value in expected.items():
        assert getattr(coeffs, name) == pytest.approx(value, rel=5e-5), name
    assert coeffs.b2 == pytest.approx(-8, abs=1e-9)
    assert coeffs.c2 == pytest.approx(0, abs=1e-9)
    assert coeffs.c3 == pytest.approx(8, abs=1e-9)


def test_constant_scale_coefficients():
    p = DegradationParams(2, 3, 4, 1, 1, 1, 1, 0)
    c = derive_coefficients(p)
    assert (c.a1, c.b1, c.a2, c.b2, c.a3, c.b3, c.c2) == (0, 1, 0, 1, 1, 0, 0)
    assert c.c3 == -1


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(t1_star=1, t2_star=5, m=10),
        dict(t1_star=5, t2_star=5, m=10),
        dict(t1_star=5, t2_star=10, m=10),
    ],
)
def test_degenerate_spans_rejected(kwargs):
    with pytest.raises(InvalidParametersError):
        DegradationParams(sigma1=1, sigma2=1, sigma3=1, sigma4=1, c1=0, **kwargs)


def test_nonpositive_sigma_rejected():
    with pytest.raises(InvalidParametersError):
        DegradationParams(2, 3, 4, 1, 0, 1, 1, 0)


def test_scale_and_trend_values(coeffs):
    p = REFERENCE_PARAMS
    assert scale_at(p, coeffs, 1) == pytest.approx(1.0, abs=1e-12)
    assert scale_at(p, coeffs, 9000) == pytest.approx(7.0, abs=1e-12)
    # 7 * exp(500 * ln(25/7) / 1000) = sqrt(7 * 25)
    assert scale_at(p, coeffs, 9500) == pytest.approx(math.sqrt(175), rel=1e-12)
    assert trend_at(p, coeffs, 3000) == 10
    assert trend_at(p, coeffs, 9000) == pytest.approx(15, abs=1e-9)
    assert trend_at(p, coeffs, 10000) == pytest.approx(33, abs=1e-9)


@pytest.mark.parametrize("t", [0, 10001])
def test_out_of_range_time(coeffs, t):
    with pytest.raises(OutOfRangeError):
        scale_at(REFERENCE_PARAMS, coeffs, t)
    with pytest.raises(OutOfRangeError):
        trend_at(REFERENCE_PARAMS, coeffs, t)


@st.composite
def valid_params(draw):
    t1 = draw(st.integers(2, 500))
    t2 = draw(st.integers(t1 + 1, t1 + 500))
    m = draw(st.integers(t2 + 1, t2 + 500))
    sig = [draw(st.floats(0.01, 50)) for _ in range(4)]
    c1 = draw(st.floats(-100, 100))
    # keep a3 * exp(b3 * t) representable in doubles
    assume(abs(math.log(sig[3] / sig[2])) / (m - t2) * m < 700)
    return DegradationParams(t1, t2, m, *sig, c1)


@settings(max_examples=200, deadline=None)
@given(valid_params())
def test_boundary_and_continuity_residuals(p):
    c = derive_coefficients(p)
    tol = 1e-9 * max(1.0, *p.sigmas, abs(p.c1))
    assert abs(c.a1 * 1 + c.b1 - p.sigma1) < tol
    assert abs(c.a1 * p.t1_star + c.b1 - p.sigma2) < tol
    assert abs(c.a2 * p.t1_star + c.b2 - p.sigma2) < tol
    assert abs(c.a2 * p.t2_star + c.b2 - p.sigma3) < tol
    assert abs(c.a3 * math.exp(c.b3 * p.t2_star) - p.sigma3) < tol
    assert abs(c.a3 * math.exp(c.b3 * p.m) - p.sigma4) < tol
    assert abs(c.a2 * p.t1_star + c.c2 - p.c1) < tol
    assert abs(c.a3 * math.exp(c.b3 * p.t2_star) + c.c3 - (c.a2 * p.t2_star + c.c2)) < tol
    for t, sigma in zip((1, p.t1_star, p.t2_star, p.m), p.sigmas):
        assert abs(scale_at(p, c, t) - sigma) < tol


@settings(max_examples=100, deadline=None)
@given(valid_params())
def test_scale_positive_on_grid(p):
    c = derive_coefficients(p)
    assert np.all(scale_curve(p, c, np.arange(1, p.m + 1)) > 0)


def test_simulation_is_deterministic(coeffs):
    a = simulate_trajectory(REFERENCE_PARAMS, coeffs, (8401, 9000), 123)
    b = simulate_trajectory(REFERENCE_PARAMS, coeffs, (8401, 9000), 123)
    assert np.array_equal(a.values, b.values)
    assert len(a) == 600 and a.start == 8401


def test_zero_noise_equals_trend(coeffs):
    t = np.arange(8401, 9001)
    traj = simulate_trajectory(REFERENCE_PARAMS, coeffs, (8401, 9000), 5, noise_scale=0.0)
    assert np.array_equal(traj.values, trend_curve(REFERENCE_PARAMS, coeffs, t))


def test_window_outside_model(coeffs):
    with pytest.raises(OutOfRangeError):
        simulate_trajectory(REFERENCE_PARAMS, coeffs, (9990, 10001), 0)


def test_standardized_residual_moments(coeffs):
    t = np.arange(8401, 9001)
    trend = trend_curve(REFERENCE_PARAMS, coeffs, t)
    scale = scale_curve(REFERENCE_PARAMS, coeffs, t)
    z = np.concatenate([
        (simulate_trajectory(REFERENCE_PARAMS, coeffs, (8401, 9000), s).values - trend) / scale
        for s in range(20)
    ])
    assert z.size >= 10_000
    assert abs(z.mean()) < 0.05
    assert abs(z.var() - 1) < 0.1


def test_ensemble_determinism_and_seed_sensitivity():
    a = simulate_ensemble(REFERENCE_PARAMS, (8401, 8410), 3, 99)
    b = simulate_ensemble(REFERENCE_PARAMS, (8401, 8410), 3, 99)
    c = simulate_ensemble(REFERENCE_PARAMS, (8401, 8410), 2, 100)
    assert a.trajectories.tobytes() == b.trajectories.tobytes()
    assert not np.array_equal(a.trajectories[:2], c.trajectories)


def test_ensemble_members_do_not_depend_on_batch_size():
    small = simulate_ensemble(REFERENCE_PARAMS, (8401, 8500), 3, 11)
    large = simulate_ensemble(REFERENCE_PARAMS, (8401, 8500), 10, 11)
    assert np.array_equal(small.trajectories, large.trajectories[:3])


def test_ensemble_member_matches_single_simulation(coeffs):
    from hiassess.degradation import child_seed

    ens = simulate_ensemble(REFERENCE_PARAMS, (8401, 8500), 4, 11)
    single = simulate_trajectory(REFERENCE_PARAMS, coeffs, (8401, 8500), child_seed(11, 0, 2))
    assert np.array_equal(ens.trajectories[2], single.values)


def test_ensemble_needs_two_members():
    with pytest.raises(ValueError):
        simulate_ensemble(REFERENCE_PARAMS, (8401, 8500), 1, 0)


def test_ensemble_cross_sectional_std(coeffs):
    window = (8401, 9000)
    ens = simulate_ensemble(REFERENCE_PARAMS, window, 1000, 3)
    expected = scale_curve(REFERENCE_PARAMS, coeffs, np.arange(8401, 9001))
    ratio = ens.trajectories.std(axis=0, ddof=1) / expected
    assert np.all(np.abs(ratio - 1) < 0.10)
