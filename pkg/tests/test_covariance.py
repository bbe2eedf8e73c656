import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trigroots.covariance import (
    QuadratureParams,
    det_floor,
    gaussian_mean_density,
    gaussian_variance_constant,
    sigma_limit,
    sigma_n,
    two_point_intensity,
)


def test_sigma_n_against_explicit_matrix(oracles):
    for key, ref in oracles["sigma_n"].items():
        if key == "n2_d22_exact":
            continue
        n, t, s = key.split(",")
        got = sigma_n(int(n), float(t), float(s)).entries
        assert np.allclose(got, np.array(ref), atol=1e-13)
    assert sigma_n(2, 0.0, 0.0)[2, 2] == float(Fraction(oracles["sigma_n"]["n2_d22_exact"]))
    assert sigma_n(2, 0.0, 0.0)[2, 2] == 0.625


def test_sigma_limit_against_quadrature(oracles):
    for key, ref in oracles["sigma_limit"].items():
        if key.endswith(":det"):
            continue
        cov = sigma_limit(float(key))
        assert np.allclose(cov.entries, np.array(ref), atol=1e-14)
        assert cov.det() == pytest.approx(oracles["sigma_limit"][key + ":det"], rel=1e-6, abs=1e-15)


def test_series_branch_is_continuous_at_its_radius():
    below, above = sigma_limit(0.5 - 1e-12).entries, sigma_limit(0.5 + 1e-12).entries
    assert np.allclose(below, above, atol=1e-11)


def test_one_based_indexing_and_symmetry():
    cov = sigma_limit(1.7)
    assert cov[1, 1] == 1 and cov[2, 2] == pytest.approx(1 / 3)
    assert np.allclose(cov.entries, cov.entries.T)
    with pytest.raises(IndexError):
        cov[0, 1]


@pytest.mark.parametrize("u", [0.2, 1.0, 3.0, 10.0, 40.0])
def test_finite_n_converges_at_rate_one_over_n(u):
    scaled = []
    for n in (64, 256, 1024):
        gap = np.max(np.abs(sigma_n(n, u, 0.0).entries - sigma_limit(u).entries))
        scaled.append(gap * n / (1 + abs(u)))
    assert max(scaled) <= 1.0
    assert scaled[-1] == pytest.approx(scaled[0], rel=0.2)


def test_determinant_limit_at_large_lag():
    assert sigma_limit(1e6).det() == pytest.approx(1 / 9, abs=1e-4)


@settings(max_examples=80, deadline=None)
@given(u=st.floats(0.0, 500.0), n=st.integers(1, 300))
def test_positive_semidefinite(u, n):
    assert sigma_limit(u).min_eigenvalue() >= -1e-12
    assert sigma_n(n, u, 0.0).min_eigenvalue() >= -1e-12


def test_det_floor():
    floor = det_floor(1.0, u_max=30.0, grid=3000)
    assert floor.value > 0
    assert floor.value <= sigma_limit(floor.argmin).det() + 1e-15
    assert floor.value <= min(sigma_limit(u).det() for u in np.linspace(1.0, 30.0, 500)) + 1e-15
    with pytest.raises(ValueError):
        det_floor(0.0)


def test_mean_density(oracles):
    for n, value in oracles["mean_density"].items():
        assert gaussian_mean_density(int(n)) == pytest.approx(value, rel=1e-14)
    assert gaussian_mean_density(10**6) / 10**6 == pytest.approx(1 / math.sqrt(3), rel=1e-5)


def test_two_point_intensity_limits():
    rho1 = math.sqrt(1 / 3) / math.pi
    far = two_point_intensity([500.0, 2000.0])
    assert np.allclose(far, rho1**2, rtol=5e-3)
    near = two_point_intensity([1e-3, 1e-2])
    assert np.all(near >= 0) and near[0] < near[1] < 1e-3
    both = two_point_intensity(np.array([2.0, 5.0]), method="gauss-hermite", order=80)
    assert np.allclose(both, two_point_intensity(np.array([2.0, 5.0])), rtol=0.05)


def test_variance_constant_against_independent_integration(oracles):
    vc = gaussian_variance_constant()
    ref = oracles["variance_constant"]["value"]
    assert vc.value == pytest.approx(ref, abs=2e-4)
    assert vc.full_period_value == pytest.approx(2 * vc.value)


def test_variance_constant_resolution_stable():
    base = gaussian_variance_constant()
    assert abs(gaussian_variance_constant(base.params.doubled()).value - base.value) < 1e-3


def test_variance_constant_panel_cap():
    with pytest.raises(RuntimeError):
        gaussian_variance_constant(QuadratureParams(max_panels=10))
