import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trigroots.coefficients import CoefficientDistribution, stream
from trigroots.polynomial import (
    TrigPolynomialSample,
    eval,
    eval_derivative,
    eval_grid,
    eval_rescaled,
    eval_rescaled_derivative,
    grid_values,
    pair_statistic,
)


def _direct(a, b, t):
    k = np.arange(1, len(a) + 1)
    return np.cos(np.outer(t, k)) @ a + np.sin(np.outer(t, k)) @ b


def test_single_cosine():
    s = TrigPolynomialSample([0.0, 0.0, 1.0], [0.0, 0.0, 0.0])
    t = np.array([0.0, 0.3, 1.0])
    assert np.allclose(eval(s, t), np.cos(3 * t))
    assert np.allclose(eval_derivative(s, t), -3 * np.sin(3 * t))


def test_sample_is_immutable_and_validated():
    s = TrigPolynomialSample([1.0, 2.0], [3.0, 4.0])
    with pytest.raises(ValueError):
        s.a[0] = 5.0
    with pytest.raises(ValueError):
        TrigPolynomialSample([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        TrigPolynomialSample([], [])


def test_derivative_sample_and_negation():
    s = TrigPolynomialSample([1.0, -2.0], [0.5, 3.0])
    t = np.linspace(0, 3, 7)
    assert np.allclose(eval(s.derivative(), t), eval_derivative(s, t))
    assert np.allclose(eval(-s, t), -eval(s, t))


def test_rescaled_forms():
    s = TrigPolynomialSample.draw(CoefficientDistribution("uniform"), stream(0, "p", 0), 12)
    t = np.array([0.5, 4.0, 30.0])
    assert np.allclose(eval_rescaled(s, t), eval(s, t / 12) / math.sqrt(12))
    assert np.allclose(eval_rescaled_derivative(s, t), eval_derivative(s, t / 12) / 12**1.5)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 40), extra=st.integers(0, 50), seed=st.integers(0, 10**6))
def test_grid_matches_direct_sum(n, extra, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal(n), rng.standard_normal(n)
    M = 2 * n + 1 + extra
    t = np.arange(M + 1) * math.pi / M
    assert np.allclose(grid_values(a, b, M), _direct(a, b, t), atol=1e-10 * n)
    s = TrigPolynomialSample(a, b)
    assert np.allclose(grid_values(a, b, M, derivative=True), eval_derivative(s, t), atol=1e-9 * n * n)


def test_grid_batch_and_bandwidth_check():
    rng = np.random.default_rng(1)
    a, b = rng.standard_normal((3, 8)), rng.standard_normal((3, 8))
    batch = grid_values(a, b, 40)
    for i in range(3):
        assert np.allclose(batch[i], grid_values(a[i], b[i], 40))
    with pytest.raises(ValueError):
        grid_values(a, b, 16)


def test_eval_grid_layout():
    s = TrigPolynomialSample([1.0, 0.0], [0.0, 1.0])
    g = eval_grid(s, 10)
    assert g.grid.shape == g.values.shape == g.derivative_values.shape == (10,)
    assert g.grid[0] == 0 and g.grid[-1] < math.pi
    assert np.allclose(g.values, eval(s, g.grid))


def test_pair_statistic_empirical_covariance():
    from trigroots.covariance import sigma_n

    n, t, s, m = 16, 3.0, 1.0, 20000
    law = CoefficientDistribution("uniform")
    samples = np.array([pair_statistic(TrigPolynomialSample.draw(law, stream(2, "pair", j), n), t, s)
                        for j in range(m)])
    emp = np.cov(samples.T)
    ref = sigma_n(n, t, s).entries
    # standard error of a sample covariance: sqrt((E[xy]^2 var terms)/m), bounded via fourth moments
    centered = samples - samples.mean(axis=0)
    prods = centered[:, :, None] * centered[:, None, :]
    se = prods.std(axis=0) / math.sqrt(m)
    assert np.all(np.abs(emp - ref) <= 4 * se + 1e-12)
