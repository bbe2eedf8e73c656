import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trigroots.coefficients import (
    CoefficientDistribution,
    UnsupportedLawError,
    moment,
    moment_table,
    sample_pair,
    stream,
    stream_at,
    stream_key,
    y_star,
)

LAWS = [CoefficientDistribution("gaussian"), CoefficientDistribution("uniform"),
        CoefficientDistribution("mixture", 0.5, 0.5, 1.5)]


def test_aliases_and_names():
    assert CoefficientDistribution("normal").kind == "standard-gaussian"
    assert CoefficientDistribution("uniform").name == "uniform"
    assert CoefficientDistribution("mixture", 0.5, 0.5, 1.5).name == "mixture(0.5,0.5,1.5)"
    with pytest.raises(ValueError):
        CoefficientDistribution("cauchy")


def test_mixture_needs_unit_variance():
    with pytest.raises(ValueError):
        CoefficientDistribution("mixture", 0.5, 0.5, 1.0)
    with pytest.raises(ValueError):
        CoefficientDistribution("mixture", 1.5, 0.5, 1.5)


def test_sign_law_is_gated():
    with pytest.raises(UnsupportedLawError):
        CoefficientDistribution("rademacher")
    law = CoefficientDistribution("sign", allow_unsupported=True)
    assert not law.doeblin_ok
    assert all(d.doeblin_ok for d in LAWS)


def test_config_round_trip():
    law = CoefficientDistribution.from_config({"dist": "mixture", "p": 0.5, "v1": 0.5, "v2": 1.5})
    assert law == LAWS[2]
    assert CoefficientDistribution.from_config(law.to_config()) == law
    assert CoefficientDistribution.from_config("uniform") == LAWS[1]


@pytest.mark.parametrize("law", LAWS, ids=lambda d: d.name)
def test_empirical_mean_and_variance(law):
    m = 10**6
    x = law.sample(stream(5, "moments", 0), m)
    assert abs(x.mean()) <= 5 / math.sqrt(m)
    assert abs(x.var() - 1) <= 5 * math.sqrt(2) / math.sqrt(m)
    assert abs(x.var() - 1) < 0.01


def test_uniform_support(oracles):
    x = LAWS[1].sample(stream(1, "support", 0), 10**5)
    assert np.all(np.abs(x) <= oracles["moments"]["uniform_support"])


def test_sample_pair_components_uncorrelated():
    rng = stream(3, "pairs", 0)
    pairs = np.array([sample_pair(LAWS[1], rng) for _ in range(20000)])
    assert abs(np.corrcoef(pairs.T)[0, 1]) < 4 / math.sqrt(20000)


def test_moments_match_symbolic_oracle(oracles):
    mo = oracles["moments"]
    assert moment(LAWS[0], 4) == 3
    assert Fraction(moment(LAWS[1], 4)).limit_denominator(100) == Fraction(mo["uniform_fourth"])
    assert moment(LAWS[2], 4) == pytest.approx(float(Fraction(mo["mixture_fourth"])), abs=1e-15)
    assert moment(LAWS[2], 4) == pytest.approx(mo["mixture_fourth_mc"], rel=0.01)
    for law in LAWS:
        assert moment(law, 1) == moment(law, 3) == 0
        assert moment(law, 2) == 1
        with pytest.raises(ValueError):
            moment(law, 5)
        with pytest.raises(ValueError):
            moment(law, 0)


def test_moment_table_structure():
    table = moment_table(LAWS[0])
    assert table[1, 1, 1, 1] == 3 and table[1, 1, 2, 2] == 1
    assert all(v == 0 for v in table.third.values())
    u = moment_table(LAWS[1])
    assert u[2, 2, 2, 2] == pytest.approx(9 / 5)
    assert u[1, 2, 2, 1] == 1
    assert u[1, 1, 1, 2] == 0


@pytest.mark.parametrize("law", LAWS, ids=lambda d: d.name)
def test_moment_table_permutation_symmetric(law):
    table = moment_table(law)
    for alpha in itertools.product((1, 2), repeat=4):
        for perm in itertools.permutations(alpha):
            assert table[perm] == table[alpha]


def test_moment_table_against_monte_carlo():
    law = LAWS[2]
    y = law.sample(stream(9, "table", 0), (400000, 2))
    table = moment_table(law)
    for alpha in [(1, 1, 2, 2), (1, 1, 1, 1), (2, 2, 2, 2), (1, 2, 2, 2), (1, 1, 2)]:
        prod = np.prod([y[:, a - 1] for a in alpha], axis=0)
        se = prod.std() / math.sqrt(prod.size)
        assert abs(prod.mean() - table[alpha]) <= 4 * se


def test_y_star_values(oracles):
    mo = oracles["moments"]
    assert y_star(moment_table(LAWS[0])) == 0
    assert y_star(moment_table(LAWS[1])) == pytest.approx(float(Fraction(mo["y_star_uniform"])), abs=1e-14)
    assert y_star(moment_table(LAWS[2])) == pytest.approx(float(Fraction(mo["y_star_mixture"])), abs=1e-14)


def test_scaled_excess_doubles_deviation():
    t = moment_table(LAWS[1]).scaled_excess(2.0)
    assert y_star(t) == pytest.approx(2 * y_star(moment_table(LAWS[1])))


def test_streams_are_pure_functions_of_their_arguments():
    a = stream(11, "x", 4).standard_normal(5)
    b = stream(11, "x", 4).standard_normal(5)
    c = stream(11, "x", 5).standard_normal(5)
    d = stream(11, "y", 4).standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c) and not np.array_equal(a, d)
    assert np.array_equal(stream_at(stream_key(11, "x"), 4).standard_normal(5), a)


@settings(max_examples=30, deadline=None)
@given(p=st.floats(0.05, 0.95), v1=st.floats(0.05, 0.95))
def test_mixture_moment_formula(p, v1):
    v2 = (1 - p * v1) / (1 - p)
    law = CoefficientDistribution("mixture", p, v1, v2)
    assert moment(law, 4) == pytest.approx(3 * (p * v1**2 + (1 - p) * v2**2))
    assert y_star(moment_table(law)) == pytest.approx(2 * (moment(law, 4) - 3))
