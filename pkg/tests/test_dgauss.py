import math

import numpy as np
import pytest

from dmm import dgauss


def series_p0(s, terms=8):
    return 1 / (1 + 2 * sum(math.exp(-(y * y) / (2 * s * s)) for y in range(1, terms + 1)))


def test_scale_precondition(rng):
    with pytest.raises(ValueError):
        dgauss.NoiseSpec(0.4)
    with pytest.raises(ValueError):
        dgauss.sample_array(0.3, 10, rng)


def test_integers_and_determinism():
    a = dgauss.sample_array(2.5, 1000, np.random.default_rng(5))
    b = dgauss.sample_array(2.5, 1000, np.random.default_rng(5))
    assert a.dtype.kind == "i" and np.array_equal(a, b)


def test_sign_flipped_stream_negates(rng):
    g1 = rng.geometric(0.3, 5000) - 1
    g2 = rng.geometric(0.3, 5000) - 1
    u = rng.random(5000)
    assert np.array_equal(dgauss.from_draws(g1, g2, u, 1.7), -dgauss.from_draws(g2, g1, u, 1.7))


def test_p0_at_unit_scale():
    assert math.isclose(series_p0(1.0), 0.39894, abs_tol=1e-5)
    x = dgauss.sample_array(1.0, 10**6, np.random.default_rng(11))
    assert abs(np.mean(x == 0) - series_p0(1.0)) <= 0.002
    assert abs(x.mean()) <= 3 / math.sqrt(10**6)


def test_variance_at_unit_scale():
    ys = np.arange(-8, 9)
    p = np.exp(-(ys**2) / 2.0)
    p /= p.sum()
    series_var = float((ys**2 * p).sum())
    assert math.isclose(series_var, 0.99999979, abs_tol=1e-7)
    x = dgauss.sample_array(1.0, 10**6, np.random.default_rng(12))
    assert abs(x.var() / series_var - 1) <= 0.02


@pytest.mark.parametrize("s", [0.5, 1.3, 4.0, 25.0])
def test_matches_pmf(s):
    N = 400_000
    x = dgauss.sample_array(s, N, np.random.default_rng(int(s * 10)))
    lo, hi = int(-4 * s) - 1, int(4 * s) + 1
    support = np.arange(lo, hi + 1)
    pm = dgauss.pmf(support, s)
    emp = np.array([(x == v).mean() for v in support])
    assert np.all(np.abs(emp - pm) <= 5 * np.sqrt(pm * (1 - pm) / N) + 1e-6)
