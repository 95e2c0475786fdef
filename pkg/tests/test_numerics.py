import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from levy_drawdown import numerics as nm

CONFIGS = [nm.EULER_DEFAULT, nm.TALBOT_DEFAULT]


@pytest.mark.parametrize("cfg", CONFIGS, ids=lambda c: c.method)
def test_inverts_exponential(cfg):
    x = np.array([0.05, 0.5, 2.0, 8.0])
    got = nm.laplace_invert(lambda s: 1.0 / (s + 1.0), x, cfg)
    np.testing.assert_allclose(got, np.exp(-x), rtol=1e-7)


@pytest.mark.parametrize("cfg", CONFIGS, ids=lambda c: c.method)
def test_inverts_power(cfg):
    x = np.array([0.1, 1.0, 5.0])
    got = nm.laplace_invert(lambda s: s ** -1.5, x, cfg)
    np.testing.assert_allclose(got, np.sqrt(x) / math.gamma(1.5), rtol=1e-7)


@given(a=st.floats(0.1, 2.0), x=st.floats(0.05, 5.0),
       cfg=st.sampled_from(CONFIGS))
def test_inverts_damped_sine(a, x, cfg):
    got = nm.laplace_invert(lambda s: a / ((s + 1.0) ** 2 + a * a), x, cfg)
    assert got == pytest.approx(math.exp(-x) * math.sin(a * x), abs=1e-8)


def test_shift_handles_growing_originals():
    # e^{2x}: transform 1/(s-2) has its pole at 2
    got = nm.laplace_invert(lambda s: 1.0 / (s - 2.0), 1.5, nm.EULER_DEFAULT, shift=2.5)
    assert got == pytest.approx(math.exp(3.0), rel=1e-7)


def test_invalid_configs():
    with pytest.raises(ValueError):
        nm.InversionConfig("simpson", 30, 1e-8)
    with pytest.raises(ValueError):
        nm.InversionConfig("euler", 5, 1e-8)


def test_integrate_matches_known_integral():
    res = nm.integrate(lambda t: math.exp(-t * t), 0.0, np.inf)
    assert res.value == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-12)


def test_integrate_reports_failure():
    with pytest.raises(nm.QuadratureError):
        nm.integrate(lambda t: 1.0 / t, 0.0, 1.0, limit=5)


def test_stable_density_series_matches_fourier_inversion():
    # density of the spectrally negative 1.5-stable law with E e^{sX_1} = e^{s^1.5}
    alpha = 1.5

    def fourier(x):
        f = lambda u: (np.exp((u ** alpha) * math.cos(math.pi * alpha / 2))
                       * math.cos(-u * x + (u ** alpha) * math.sin(math.pi * alpha / 2)))
        return sp_integrate.quad(f, 0, np.inf, limit=400, epsabs=1e-13)[0] / math.pi

    for x in (-0.8, 0.0, 0.4, 0.9):
        assert nm.stable_density_at(alpha, 1.0, x) == pytest.approx(fourier(x), abs=1e-9)


@given(t=st.floats(0.01, 10.0), x=st.floats(-0.9, 0.9))
def test_stable_density_self_similarity(t, x):
    alpha = 1.5
    x_t = x * t ** (1 / alpha)
    lhs = nm.stable_density_at(alpha, t, x_t)
    rhs = t ** (-1 / alpha) * nm.stable_density_at(alpha, 1.0, x)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_stable_density_refuses_far_points():
    with pytest.raises(ValueError):
        nm.stable_density_at(1.5, 1.0, 3.0)


def test_normal_cdf():
    assert nm.normal_cdf(0.0) == 0.5
    assert nm.normal_cdf(1.959963984540054) == pytest.approx(0.975, rel=1e-12)
