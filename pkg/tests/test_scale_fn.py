import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from levy_drawdown import levy_models as m
from levy_drawdown.numerics import integrate
from levy_drawdown.scale_fn import ScaleFunction, assumption1_probe


def brownian_w(mu, sigma, q, x):
    # partial fractions of 1/(mu s + sigma^2 s^2/2 - q)
    d = math.sqrt(mu * mu + 2 * q * sigma * sigma)
    r1, r2 = (-mu + d) / sigma ** 2, (-mu - d) / sigma ** 2
    return (np.exp(r1 * x) - np.exp(r2 * x)) / d


@pytest.mark.parametrize("mu,sigma,q", [(0.0, 1.0, 0.5), (0.4, 1.3, 2.0), (-0.3, 0.8, 0.0)])
@pytest.mark.parametrize("backend", ["inversion", "closed_form"])
def test_brownian_partial_fractions(mu, sigma, q, backend):
    x = np.logspace(-2, 1, 15)
    sf = ScaleFunction(m.brownian(mu, sigma), q, backend=backend)
    np.testing.assert_allclose(sf.w(x), brownian_w(mu, sigma, q, x), rtol=1e-8)


def test_stable_power_law_at_zero_level():
    x = np.logspace(-2, 1, 12)
    sf = ScaleFunction(m.stable(1.5), 0.0, backend="inversion")
    np.testing.assert_allclose(sf.w(x), x ** 0.5 / special.gamma(1.5), rtol=1e-8)


@pytest.mark.parametrize("name", ["sn_gamma", "sn_compound_poisson", "stable", "brownian"])
@pytest.mark.parametrize("theta", [2.0, 5.0])
def test_laplace_transform_identity(name, theta):
    model = m.preset(name)
    q = 0.5
    sf = ScaleFunction(model, q)
    lt = integrate(lambda x: math.exp(-theta * x) * float(sf.w(x)), 0.0, 60.0,
                   epsrel=1e-9, limit=400).value
    assert lt == pytest.approx(1.0 / (float(model.psi(theta)) - q), rel=1e-6)


@given(x=st.floats(0.01, 8.0))
def test_w_prime_matches_finite_difference(x):
    sf = ScaleFunction(m.sn_gamma(), 1.0)
    h = 1e-5 * x
    fd = (float(sf.w(x + h)) - float(sf.w(x - h))) / (2 * h)
    assert float(sf.w_prime(x)) == pytest.approx(fd, rel=1e-5)


def test_z_is_one_plus_q_integral_of_w():
    sf = ScaleFunction(m.stable(1.5), 0.7)
    x = 1.3
    ref = 1.0 + 0.7 * integrate(lambda u: float(sf.w(u)), 0.0, x, epsrel=1e-11).value
    assert float(sf.z(x)) == pytest.approx(ref, rel=1e-8)
    assert float(sf.z(-1.0)) == 1.0


@given(s=st.floats(0.0, 3.0), x=st.floats(0.05, 5.0))
def test_tilted_scale_function(s, x):
    model = m.brownian(0.2, 1.1)
    q = 1.5
    tilted = ScaleFunction(model, q).tilted(s)
    expected = math.exp(-s * x) * float(ScaleFunction(model, q).w(x))
    assert float(tilted.w(x)) == pytest.approx(expected, rel=1e-7)


@pytest.mark.parametrize("name", ["brownian", "stable", "sn_gamma", "sn_compound_poisson"])
def test_w_increasing(name):
    x = np.logspace(-2, 1, 30)
    w = ScaleFunction(m.preset(name), 0.3).w(x)
    assert np.all(np.diff(w) > 0)


@pytest.mark.parametrize("name,w0,wp0", [
    ("brownian", 0.0, 2.0),            # 2 / sigma^2
    ("stable", 0.0, math.inf),
    ("sn_gamma", 1.0, math.inf),       # 1/d, infinite jump mass
    ("sn_compound_poisson", 1.0, None),
])
def test_boundary_report(name, w0, wp0):
    model = m.preset(name)
    rep = ScaleFunction(model, 1.0).boundary_report()
    assert rep.w0_predicted == pytest.approx(w0)
    if wp0 is None:
        # (q + Pi) / d^2 with d = 1, Pi = 2
        wp0 = 3.0
    assert rep.w_prime0_predicted == pytest.approx(wp0)
    assert rep.w0_ok and rep.w_prime0_ok


def test_probe_accepts_gaussian_and_stable():
    assert assumption1_probe(m.brownian()).passed
    assert assumption1_probe(m.stable(1.5)).passed


def test_requires_spectrally_negative():
    with pytest.raises(m.ModelError):
        ScaleFunction(m.kou(), 0.0)


def test_closed_form_unavailable_raises():
    with pytest.raises((m.ModelError, ValueError)):
        ScaleFunction(m.sn_gamma(), 0.0, backend="closed_form").w(1.0)
