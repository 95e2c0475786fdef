import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from levy_drawdown import duration as dur
from levy_drawdown import levy_models as m
from levy_drawdown.numerics import integrate


@pytest.mark.parametrize("q,b", [(1.0, 1.0), (2.0, 0.5), (0.3, 3.0)])
@pytest.mark.parametrize("mu,sigma", [(0.0, 1.0), (0.3, 1.2), (-0.3, 1.2), (0.0, 0.6)])
def test_brownian_kendall_equals_example(mu, sigma, q, b):
    k = dur.eta_lt_kendall(m.brownian(mu, sigma), q, b).value
    e = dur.example_closed_form("brownian", {"mu": mu, "sigma": sigma}, q, b)
    assert k == pytest.approx(e, rel=1e-10)


@pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8])
def test_stable_kendall_equals_example(alpha):
    k = dur.eta_lt_kendall(m.stable(alpha), 1.0, 1.0).value
    assert k == pytest.approx(dur.example_closed_form("stable", {"alpha": alpha}, 1.0, 1.0),
                              rel=1e-10)


@given(q=st.floats(0.05, 5.0), b=st.floats(0.05, 5.0), c=st.floats(0.2, 5.0))
def test_stable_self_similarity(q, b, c):
    # eta_{cb} has the law of c eta_b, so only q b matters
    lhs = dur.eta_lt_kendall(m.stable(1.5), q, c * b).value
    rhs = dur.eta_lt_kendall(m.stable(1.5), c * q, b).value
    assert lhs == pytest.approx(rhs, rel=1e-9)


@given(q=st.floats(0.05, 4.0), b1=st.floats(0.05, 3.0), db=st.floats(0.01, 2.0))
def test_brownian_decreasing_in_b(q, b1, db):
    f = lambda b: dur.example_closed_form("brownian", {}, q, b)
    assert f(b1 + db) < f(b1)


def test_zero_discount_gives_one():
    for name, model in (("brownian", m.brownian()), ("stable", m.stable(1.5))):
        assert dur.eta_lt_kendall(model, 0.0, 1.0).value == 1.0
        assert dur.example_closed_form(name, {}, 0.0, 1.0) == 1.0
    assert dur.eta_lt_bounded(m.sn_gamma(), 0.0, 1.0).value == 1.0


def test_unbounded_route_matches_kendall_for_brownian():
    model = m.brownian(0.0, math.sqrt(2.0))
    for q, b in ((1.0, 1.0), (0.5, 2.0)):
        v6 = dur.eta_lt_unbounded(model, q, b).value
        v7 = dur.eta_lt_kendall(model, q, b).value
        assert v6 == pytest.approx(v7, rel=1e-8)


def test_unbounded_route_matches_kendall_with_drift():
    model = m.brownian(-0.4, 1.0)
    assert dur.eta_lt_unbounded(model, 1.0, 1.0).value == pytest.approx(
        dur.eta_lt_kendall(model, 1.0, 1.0).value, rel=1e-8)


@pytest.mark.parametrize("q,b", [(1.0, 1.0), (0.5, 2.0)])
def test_gamma_theorem_equals_example(q, b):
    thm = dur.eta_lt_bounded(m.sn_gamma(), q, b).value
    assert thm == pytest.approx(dur.example_closed_form("gamma", {}, q, b), rel=1e-8)


def test_kou_theorem_equals_example():
    thm = dur.eta_lt_unbounded(m.kou(), 1.0, 1.0).value
    assert thm == pytest.approx(dur.example_closed_form("kou", {}, 1.0, 1.0), rel=1e-8)


def test_explicit_cdf_source_is_used():
    model = m.sn_gamma()
    default = dur.eta_lt_bounded(model, 1.0, 1.0).value
    given_ = dur.eta_lt_bounded(model, 1.0, 1.0,
                                cdf=lambda p: dur.kendall_running_max_cdf(model, p)).value
    assert given_ == default


def test_two_sided_bounded_model_needs_cdf():
    model = m.LevyModel(sigma=0.0, mu=m.sn_gamma().mu, neg_jumps=m.GammaJumps(0.8, 1.0),
                        pos_jumps=m.ExponentialUpJumps(0.5, 4.0))
    with pytest.raises(m.ModelError):
        dur.eta_lt_bounded(model, 1.0, 1.0)


@pytest.mark.parametrize("mu,sigma", [(0.3, 1.2), (-0.5, 0.8)])
def test_kendall_cdf_matches_reflection_principle(mu, sigma):
    k = dur.kendall_running_max_cdf(m.brownian(mu, sigma))
    r = dur.brownian_running_max_cdf(mu, sigma)
    for t in (0.5, 2.0):
        for y in (0.05, 0.7, 3.0):
            assert k(t, y) == pytest.approx(r(t, y), rel=1e-8, abs=1e-12)


@pytest.mark.parametrize("model", [m.brownian(0.2, 1.0), m.stable(1.5), m.sn_gamma()],
                         ids=["brownian", "stable", "gamma"])
def test_kendall_cdf_long_horizon_is_exponential(model):
    # M at an independent exponential time of rate p is Exp(Phi(p))
    p = 0.8
    cdf = dur.kendall_running_max_cdf(model, p)
    phi = model.phi(p)
    for y in (0.2, 1.0, 2.5):
        assert cdf(80.0, y) == pytest.approx(-math.expm1(-phi * y), rel=1e-7)


@pytest.mark.parametrize("model,t", [(m.sn_gamma(), 0.7), (m.stable(1.5), 0.5),
                                     (m.brownian(0.1, 0.9), 1.3)],
                         ids=["gamma", "stable", "brownian"])
@pytest.mark.parametrize("s", [0.5, 1.0])
def test_transition_density_exponential_moment(model, t, s):
    # int e^{sx} p_t(x) dx = e^{t psi(s)}; the weight tames the heavy left tail
    f = lambda x: math.exp(s * x) * dur.transition_density(model, t, x)
    upper = t * model.linear_coefficient if model.classify_variation().bounded else 30.0
    pts = [v for v in (-5.0, -1.0, 0.0, 1.0) if v < upper]
    val = integrate(f, -60.0, upper, epsabs=1e-13, epsrel=1e-10, limit=400, points=pts).value
    assert val == pytest.approx(math.exp(t * float(model.psi(s))), rel=1e-7)


def test_stable_density_branches_join():
    lo = dur.transition_density(m.stable(1.5), 1.0, 1.0 - 1e-9)
    hi = dur.transition_density(m.stable(1.5), 1.0, 1.0 + 1e-9)
    assert lo == pytest.approx(hi, rel=1e-8)


def test_compound_poisson_has_no_density():
    with pytest.raises(m.ModelError):
        dur.transition_density(m.sn_compound_poisson(), 1.0, 0.5)


def test_dispatcher():
    assert dur.duration_lt(m.stable(1.5), 1.0, 1.0).path == "kendall"
    assert dur.duration_lt(m.sn_gamma(), 1.0, 1.0).path == "theorem"
    assert dur.duration_lt(m.kou(), 1.0, 1.0).path == "theorem"
    ex = dur.duration_lt(m.brownian(0.2, 1.1), 1.0, 1.0, path="example")
    assert ex.source_diagnostics["example"] == "brownian"
    with pytest.raises(m.ModelError):
        dur.duration_lt(m.sn_compound_poisson(), 1.0, 1.0, path="example")
    with pytest.raises(ValueError):
        dur.duration_lt(m.stable(1.5), 1.0, 1.0, path="nope")


def test_query_validation():
    with pytest.raises(ValueError):
        dur.DurationQuery(q=-1.0, b=1.0)
    with pytest.raises(ValueError):
        dur.DurationQuery(q=1.0, b=0.0)
    with pytest.raises(ValueError):
        dur.example_closed_form("cauchy", {}, 1.0, 1.0)


@pytest.mark.parametrize("model", [m.stable(1.5), m.brownian(-0.3, 1.0)], ids=["stable", "bm-"])
def test_small_level_slope_of_running_max_law(model):
    cdf = dur.kendall_running_max_cdf(model)
    t = 1.0
    slope = dur.kendall_tail(model, t)
    ratios = [cdf(t, y) / y for y in (1e-2, 1e-3, 1e-4)]
    gaps = [abs(r - slope) for r in ratios]
    assert gaps[2] < gaps[1] < gaps[0]
    assert gaps[2] <= 1e-2 * slope
