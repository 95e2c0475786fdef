import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from levy_drawdown import levy_models as m
from levy_drawdown.magnitude import (DrawdownQuery, lt_running_max_exceeds,
                                     mean_max_at_drawdown, quadruple_lt,
                                     quadruple_lt_by_pasting, ricochet_lt)


def taylor_brownian(mu, q, a):
    """Classical drawdown transform of ``mu t + W_t`` (Taylor's formula)."""
    d = math.sqrt(mu * mu + 2 * q)
    return d * math.exp(-mu * a) / (d * math.cosh(d * a) - mu * math.sinh(d * a))


@given(mu=st.floats(-1.0, 1.0), q=st.floats(0.01, 5.0), a=st.floats(0.1, 3.0),
       s=st.floats(0.0, 3.0))
def test_brownian_matches_classical_formula(mu, q, a, s):
    # continuous paths overshoot nothing, so Y at tau_a is exactly a
    got = quadruple_lt(m.brownian(mu, 1.0), DrawdownQuery(q=q, s=s, a=a))
    assert got == pytest.approx(math.exp(-s * a) * taylor_brownian(mu, q, a), rel=1e-7)


def test_driftless_brownian_max_is_exponential_with_mean_a():
    for sigma in (0.5, 1.0, 2.0):
        assert mean_max_at_drawdown(m.brownian(0.0, sigma), 1.7) == pytest.approx(1.7, rel=1e-9)


def test_trivial_query_is_one():
    for name in ("brownian", "stable", "sn_gamma", "sn_compound_poisson"):
        assert quadruple_lt(m.preset(name), DrawdownQuery(a=0.8)) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("name", ["stable", "sn_gamma", "sn_compound_poisson", "brownian"])
@pytest.mark.parametrize("q,r,s,delta,a", [(1.0, 0.0, 0.0, 0.0, 1.0),
                                           (0.5, 0.3, 1.0, 0.2, 0.7),
                                           (2.0, 1.0, 2.0, 1.5, 1.5)])
def test_two_routes_agree(name, q, r, s, delta, a):
    model = m.preset(name)
    query = DrawdownQuery(q=q, r=r, s=s, delta=delta, a=a)
    assert quadruple_lt(model, query) == pytest.approx(quadruple_lt_by_pasting(model, query),
                                                       rel=1e-8)


@given(q=st.floats(0.0, 4.0), s=st.floats(0.0, 4.0))
def test_transform_is_a_probability_weight(q, s):
    v = quadruple_lt(m.stable(1.5), DrawdownQuery(q=q, s=s, a=1.0))
    # slack at the accuracy of the numerical inversion behind W
    assert 0.0 <= v <= 1.0 + 1e-10


@given(q1=st.floats(0.0, 3.0), dq=st.floats(0.01, 3.0))
def test_decreasing_in_q(q1, dq):
    model = m.sn_gamma()
    lo = quadruple_lt(model, DrawdownQuery(q=q1 + dq, a=1.0))
    hi = quadruple_lt(model, DrawdownQuery(q=q1, a=1.0))
    assert lo <= hi + 1e-12


def test_running_max_tail_at_zero_level_is_exponential():
    model = m.stable(1.5)
    mean = mean_max_at_drawdown(model, 1.0)
    for x in (0.3, 1.0, 2.5):
        assert lt_running_max_exceeds(model, 0.0, x, 1.0) == pytest.approx(math.exp(-x / mean))


def test_ricochet_without_discount_is_one_for_creeping_paths():
    assert ricochet_lt(m.brownian(), 0.0, 0.0, 1.0) == pytest.approx(1.0, rel=1e-10)


@pytest.mark.parametrize("kw", [dict(q=-1.0), dict(a=0.0), dict(s=-0.1)])
def test_query_validation(kw):
    with pytest.raises(ValueError):
        DrawdownQuery(**kw)
