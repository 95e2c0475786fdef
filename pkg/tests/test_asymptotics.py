import math

import numpy as np
import pytest

from levy_drawdown import levy_models as m
from levy_drawdown.asymptotics import (AssumptionError, asymptote_sn, asymptote_two_sided,
                                       certify_assumption1, finite_activity_limit,
                                       verify_asymptote_sn)


def test_limits():
    assert asymptote_sn(m.brownian(), 1.0, 0.7) == 0.7
    assert asymptote_sn(m.stable(1.5), 1.0, 0.0) == 0.0
    g = m.sn_gamma()
    assert asymptote_sn(g, 1.0, 1.0) == pytest.approx(1.0 + (1.0 - (1.0 - 0.8 * math.log(2))))


def test_certification_reasons():
    assert certify_assumption1(m.brownian()) == "gaussian"
    assert certify_assumption1(m.sn_compound_poisson()) == "finite_jump_mass"
    assert certify_assumption1(m.stable(1.5)) == "stable"
    assert certify_assumption1(m.sn_gamma()) == "probe"


@pytest.mark.parametrize("name,q,s", [("brownian", 1.0, 1.0), ("sn_gamma", 1.0, 1.0),
                                      ("brownian", 0.5, 0.0), ("sn_compound_poisson", 1.0, 0.5)])
def test_finite_threshold_values_converge(name, q, s):
    res = verify_asymptote_sn(m.preset(name), q, s)
    assert res.converged
    assert res.cauchy_tail()


def test_stable_sequence_shrinks_towards_limit():
    # the approach is slow (power of eps); the gaps still shrink monotonically
    res = verify_asymptote_sn(m.stable(1.5), 1.0, 0.5)
    gaps = np.abs(res.scaled_values - res.limit_value)
    assert np.all(np.diff(gaps) < 0)


def test_finite_activity_limit_is_the_eps_to_zero_value():
    # for bounded variation with finite jump mass, 1 - E exp(-q tau_eps - s Y) tends to
    # a constant rather than 0; the normalised values carry the W' ~ (q + Pi)/d^2 factor
    cp = m.sn_compound_poisson()
    val = finite_activity_limit(cp, 1.0, 0.5)
    assert 0.0 < val < 1.0
    with pytest.raises(m.ModelError):
        finite_activity_limit(m.stable(1.5), 1.0, 0.5)


def test_two_sided_uses_negative_part():
    k = m.kou()
    assert asymptote_two_sided(k, 1.0, 0.3) == 0.3
    with pytest.raises(m.ModelError):
        asymptote_two_sided(m.brownian(), 1.0, 0.3)


def test_grid_validation():
    with pytest.raises(ValueError):
        verify_asymptote_sn(m.brownian(), 1.0, 0.0, eps_grid=[0.1, 0.2])
    with pytest.raises(ValueError):
        verify_asymptote_sn(m.brownian(), 1.0, 0.0, eps_grid=[0.1])


def test_assumption_error_is_exported():
    assert issubclass(AssumptionError, Exception)
