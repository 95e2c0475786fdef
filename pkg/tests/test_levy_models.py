import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from levy_drawdown import levy_models as m


def test_brownian_exponent_closed_form():
    bm = m.brownian(drift=0.3, sigma=1.7)
    s = np.array([0.1, 1.0, 4.0])
    np.testing.assert_allclose(bm.psi(s), 0.3 * s + 0.5 * 1.7 ** 2 * s ** 2, rtol=1e-14)


def test_stable_exponent_is_pure_power():
    st_ = m.stable(1.5)
    s = np.array([0.01, 0.5, 2.0, 30.0])
    np.testing.assert_allclose(st_.psi(s), s ** 1.5, rtol=1e-11)


def test_gamma_exponent_closed_form():
    g = m.sn_gamma(d=1.0, alpha=1.0, beta=0.8)
    s = np.array([0.2, 1.0, 5.0])
    np.testing.assert_allclose(g.psi(s), s - 0.8 * np.log1p(s), rtol=1e-13)


def test_compound_poisson_exponent_closed_form():
    cp = m.sn_compound_poisson(d=1.0, lam=2.0, eta=3.0)
    s = np.array([0.2, 1.0, 5.0])
    np.testing.assert_allclose(cp.psi(s), s + 2.0 * (3.0 / (3.0 + s) - 1.0), rtol=1e-13)


def test_kou_exponent_closed_form():
    k = m.kou(mu=0.1, sigma=0.7, lam_plus=1.0, eta_plus=3.0, lam_minus=1.5, eta_minus=2.0)
    s = np.array([0.0, 0.5, 2.5])
    expected = (0.1 * s + 0.5 * 0.49 * s ** 2 + 1.0 * s / (3.0 - s) - 1.5 * s / (2.0 + s))
    np.testing.assert_allclose(k.laplace_exponent(s), expected, rtol=1e-12)


@given(q=st.floats(0.0, 50.0), name=st.sampled_from(["brownian", "stable", "sn_gamma",
                                                      "sn_compound_poisson"]))
def test_phi_inverts_psi(q, name):
    model = m.preset(name)
    root = model.phi(q)
    assert root >= 0.0
    assert model.psi(root) == pytest.approx(q, rel=1e-10, abs=1e-12)


def test_phi_of_zero_for_negative_drift():
    bm = m.brownian(drift=-0.4, sigma=1.0)
    assert bm.phi(0.0) == pytest.approx(0.8, rel=1e-12)


@given(z=st.complex_numbers(min_magnitude=0.1, max_magnitude=20.0, allow_nan=False,
                            allow_infinity=False).filter(lambda z: z.real > 0.05))
def test_phi_complex_solves_psi(z):
    model = m.brownian(0.2, 1.3)
    root = complex(model.phi_complex(z))
    assert abs(complex(model.psi(root)) - z) <= 1e-9 * abs(z)


@pytest.mark.parametrize("name,bounded", [("brownian", False), ("stable", False),
                                          ("sn_gamma", True), ("sn_compound_poisson", True)])
def test_variation_classes(name, bounded):
    assert m.preset(name).classify_variation().bounded is bounded


def test_dict_round_trip(presets):
    for model in presets.values():
        again = m.LevyModel.from_dict(model.to_dict())
        s = np.array([0.3, 1.1])
        np.testing.assert_allclose(again.laplace_exponent(s), model.laplace_exponent(s))


def test_preset_form_of_from_dict():
    model = m.LevyModel.from_dict({"preset": "stable", "params": {"alpha": 1.3}})
    assert model.psi(2.0) == pytest.approx(2.0 ** 1.3, rel=1e-11)


@pytest.mark.parametrize("bad", [lambda: m.preset("nope"), lambda: m.brownian(sigma=0.0),
                                 lambda: m.stable(2.5), lambda: m.sn_gamma(d=-1.0),
                                 lambda: m.preset("kou", wrong=1.0)])
def test_invalid_models_raise(bad):
    with pytest.raises((m.ModelError, ValueError)):
        bad()


def test_two_sided_model_has_no_sn_exponent():
    with pytest.raises(m.ModelError):
        m.kou().psi(1.0)


def test_spectrally_negative_part_drops_up_jumps():
    k = m.kou()
    sn = k.spectrally_negative_part()
    assert sn.is_spectrally_negative
    s = 0.7
    up = k.pos_jumps.intensity * s / (k.pos_jumps.rate - s)
    assert sn.psi(s) == pytest.approx(k.laplace_exponent(s) - up, rel=1e-12)
    assert math.isfinite(sn.phi(1.0))
