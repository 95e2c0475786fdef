import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from levy_drawdown import levy_models as m
from levy_drawdown.ladder import build_ladder, kou_roots, reconstruct_kappa


def test_spectrally_negative_kappa_is_phi_plus_beta():
    model = m.stable(1.5)
    lad = build_ladder(model)
    assert lad.kappa(2.0, 0.5) == pytest.approx(2.0 ** (1 / 1.5) + 0.5, rel=1e-12)
    assert lad.kappa00 == 0.0
    assert lad.d_L == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("sigma", [1.0, math.sqrt(2.0), 2.0])
def test_brownian_ladder_tail(sigma):
    # Phi(alpha) = sqrt(2 alpha)/sigma, so nu_L(t, inf) = sqrt(2)/(sigma sqrt(pi t))
    lad = build_ladder(m.brownian(0.0, sigma))
    t = np.array([0.01, 0.3, 1.0, 7.0])
    np.testing.assert_allclose(lad.nu_bar_L(t), math.sqrt(2) / (sigma * np.sqrt(math.pi * t)),
                               rtol=1e-8)


def test_excursion_tail_adds_killing_rate():
    lad = build_ladder(m.brownian(-0.3, 1.0))
    assert lad.kappa00 == pytest.approx(0.6, rel=1e-12)
    assert lad.excursion_tail(1.0) == pytest.approx(lad.nu_bar_L(1.0) + 0.6)


def kou_psi(model):
    """Rational form of the exponent, valid off the poles."""
    sig2 = model.sigma ** 2
    b = model.linear_coefficient
    lm, em = model.neg_jumps.intensity, model.neg_jumps.rate
    lp, ep = model.pos_jumps.intensity, model.pos_jumps.rate
    return lambda s: b * s + 0.5 * sig2 * s * s + lm * (em / (em + s) - 1) + lp * s / (ep - s)


@given(alpha=st.floats(0.0, 1e3))
def test_kou_roots_bracket_up_jump_rate(alpha):
    model = m.kou()
    r1, r2 = kou_roots(model, alpha)
    assert -1e-12 <= r1 < model.pos_jumps.rate < r2
    psi = kou_psi(model)
    for r in (r1, r2):
        assert psi(r) == pytest.approx(alpha, rel=1e-8, abs=1e-9)


def test_kou_roots_complex_argument():
    model = m.kou()
    z = np.array([1.0 + 2.0j, 0.3 - 5.0j])
    r1, r2 = kou_roots(model, z)
    psi = kou_psi(model)
    np.testing.assert_allclose(psi(r1), z, rtol=1e-9)
    np.testing.assert_allclose(psi(r2), z, rtol=1e-9)


@pytest.mark.parametrize("model", [m.kou(), m.brownian(0.0, math.sqrt(2.0)), m.stable(1.5),
                                   m.brownian(-0.3, 1.0)], ids=["kou", "bm2", "stable", "bm-"])
@pytest.mark.parametrize("alpha", [0.1, 1.0, 10.0])
def test_kappa_reconstruction(model, alpha):
    lad = build_ladder(model)
    ref = float(np.real(lad.kappa(alpha, 0.0)))
    assert reconstruct_kappa(lad, alpha) == pytest.approx(ref, rel=1e-8)


def test_ladder_rejects_other_two_sided_models():
    model = m.LevyModel(sigma=1.0, mu=0.0, neg_jumps=m.NoJumps(),
                        pos_jumps=m.DiscreteUpJumps(1.0, (0.5,), (1.0,)))
    with pytest.raises(m.ModelError):
        build_ladder(model)
