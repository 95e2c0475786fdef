"""Ascending ladder exponent and the tail of the ladder-time jump measure.

Two model classes are supported.  For spectrally negative models
``kappa(alpha, beta) = Phi(alpha) + beta``.  For the double exponential
(Kou) jump diffusion ``kappa(alpha, beta) = (beta + rho1)(beta + rho2) /
(beta + eta+)`` where ``rho1 < eta+ < rho2`` are the two roots with
positive real part of ``psi(s) = alpha``.

The tail ``nu_L(t, inf)`` of the ladder-time Lévy measure is recovered by
Laplace inversion of ``(kappa(alpha, 0) - kappa(0, 0)) / alpha - d_L``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._validation import as_float_array, scalar_or_array
from .levy_models import ExponentialJumps, ExponentialUpJumps, LevyModel, ModelError
from .numerics import InversionConfig, integrate, laplace_invert

__all__ = [
    "LadderData",
    "build_ladder",
    "kou_roots",
    "nu_bar_L",
    "excursion_tail",
    "d_L_of",
    "reconstruct_kappa",
    "LADDER_INVERSION",
]

LADDER_INVERSION = InversionConfig("euler", 60, 1e-10)


def _is_kou(model: LevyModel) -> bool:
    return (model.sigma > 0 and isinstance(model.neg_jumps, ExponentialJumps)
            and isinstance(model.pos_jumps, ExponentialUpJumps))


def _kou_polynomials(model: LevyModel):
    """Numerator of ``psi(s) - alpha`` after clearing ``(eta- + s)(eta+ - s)``.

    Returned as the alpha-free part and the coefficient multiplying
    ``-alpha``, both in increasing powers of ``s``.
    """
    P = np.polynomial.polynomial
    sig2 = model.sigma ** 2
    b = model.linear_coefficient
    lm, em = model.neg_jumps.intensity, model.neg_jumps.rate
    lp, ep = model.pos_jumps.intensity, model.pos_jumps.rate
    denom = P.polymul([em, 1.0], [ep, -1.0])
    quad = [-(lm + lp), b, 0.5 * sig2]
    base = P.polyadd(P.polymul(quad, denom), P.polyadd([lm * em * ep, -lm * em],
                                                       [lp * ep * em, lp * ep]))
    return base, denom


def kou_roots(model: LevyModel, alpha):
    """The two roots of ``psi(s) = alpha`` with the largest real part.

    ``alpha`` may be complex (``Re(alpha) > 0``) or real ``>= 0``. Returns a
    pair of arrays ``(rho1, rho2)`` ordered by real part.
    """
    if not _is_kou(model):
        raise ModelError("kou_roots needs a Kou-type model")
    base, denom = _kou_polynomials(model)
    al = np.atleast_1d(np.asarray(alpha, dtype=complex)).reshape(-1)
    # coefficients in increasing order for each alpha; degree 4
    coeffs = base[None, :] - al[:, None] * np.pad(denom, (0, base.size - denom.size))[None, :]
    lead = coeffs[:, -1]
    comp = np.zeros((al.size, 4, 4), dtype=complex)
    comp[:, 1:, :3] = np.eye(3)
    comp[:, :, 3] = -coeffs[:, :4] / lead[:, None]
    roots = np.linalg.eigvals(comp)
    order = np.argsort(roots.real, axis=1)
    roots = np.take_along_axis(roots, order, axis=1)
    rho1, rho2 = roots[:, 2], roots[:, 3]
    shape = np.shape(alpha)
    if not np.iscomplexobj(alpha):
        rho1, rho2 = rho1.real, rho2.real
    return rho1.reshape(shape), rho2.reshape(shape)


@dataclass(frozen=True)
class LadderData:
    """Ladder exponent and derived quantities for one model.

    Attributes
    ----------
    kappa : callable
        ``kappa(alpha, beta)``, vectorised, accepting complex ``alpha``.
    kappa00 : float
        ``kappa(0, 0)``, the killing rate of the ladder process.
    d_L : float
        Drift of the ladder-time subordinator, from the numerical limit of
        ``(kappa(alpha, 0) - kappa00) / alpha``.
    d_H : float
        Drift of the ladder-height subordinator (1 for both classes).
    d_L_sequence : ndarray
        The values of ``(kappa(alpha, 0) - kappa00)/alpha`` at ``alpha = 10**k``.
    """

    model: LevyModel
    kappa: Callable
    kappa00: float
    d_L: float
    d_H: float
    d_L_sequence: np.ndarray = field(repr=False)
    inversion: InversionConfig = LADDER_INVERSION

    def transform(self, alpha):
        """``int_0^inf e^{-alpha t} nu_L(t, inf) dt``."""
        al = np.asarray(alpha)
        return (self.kappa(al, 0.0) - self.kappa00) / al - self.d_L

    def nu_bar_L(self, t):
        """Tail ``nu_L(t, inf)`` for ``t > 0``."""
        return laplace_invert(self.transform, t, self.inversion)

    def excursion_tail(self, t):
        """Excursion-length tail ``n(zeta > t) = nu_L(t, inf) + kappa(0, 0)``."""
        v = self.nu_bar_L(t)
        return scalar_or_array(np.atleast_1d(v) + self.kappa00, t)


def _extrapolate(seq: np.ndarray) -> float:
    """Aitken extrapolation from the last three terms."""
    a, b, c = seq[-3:]
    den = (c - b) - (b - a)
    if den == 0.0 or not np.isfinite(den):
        return float(c)
    out = c - (c - b) ** 2 / den
    return float(out)


def build_ladder(model: LevyModel, inversion: InversionConfig = LADDER_INVERSION) -> LadderData:
    """Build :class:`LadderData` for a spectrally negative or Kou-type model."""
    if model.is_spectrally_negative:
        kappa00 = model.phi(0.0)

        def kappa(alpha, beta=0.0):
            al = np.asarray(alpha)
            if np.iscomplexobj(al):
                return model.phi_complex(al) + beta
            flat = np.atleast_1d(al).reshape(-1)
            vals = np.array([model.phi(v) for v in flat]).reshape(np.shape(al))
            return scalar_or_array(vals + beta, alpha)
    elif _is_kou(model):
        eta_plus = model.pos_jumps.rate

        def kappa(alpha, beta=0.0):
            r1, r2 = kou_roots(model, alpha)
            return (beta + r1) * (beta + r2) / (beta + eta_plus)

        r10, r20 = kou_roots(model, 0.0)
        kappa00 = float(r10 * r20 / eta_plus)
        if abs(kappa00) < 1e-14:
            kappa00 = 0.0
    else:
        raise ModelError("ladder data only for spectrally negative or Kou-type models")
    alphas = 10.0 ** np.arange(2, 7)
    seq = np.array([(float(np.real(kappa(a, 0.0))) - kappa00) / a for a in alphas])
    d_l = _extrapolate(seq)
    if not (np.all(np.diff(seq) <= 0) or np.all(np.diff(seq) >= 0)):
        warnings.warn("ladder-time drift sequence is not monotone", RuntimeWarning)
    if d_l < 0:
        # a residue this small next to the sequence itself is extrapolation
        # error around a zero limit
        if -d_l <= 1e-2 * abs(seq[-1]):
            d_l = 0.0
        else:
            warnings.warn(f"negative ladder-time drift estimate {d_l:.3g}", RuntimeWarning)
    return LadderData(model, kappa, float(kappa00), float(d_l), 1.0, seq, inversion)


def nu_bar_L(ladder: LadderData, t):
    return ladder.nu_bar_L(t)


def excursion_tail(ladder: LadderData, t):
    return ladder.excursion_tail(t)


def d_L_of(ladder: LadderData) -> float:
    return ladder.d_L


def reconstruct_kappa(ladder: LadderData, alpha: float) -> float:
    """``kappa(0,0) + d_L alpha + alpha int_0^inf e^{-alpha t} nu_L(t, inf) dt``.

    The tail comes from numerical inversion and the integral from adaptive
    quadrature (in ``t = u^2`` on ``[0, 1]`` to absorb the ``t^{-1/2}``-type
    singularity), so agreement with ``kappa(alpha, 0)`` checks both.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    nu = lambda t: float(ladder.nu_bar_L(t))
    head = integrate(lambda u: 2.0 * u * math.exp(-alpha * u * u) * nu(u * u), 0.0, 1.0,
                     epsabs=0.0, epsrel=1e-10).value
    tail = integrate(lambda t: math.exp(-alpha * t) * nu(t), 1.0, np.inf,
                     epsabs=1e-13, epsrel=1e-10).value
    return ladder.kappa00 + ladder.d_L * alpha + alpha * (head + tail)
