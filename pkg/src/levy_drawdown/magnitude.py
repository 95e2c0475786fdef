"""Laws of the drawdown magnitude at the first time it exceeds a level.

Notation: ``tau_a`` is the first time the drawdown ``Y = M - X`` exceeds
``a``; ``G`` is the last time before it at which ``X`` was at its running
maximum ``M``.  All formulas are for spectrally negative models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_scalar
from .levy_models import LevyModel
from .numerics import InversionConfig, integrate
from .scale_fn import ScaleFunction

__all__ = [
    "DrawdownQuery",
    "lt_running_max_exceeds",
    "mean_max_at_drawdown",
    "ricochet_lt",
    "quadruple_lt",
    "quadruple_lt_by_pasting",
]


@dataclass(frozen=True)
class DrawdownQuery:
    """Arguments of ``E exp(-q tau_a - r G - s Y - delta M)`` at ``tau_a``."""

    q: float = 0.0
    r: float = 0.0
    s: float = 0.0
    delta: float = 0.0
    a: float = 1.0

    def __post_init__(self):
        for name in ("q", "r", "s", "delta"):
            object.__setattr__(self, name, check_scalar(getattr(self, name), name, lower=0.0))
        object.__setattr__(self, "a", check_scalar(self.a, "a", lower=0.0, strict_lower=True))


def _log_derivative(model, q, a, inversion):
    sf = ScaleFunction(model, q, inversion=inversion)
    return float(sf.w_prime(a)) / float(sf.w(a))


def lt_running_max_exceeds(model: LevyModel, q: float, x: float, a: float,
                           inversion: InversionConfig | None = None) -> float:
    """``E[exp(-q T_x^+) ; M_{tau_a} >= x] = exp(-x W^(q)'(a) / W^(q)(a))``."""
    q = check_scalar(q, "q", lower=0.0)
    x = check_scalar(x, "x", lower=0.0)
    a = check_scalar(a, "a", lower=0.0, strict_lower=True)
    return math.exp(-_log_derivative(model, q, a, inversion) * x)


def mean_max_at_drawdown(model: LevyModel, a: float,
                         inversion: InversionConfig | None = None) -> float:
    """Mean ``W(a)/W'(a)`` of the (exponentially distributed) running maximum at ``tau_a``."""
    a = check_scalar(a, "a", lower=0.0, strict_lower=True)
    return 1.0 / _log_derivative(model, 0.0, a, inversion)


def _crash_factor(model, q, s, a, inversion):
    """``(Z_s W_s' - p W_s^2) / W_s`` at ``a`` for the tilted level ``p = q - psi(s)``."""
    ts = ScaleFunction(model, q, inversion=inversion).tilted(s)
    p = ts.q
    w = float(ts.w(a))
    wp = float(ts.w_prime(a))
    z = float(ts.z(a))
    return (z * wp - p * w * w) / w


def ricochet_lt(model: LevyModel, q: float, s: float, a: float,
                inversion: InversionConfig | None = None) -> float:
    """``E_a[exp(-q T_0^- - s (a - X_{T_0^-})) | T_0^- < T_a^+]``.

    Evaluated as ``(W(a)/W'(a)) (Z_s^(p) W_s^(p)' - p W_s^(p)^2)/W_s^(p)`` at
    ``a`` with ``p = q - psi(s)``. The raw value is returned; it is not
    clipped to ``[0, 1]``.
    """
    q = check_scalar(q, "q", lower=0.0)
    s = check_scalar(s, "s", lower=0.0)
    a = check_scalar(a, "a", lower=0.0, strict_lower=True)
    return _crash_factor(model, q, s, a, inversion) / _log_derivative(model, 0.0, a, inversion)


def quadruple_lt(model: LevyModel, query: DrawdownQuery,
                 inversion: InversionConfig | None = None) -> float:
    """``E exp(-q tau_a - r G_{tau_a} - s Y_{tau_a} - delta M_{tau_a})``.

    Computed as ``W^(q+r)(a) / (delta W^(q+r)(a) + W^(q+r)'(a))`` times the
    crash factor of :func:`ricochet_lt` without its ``W/W'`` prefactor.
    """
    sf = ScaleFunction(model, query.q + query.r, inversion=inversion)
    w = float(sf.w(query.a))
    wp = float(sf.w_prime(query.a))
    rise = w / (query.delta * w + wp)
    return rise * _crash_factor(model, query.q, query.s, query.a, inversion)


def quadruple_lt_by_pasting(model: LevyModel, query: DrawdownQuery,
                            inversion: InversionConfig | None = None) -> float:
    """Same quantity as :func:`quadruple_lt`, assembled from the two phases.

    The running maximum at ``tau_a`` is exponential with rate
    ``k0 = W'(a)/W(a)``.  Given ``M = x`` the rising phase contributes
    ``exp(-(k_{q+r} - k0) x)`` and the crash phase the ricochet transform.
    The product, weighted by ``exp(-delta x)``, is integrated against the
    exponential density by quadrature.
    """
    k0 = _log_derivative(model, 0.0, query.a, inversion)
    kq = _log_derivative(model, query.q + query.r, query.a, inversion)
    crash = ricochet_lt(model, query.q, query.s, query.a, inversion)
    rate = kq - k0 + query.delta
    integrand = lambda x: math.exp(-rate * x) * k0 * math.exp(-k0 * x)
    return crash * integrate(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-13).value
