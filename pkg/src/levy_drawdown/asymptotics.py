"""Small-threshold limits of the drawdown transform.

For a spectrally negative model the normalised quantity

    (W^(q)'(eps) / W^(q)(eps)) * (1 - E exp(-q tau_eps - s Y_{tau_eps}))

tends to ``s`` under unbounded variation and to ``s + (q - psi(s))/d``
under bounded variation.  The same limits hold after adding compound
Poisson positive jumps, with ``psi`` replaced by the exponent of the
spectrally negative part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_scalar
from .levy_models import LevyModel, ModelError, StableJumps
from .numerics import InversionConfig, integrate
from .scale_fn import ScaleFunction, assumption1_probe

__all__ = [
    "AssumptionError",
    "AsymptoteResult",
    "certify_assumption1",
    "asymptote_sn",
    "asymptote_two_sided",
    "verify_asymptote_sn",
    "finite_activity_limit",
    "DEFAULT_EPS_GRID",
]

DEFAULT_EPS_GRID = tuple(2.0 ** -k for k in range(2, 11))


class AssumptionError(ValueError):
    """The model could not be certified to satisfy ``x W'(x) -> 0`` at ``0+``."""


def certify_assumption1(model: LevyModel) -> str:
    """Certify ``lim_{x->0} x W'(x) = 0`` for the spectrally negative part.

    Returns the reason: ``"gaussian"``, ``"finite_jump_mass"`` or
    ``"stable"`` from the structural whitelist, else ``"probe"`` when the
    numerical integrability probe passes.  Raises :class:`AssumptionError`
    otherwise.
    """
    sn = model.spectrally_negative_part()
    if sn.sigma > 0:
        return "gaussian"
    if math.isfinite(sn.neg_jumps.total_mass):
        return "finite_jump_mass"
    if isinstance(sn.neg_jumps, StableJumps) and sn.linear_coefficient == 0.0:
        return "stable"
    if assumption1_probe(sn).passed:
        return "probe"
    raise AssumptionError("integrability probe failed; refusing to use the small-threshold limit")


def _limit(sn: LevyModel, q: float, s: float) -> float:
    var = sn.classify_variation()
    if not var.bounded:
        return s
    return s + (q - float(sn._psi(s))) / var.drift


def asymptote_sn(model: LevyModel, q: float, s: float) -> float:
    """Limit of the normalised drawdown transform for a spectrally negative model."""
    model._require_sn()
    q = check_scalar(q, "q", lower=0.0)
    s = check_scalar(s, "s", lower=0.0)
    certify_assumption1(model)
    return _limit(model, q, s)


def asymptote_two_sided(model: LevyModel, q: float, s: float) -> float:
    """Same limit for a model with compound Poisson positive jumps.

    The normaliser is ``W^(q + lambda+)'/W^(q + lambda+)`` of the spectrally
    negative part; the limit itself only involves that part's exponent.
    """
    if model.pos_jumps is None:
        raise ModelError("asymptote_two_sided needs a model with positive jumps")
    q = check_scalar(q, "q", lower=0.0)
    s = check_scalar(s, "s", lower=0.0)
    sn = model.spectrally_negative_part()
    certify_assumption1(sn)
    return _limit(sn, q, s)


@dataclass(frozen=True)
class AsymptoteResult:
    """Finite-threshold values of the normalised transform and their limit."""

    limit_value: float
    epsilon_grid: np.ndarray
    scaled_values: np.ndarray
    converged: bool

    @property
    def final_deviation(self) -> float:
        return abs(float(self.scaled_values[-1]) - self.limit_value)

    @property
    def monotone(self) -> bool:
        d = np.diff(self.scaled_values)
        return bool(np.all(d >= 0) or np.all(d <= 0))

    def cauchy_tail(self, n: int = 4) -> bool:
        """Whether the last ``n`` successive gaps shrink."""
        gaps = np.abs(np.diff(self.scaled_values))[-(n - 1):]
        return bool(np.all(np.diff(gaps) < 0))


def _tolerance(limit: float, rel_tol: float, abs_tol: float) -> float:
    return abs_tol if limit == 0.0 else rel_tol * abs(limit)


def verify_asymptote_sn(model: LevyModel, q: float, s: float, eps_grid=DEFAULT_EPS_GRID,
                        rel_tol: float = 0.02, abs_tol: float = 0.02,
                        inversion: InversionConfig | None = None) -> AsymptoteResult:
    """Evaluate the exact finite-threshold expression on a decreasing grid.

    With ``p = q - psi(s)`` and ``I = int_0^eps e^{-sx} W^(q)(x) dx`` the
    normalised quantity equals

        s - p (W'/W)(eps) I + s p I + p e^{-s eps} W^(q)(eps),

    which is computed from the scale function and quadrature. ``converged``
    compares the last value with the limit at ``rel_tol`` (or ``abs_tol``
    when the limit is 0).
    """
    model._require_sn()
    q = check_scalar(q, "q", lower=0.0)
    s = check_scalar(s, "s", lower=0.0)
    eps = np.asarray(eps_grid, dtype=float)
    if eps.ndim != 1 or eps.size < 2 or np.any(eps <= 0) or np.any(eps > 0.5):
        raise ValueError("eps_grid must hold at least two values in (0, 0.5]")
    if np.any(np.diff(eps) >= 0):
        raise ValueError("eps_grid must be strictly decreasing")
    limit = asymptote_sn(model, q, s)
    sf = ScaleFunction(model, q, inversion=inversion)
    p = q - float(model._psi(s))
    w = np.atleast_1d(sf.w(eps))
    wp = np.atleast_1d(sf.w_prime(eps))
    wfun = lambda x: math.exp(-s * x) * float(sf.w(x))
    vals = np.empty_like(eps)
    for i, e in enumerate(eps):
        integral = integrate(wfun, 0.0, float(e), epsabs=1e-14, epsrel=1e-10).value
        vals[i] = s - p * wp[i] / w[i] * integral + s * p * integral \
            + p * math.exp(-s * e) * w[i]
    converged = abs(vals[-1] - limit) <= _tolerance(limit, rel_tol, abs_tol)
    return AsymptoteResult(limit, eps, vals, bool(converged))


def finite_activity_limit(model: LevyModel, q: float, s: float) -> float:
    """``lim (1 - E exp(-q tau_eps - s Y_{tau_eps})) = (q + s d - psi(s)) / (q + Pi(-inf, 0))``

    for a bounded-variation spectrally negative part with finite jump mass;
    ``psi`` and ``d`` are those of that part.
    """
    q = check_scalar(q, "q", lower=0.0)
    s = check_scalar(s, "s", lower=0.0)
    sn = model.spectrally_negative_part()
    var = sn.classify_variation()
    mass = sn.neg_jumps.total_mass
    if not var.bounded or not math.isfinite(mass):
        raise ModelError("finite_activity_limit needs bounded variation and finite jump mass")
    return (q + s * var.drift - float(sn._psi(s))) / (q + mass)
