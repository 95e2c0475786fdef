"""Scale functions of spectrally negative Lévy processes.

``W^(q)`` is the function on ``(0, inf)`` whose Laplace transform is
``1 / (psi(s) - q)``; ``Z^(q)(x) = 1 + q int_0^x W^(q)``.  Tilted versions
use the exponent ``psi_s(u) = psi(u + s) - psi(s)`` at level
``p = q - psi(s)``.

Closed forms are used for Brownian motion and the pure stable process.
Everything else goes through numerical inversion with the contour shifted
by the largest real root, so the shifted transform is analytic in the right
half plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ._validation import as_float_array, check_scalar, scalar_or_array
from .levy_models import ConvergenceError, LevyModel, ModelError
from .numerics import (EULER_DEFAULT, TALBOT_DEFAULT, InversionConfig, integrate,
                       laplace_invert)

__all__ = [
    "ScaleFunction",
    "BoundaryReport",
    "ProbeResult",
    "assumption1_probe",
]


class _ModelExponent:
    """Adapter exposing what the scale-function code needs from a model."""

    def __init__(self, model: LevyModel):
        if model.pos_jumps is not None:
            raise ModelError("scale functions need a spectrally negative model")
        self.model = model
        self.tilt = 0.0
        var = model.classify_variation()
        self.bounded = var.bounded
        self.drift = var.drift

    def psi(self, u):
        return self.model._psi(u)

    def psi_prime(self, u):
        return self.model._psi_prime(u)

    def phi(self, level: float) -> float:
        return self.model.phi(level)

    def brownian_params(self):
        return self.model.brownian_params()

    def stable_params(self):
        return self.model.stable_params()

    @property
    def jump_mass(self) -> float:
        return self.model.neg_jumps.total_mass


class _TiltedExponent(_ModelExponent):
    """Exponent of the process under the exponential change of measure by ``s``."""

    def __init__(self, model: LevyModel, s: float):
        super().__init__(model)
        self.tilt = float(s)
        self._psi_s = float(model._psi(self.tilt))

    def psi(self, u):
        return self.model._psi(np.asarray(u) + self.tilt) - self._psi_s

    def psi_prime(self, u):
        return self.model._psi_prime(np.asarray(u) + self.tilt)

    def phi(self, level: float) -> float:
        # psi_s(u) = p  <=>  psi(u + s) = p + psi(s); the root may sit left of 0
        base_level = level + self._psi_s
        if base_level < 0:
            if base_level > -1e-12 * max(1.0, abs(self._psi_s)):
                base_level = 0.0
            else:
                raise ModelError("tilted level below the range of the tilted exponent")
        return self.model.phi(base_level) - self.tilt

    def brownian_params(self):
        bp = self.model.brownian_params()
        if bp is None:
            return None
        m, sig = bp
        return m + sig * sig * self.tilt, sig

    def stable_params(self):
        return None if self.tilt != 0.0 else self.model.stable_params()

    @property
    def jump_mass(self) -> float:
        # tilting changes the finite jump mass; only its finiteness matters here
        if math.isinf(self.model.neg_jumps.total_mass):
            return math.inf
        nj = self.model.neg_jumps
        if nj.total_mass == 0.0:
            return 0.0
        return float(nj.intensity * nj.rate / (nj.rate + self.tilt))


@dataclass(frozen=True)
class BoundaryReport:
    """Behaviour of ``W^(q)`` near 0 and for large ``x``.

    ``w0_sequence`` and ``w_prime0_sequence`` hold the values along
    ``x = 2**-k``; ``*_extrapolated`` are Richardson-type extrapolations used
    when the predicted limit is finite.
    """

    x_grid: np.ndarray
    w0_predicted: float
    w0_sequence: np.ndarray
    w0_extrapolated: float
    w_prime0_predicted: float
    w_prime0_sequence: np.ndarray
    w_prime0_extrapolated: float
    ratio_x: float
    ratio_value: float
    ratio_limit: float

    @property
    def w0_ok(self) -> bool:
        return _limit_matches(self.w0_predicted, self.w0_extrapolated, self.w0_sequence)

    @property
    def w_prime0_ok(self) -> bool:
        return _limit_matches(self.w_prime0_predicted, self.w_prime0_extrapolated,
                              self.w_prime0_sequence)


def _limit_matches(predicted, extrapolated, seq) -> bool:
    if math.isinf(predicted):
        # divergence shows up near 0; larger x may still be on a decreasing branch
        tail = np.asarray(seq)[len(seq) // 2:]
        return bool(np.all(np.diff(tail) > 0))
    if predicted == 0.0:
        return abs(extrapolated) <= 0.01 * max(abs(seq[0]), 1e-300)
    return abs(extrapolated - predicted) <= 0.01 * abs(predicted)


class ScaleFunction:
    """Evaluator of ``W^(q)``, ``W^(q)'`` and ``Z^(q)`` for one model and level.

    Parameters
    ----------
    model : LevyModel
        Spectrally negative model.
    q : float
        Level; must be ``>= 0`` for an untilted evaluator.
    backend : {"auto", "closed_form", "inversion"}
        ``"auto"`` picks the closed form when one exists.
    inversion : InversionConfig, optional
        Contour settings; Talbot with 24 nodes by default.

    Examples
    --------
    >>> from levy_drawdown.levy_models import stable
    >>> sf = ScaleFunction(stable(1.5), 0.0)
    >>> round(sf.w(1.0), 6)
    1.128379
    """

    def __init__(self, model: LevyModel, q: float = 0.0, backend: str = "auto",
                 inversion: InversionConfig | None = None, *, _exponent=None):
        self.model = model
        self._exp = _ModelExponent(model) if _exponent is None else _exponent
        if _exponent is None:
            q = check_scalar(q, "q", lower=0.0)
        self.q = float(q)
        self.inversion = TALBOT_DEFAULT if inversion is None else inversion
        self.root = self._exp.phi(self.q)
        closed = self._closed_form_kind()
        if backend == "auto":
            backend = "closed_form" if closed else "inversion"
        if backend == "closed_form" and not closed:
            raise ModelError("no closed-form scale function for this model")
        if backend not in ("closed_form", "inversion"):
            raise ValueError(f"unknown backend {backend!r}")
        self.backend = backend

    # -- structure -------------------------------------------------------

    @property
    def tilt(self) -> float:
        return self._exp.tilt

    @property
    def level(self) -> float:
        return self.q

    def _closed_form_kind(self):
        if self._exp.brownian_params() is not None:
            return "brownian"
        if self._exp.stable_params() is not None:
            return "stable"
        return None

    @property
    def w_at_zero(self) -> float:
        """``W^(q)(0+)``: ``1/d`` for bounded variation, else 0."""
        return 1.0 / self._exp.drift if self._exp.bounded else 0.0

    @property
    def w_prime_at_zero(self) -> float:
        """``W^(q)'(0+)`` as predicted from the model structure."""
        m = self.model
        if m.sigma > 0:
            return 2.0 / m.sigma ** 2
        mass = self._exp.jump_mass
        if math.isinf(mass):
            return math.inf
        return (self.q + mass) / self._exp.drift ** 2

    def tilted(self, s: float) -> "ScaleFunction":
        """Evaluator for ``W_s^(p)`` and ``Z_s^(p)`` with ``p = q - psi(s)``."""
        s = check_scalar(s, "s", lower=0.0)
        if s == 0.0 and self.tilt == 0.0:
            return self
        if self.tilt != 0.0:
            raise ModelError("tilting an already tilted evaluator is not supported")
        exp = _TiltedExponent(self.model, s)
        p = self.q - float(self.model._psi(s))
        backend = "auto" if self.backend == "closed_form" else self.backend
        return ScaleFunction(self.model, p, backend, self.inversion, _exponent=exp)

    # -- evaluation ------------------------------------------------------

    def w(self, x):
        """``W^(q)(x)``; zero for ``x < 0``."""
        xa = as_float_array(x)
        out = np.zeros_like(xa)
        pos = xa > 0
        if pos.any():
            out[pos] = self._w_pos(xa[pos])
        zero = xa == 0
        if zero.any():
            out[zero] = self.w_at_zero
        return scalar_or_array(out, x)

    def w_prime(self, x):
        """``W^(q)'(x)`` for ``x > 0`` from the transform ``s/(psi - q) - W(0+)``."""
        xa = as_float_array(x)
        if np.any(xa <= 0):
            raise ValueError("w_prime requires x > 0")
        return scalar_or_array(self._wp_pos(xa), x)

    def w_prime_fd(self, x, rel_step: float = 1e-5):
        """Central-difference derivative, used as a referee for :meth:`w_prime`."""
        xa = as_float_array(x)
        if np.any(xa <= 0):
            raise ValueError("w_prime_fd requires x > 0")
        h = xa * rel_step
        return scalar_or_array((self._w_pos(xa + h) - self._w_pos(xa - h)) / (2 * h), x)

    def w_prime_disagreement(self, x) -> np.ndarray:
        """Gap between the transform derivative and the difference quotient.

        The gap is measured relative to ``max(W'(x), W(x)/x)``: the quotient
        inherits the absolute error of ``W`` divided by the step, so where
        ``W'`` is tiny compared to ``W/x`` only that floor is meaningful.
        """
        xa = as_float_array(x)
        a = self._wp_pos(xa)
        b = np.atleast_1d(self.w_prime_fd(xa))
        return np.abs(a - b) / np.maximum(np.abs(a), self._w_pos(xa) / xa)

    def z(self, x):
        """``Z^(q)(x) = 1 + q int_0^x W^(q)``, by adaptive quadrature."""
        xa = as_float_array(x)
        if self.q == 0.0:
            return scalar_or_array(np.ones_like(xa), x)
        order = np.argsort(xa)
        out = np.ones_like(xa)
        acc, last = 0.0, 0.0
        wfun = lambda y: float(self._w_pos(np.array([y]))[0])
        for idx in order:
            xi = xa[idx]
            if xi <= 0:
                continue
            acc += integrate(wfun, last, xi).value
            last = xi
            out[idx] = 1.0 + self.q * acc
        return scalar_or_array(out, x)

    def w_error(self, x):
        """Gauge of the absolute error in :meth:`w` (zero for closed forms)."""
        xa = as_float_array(x)
        if self.backend == "closed_form":
            return scalar_or_array(4e-16 * np.abs(self._w_pos(xa)), x)
        res = laplace_invert(self._w_transform, xa, self.inversion, shift=self.root,
                             full_output=True)
        return res.est_err

    def _w_transform(self, u):
        return 1.0 / (self._exp.psi(u) - self.q)

    def _wp_transform(self, u):
        return u / (self._exp.psi(u) - self.q) - self.w_at_zero

    def _w_pos(self, x):
        if self.backend == "closed_form":
            return self._closed(x, derivative=False)
        return np.atleast_1d(laplace_invert(self._w_transform, x, self.inversion,
                                            shift=self.root))

    def _wp_pos(self, x):
        if self.backend == "closed_form":
            return self._closed(x, derivative=True)
        return np.atleast_1d(laplace_invert(self._wp_transform, x, self.inversion,
                                            shift=self.root))

    def _closed(self, x, derivative):
        bp = self._exp.brownian_params()
        if bp is not None:
            return _brownian_w(bp[0], bp[1], self.q, x, derivative)
        alpha, c = self._exp.stable_params()
        return _stable_w(alpha, c, self.q, x, derivative)

    # -- diagnostics -----------------------------------------------------

    def boundary_report(self, k_max: int = 20, ratio_x: float = 50.0) -> BoundaryReport:
        """Compare the behaviour at ``0+`` and the growth ratio with their predictions.

        ``W'(x)/W(x)`` at ``ratio_x`` is reported next to its limit, the root
        ``Phi(q)``; no convergence rate is asserted.
        """
        xs = 2.0 ** -np.arange(1, k_max + 1, dtype=float)
        wv = self._w_pos(xs)
        wp = self._wp_pos(xs)
        w_ext = 2 * wv[-1] - wv[-2]
        wp_ext = 2 * wp[-1] - wp[-2]
        ratio = float(self._wp_pos(np.array([ratio_x]))[0] / self._w_pos(np.array([ratio_x]))[0])
        return BoundaryReport(xs, self.w_at_zero, wv, float(w_ext), self.w_prime_at_zero, wp,
                              float(wp_ext), ratio_x, ratio, self.root)


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------

def _brownian_w(m, sig, q, x, derivative):
    """Scale function of ``m t + sig B_t`` at level ``q``."""
    s2 = sig * sig
    disc = m * m + 2.0 * q * s2
    if disc < 0:
        raise ModelError("negative discriminant in the Brownian scale function")
    delta = math.sqrt(disc) / s2
    omega = -m / s2
    if delta == 0.0:
        if derivative:
            return (2.0 / s2) * np.exp(omega * x) * (1.0 + omega * x)
        return (2.0 / s2) * x * np.exp(omega * x)
    a_plus, a_minus = omega + delta, omega - delta
    coef = 1.0 / (s2 * delta)
    if derivative:
        return coef * (a_plus * np.exp(a_plus * x) - a_minus * np.exp(a_minus * x))
    return coef * (np.exp(a_plus * x) - np.exp(a_minus * x))


def _stable_w(alpha, c, q, x, derivative, max_terms=2000):
    """Mittag-Leffler series of the scale function of ``psi(s) = c s**alpha``."""
    x = np.asarray(x, dtype=float)
    lx = np.log(x)
    if q == 0.0:
        k = np.zeros(1)
    else:
        # series peaks near k ~ (q x^alpha / c)^(1/alpha) / alpha; go well past it
        zmax = q * np.max(x) ** alpha / c
        kmax = int(min(max_terms, 40 + 3 * zmax ** (1 / alpha) + 10 * math.log1p(zmax)))
        k = np.arange(kmax + 1, dtype=float)
    a = alpha * (k + 1.0)
    logq = math.log(q) if q > 0 else 0.0
    base = k[None, :] * logq - (k[None, :] + 1.0) * math.log(c) - special.gammaln(a)[None, :]
    if derivative:
        expo = a - 2.0
        # a - 1 > 0 for every k since alpha > 1
        logs = base + np.log(a - 1.0)[None, :] + expo[None, :] * lx[:, None]
    else:
        logs = base + (a - 1.0)[None, :] * lx[:, None]
    top = logs.max(axis=1)
    return np.exp(top) * np.exp(logs - top[:, None]).sum(axis=1)


# --------------------------------------------------------------------------
# integrability probe
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ProbeResult:
    """Truncated L1 norms of ``(s psi'(s) - psi(s)) / psi(s)^2`` on a vertical line."""

    abscissa: float
    cutoffs: np.ndarray
    norms: np.ndarray
    passed: bool


def assumption1_probe(model: LevyModel, cutoffs=(1e1, 1e2, 1e3, 1e4, 1e5),
                      flat_ratio: float = 0.05) -> ProbeResult:
    """Integrability probe of ``(s psi' - psi)/psi^2`` along ``s0 - i u``.

    The norm over ``|u| <= U`` is computed for the given cutoffs.  The probe
    passes when the increments between consecutive cutoffs shrink and the
    last one is below ``flat_ratio`` times the total.
    """
    model._require_sn()
    s0 = model.phi(0.0) + 1.0

    def mag(u):
        s = complex(s0, -u)
        p = complex(model._psi(s))
        return abs((s * complex(model._psi_prime(s)) - p) / (p * p))

    edges = [0.0, 1.0] + [float(c) for c in cutoffs]
    partial = [integrate(mag, lo, hi, epsrel=1e-8, limit=400).value
               for lo, hi in zip(edges[:-1], edges[1:])]
    # conjugate symmetry doubles the one-sided integral
    norms = 2.0 * np.cumsum(partial)[1:]
    incs = np.diff(norms)
    passed = bool(np.all(np.diff(incs) < 0) and incs[-1] <= flat_ratio * norms[-1])
    return ProbeResult(s0, np.asarray(cutoffs, dtype=float), norms, passed)
