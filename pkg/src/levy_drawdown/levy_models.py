"""Lévy model specifications, their exponents and the built-in presets.

A model is the sum of a spectrally negative part, described by a Gaussian
coefficient ``sigma``, a centre ``mu`` and a negative jump family, plus an
optional compound Poisson part with positive jumps.  The Laplace exponent of
the spectrally negative part is

    psi(s) = -mu s + sigma^2 s^2 / 2 + int (e^{sx} - 1 - s x 1_{x>-1}) Pi(dx),

with ``Pi`` carried by the negative half line.  Every jump family returns
that integral in closed form as ``core(s) + s * compensator`` where
``compensator`` collects the part that is linear in ``s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np
from scipy import optimize, special

from ._validation import check_scalar, scalar_or_array

__all__ = [
    "ModelError",
    "DomainError",
    "ConvergenceError",
    "NoJumps",
    "ExponentialJumps",
    "StableJumps",
    "GammaJumps",
    "ExponentialUpJumps",
    "DiscreteUpJumps",
    "VariationClass",
    "LevyModel",
    "brownian",
    "stable",
    "sn_gamma",
    "sn_compound_poisson",
    "kou",
    "preset",
    "PRESETS",
]


class ModelError(ValueError):
    """Invalid or unsupported model specification."""


class DomainError(ValueError):
    """Argument outside the domain where an exponent is defined."""


class ConvergenceError(RuntimeError):
    """A root finder or iterative scheme did not converge."""


# --------------------------------------------------------------------------
# negative jump families
# --------------------------------------------------------------------------

class _NegJumps:
    family: ClassVar[str] = "none"
    finite_variation: ClassVar[bool] = True

    @property
    def total_mass(self) -> float:
        return 0.0

    @property
    def compensator(self) -> float:
        """Coefficient of the linear term split off the exponent integral."""
        return 0.0

    def core(self, s):
        return 0.0 * np.asarray(s)

    def core_prime(self, s):
        return 0.0 * np.asarray(s)

    def density(self, y):
        """Density of ``Pi(-dy)`` for ``y > 0``."""
        return 0.0 * np.asarray(y, dtype=float)

    def tail(self, y):
        """``Pi(-inf, -y)`` for ``y > 0``."""
        return 0.0 * np.asarray(y, dtype=float)

    def to_dict(self) -> dict:
        return {"family": self.family}


@dataclass(frozen=True)
class NoJumps(_NegJumps):
    """Absence of negative jumps."""

    family: ClassVar[str] = "none"


@dataclass(frozen=True)
class ExponentialJumps(_NegJumps):
    """Compound Poisson negative jumps with exponential sizes.

    Parameters
    ----------
    intensity : float
        Jump rate ``lambda``.
    rate : float
        Rate ``eta`` of the exponential jump size.
    """

    intensity: float
    rate: float
    family: ClassVar[str] = "exponential"

    def __post_init__(self):
        check_scalar(self.intensity, "intensity", lower=0.0, strict_lower=True)
        check_scalar(self.rate, "rate", lower=0.0, strict_lower=True)

    @property
    def total_mass(self) -> float:
        return float(self.intensity)

    @property
    def compensator(self) -> float:
        lam, eta = self.intensity, self.rate
        return lam * (-math.expm1(-eta) - eta * math.exp(-eta)) / eta

    def core(self, s):
        s = np.asarray(s)
        return -self.intensity * s / (self.rate + s)

    def core_prime(self, s):
        s = np.asarray(s)
        return -self.intensity * self.rate / (self.rate + s) ** 2

    def density(self, y):
        y = np.asarray(y, dtype=float)
        return self.intensity * self.rate * np.exp(-self.rate * y)

    def tail(self, y):
        y = np.asarray(y, dtype=float)
        return self.intensity * np.exp(-self.rate * y)

    def to_dict(self) -> dict:
        return {"family": self.family, "intensity": self.intensity, "rate": self.rate}


@dataclass(frozen=True)
class StableJumps(_NegJumps):
    """Totally skewed alpha-stable negative jumps, ``Pi(dx) = c |x|^{-1-alpha} dx``.

    The constant ``c`` is chosen so that the compensated exponent equals
    ``scale * s**alpha``.

    Parameters
    ----------
    index : float
        Stability index in ``(1, 2)``.
    scale : float
        Coefficient of ``s**alpha`` in the exponent.
    """

    index: float
    scale: float = 1.0
    family: ClassVar[str] = "stable_tail"
    finite_variation: ClassVar[bool] = False

    def __post_init__(self):
        check_scalar(self.index, "index", lower=1.0, upper=2.0,
                     strict_lower=True, strict_upper=True)
        check_scalar(self.scale, "scale", lower=0.0, strict_lower=True)

    @property
    def levy_constant(self) -> float:
        return self.scale / special.gamma(-self.index)

    @property
    def total_mass(self) -> float:
        return math.inf

    @property
    def compensator(self) -> float:
        return -self.levy_constant / (self.index - 1.0)

    def core(self, s):
        return self.scale * np.power(np.asarray(s), self.index)

    def core_prime(self, s):
        return self.scale * self.index * np.power(np.asarray(s), self.index - 1.0)

    def density(self, y):
        y = np.asarray(y, dtype=float)
        return self.levy_constant * y ** (-1.0 - self.index)

    def tail(self, y):
        y = np.asarray(y, dtype=float)
        return self.levy_constant * y ** (-self.index) / self.index

    def to_dict(self) -> dict:
        return {"family": self.family, "index": self.index, "scale": self.scale}


@dataclass(frozen=True)
class GammaJumps(_NegJumps):
    """Negative gamma-process jumps, ``Pi(dx) = beta |x|^{-1} e^{rate x} dx``.

    Parameters
    ----------
    shape : float
        Mass parameter ``beta``.
    rate : float
        Exponential damping ``alpha_g``.
    """

    shape: float
    rate: float
    family: ClassVar[str] = "gamma_tail"

    def __post_init__(self):
        check_scalar(self.shape, "shape", lower=0.0, strict_lower=True)
        check_scalar(self.rate, "rate", lower=0.0, strict_lower=True)

    @property
    def total_mass(self) -> float:
        return math.inf

    @property
    def compensator(self) -> float:
        return -self.shape * math.expm1(-self.rate) / self.rate

    def core(self, s):
        s = np.asarray(s)
        return -self.shape * np.log1p(s / self.rate)

    def core_prime(self, s):
        s = np.asarray(s)
        return -self.shape / (self.rate + s)

    def density(self, y):
        y = np.asarray(y, dtype=float)
        return self.shape * np.exp(-self.rate * y) / y

    def tail(self, y):
        y = np.asarray(y, dtype=float)
        return self.shape * special.exp1(self.rate * y)

    def to_dict(self) -> dict:
        return {"family": self.family, "shape": self.shape, "rate": self.rate}


# --------------------------------------------------------------------------
# positive jump families (compound Poisson only)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentialUpJumps:
    """Compound Poisson positive jumps with exponential sizes of rate ``rate``."""

    intensity: float
    rate: float
    family: ClassVar[str] = "exponential"

    def __post_init__(self):
        check_scalar(self.intensity, "intensity", lower=0.0, strict_lower=True)
        check_scalar(self.rate, "rate", lower=0.0, strict_lower=True)

    @property
    def mgf_abscissa(self) -> float:
        return float(self.rate)

    def char_part(self, u):
        u = np.asarray(u, dtype=float)
        return self.intensity * (1.0 - self.rate / (self.rate - 1j * u))

    def mgf_part(self, s):
        s = np.asarray(s)
        return self.intensity * s / (self.rate - s)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)

    def to_dict(self) -> dict:
        return {"family": self.family, "intensity": self.intensity, "rate": self.rate}


@dataclass(frozen=True)
class DiscreteUpJumps:
    """Compound Poisson positive jumps taking finitely many sizes."""

    intensity: float
    sizes: tuple
    probs: tuple
    family: ClassVar[str] = "point_masses"

    def __post_init__(self):
        check_scalar(self.intensity, "intensity", lower=0.0, strict_lower=True)
        sizes = tuple(float(v) for v in self.sizes)
        probs = tuple(float(v) for v in self.probs)
        if not sizes or len(sizes) != len(probs):
            raise ModelError("sizes and probs must be non-empty and of equal length")
        if min(sizes) <= 0 or not all(math.isfinite(v) for v in sizes):
            raise ModelError("positive jump sizes must be finite and > 0")
        if min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-12:
            raise ModelError("probs must be nonnegative and sum to 1")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "probs", probs)

    @property
    def mgf_abscissa(self) -> float:
        return math.inf

    def char_part(self, u):
        u = np.asarray(u, dtype=float)
        phi = sum(p * np.exp(1j * u * x) for x, p in zip(self.sizes, self.probs))
        return self.intensity * (1.0 - phi)

    def mgf_part(self, s):
        s = np.asarray(s)
        m = sum(p * np.exp(s * x) for x, p in zip(self.sizes, self.probs))
        return self.intensity * (m - 1.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return sum(p * (x >= v) for v, p in zip(self.sizes, self.probs)) + 0.0 * x

    def to_dict(self) -> dict:
        return {"family": self.family, "intensity": self.intensity,
                "sizes": list(self.sizes), "probs": list(self.probs)}


# --------------------------------------------------------------------------
# the model
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class VariationClass:
    """Path-variation class; ``drift`` is set only for bounded variation."""

    kind: str
    drift: float | None = None

    @property
    def bounded(self) -> bool:
        return self.kind == "bounded"


@dataclass(frozen=True)
class LevyModel:
    """Lévy process made of a spectrally negative part and optional positive jumps.

    Parameters
    ----------
    sigma : float
        Gaussian coefficient.
    mu : float
        Centre in the convention ``psi(s) = -mu s + sigma^2 s^2/2 + ...``.
        Presets convert their natural drift into this convention.
    neg_jumps : NoJumps, ExponentialJumps, StableJumps or GammaJumps
        Negative jump family.
    pos_jumps : ExponentialUpJumps or DiscreteUpJumps, optional
        Compound Poisson positive part. ``None`` means spectrally negative.
    label : str, optional
        Free-form tag, ignored by comparisons.
    """

    sigma: float = 0.0
    mu: float = 0.0
    neg_jumps: _NegJumps = field(default_factory=NoJumps)
    pos_jumps: ExponentialUpJumps | DiscreteUpJumps | None = None
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        check_scalar(self.sigma, "sigma", lower=0.0)
        check_scalar(self.mu, "mu")
        if not isinstance(self.neg_jumps, _NegJumps):
            raise ModelError("neg_jumps must be a negative jump family")
        if self.pos_jumps is not None and not isinstance(
                self.pos_jumps, (ExponentialUpJumps, DiscreteUpJumps)):
            raise ModelError("pos_jumps must be a compound Poisson family or None")
        if self.sigma == 0.0:
            if isinstance(self.neg_jumps, NoJumps):
                raise ModelError("sigma = 0 without negative jumps gives a "
                                 "monotone (subordinator-like) process")
            if self.neg_jumps.finite_variation and self.linear_coefficient <= 0.0:
                raise ModelError(
                    "bounded-variation model needs drift d > 0, got "
                    f"d = {self.linear_coefficient:.6g}")

    # -- structure -------------------------------------------------------

    @property
    def linear_coefficient(self) -> float:
        """Coefficient ``b`` in ``psi(s) = b s + sigma^2 s^2/2 + core(s)``.

        For bounded variation this is the drift ``d``.
        """
        return -self.mu + self.neg_jumps.compensator

    @property
    def is_spectrally_negative(self) -> bool:
        return self.pos_jumps is None

    def spectrally_negative_part(self) -> "LevyModel":
        if self.pos_jumps is None:
            return self
        return LevyModel(self.sigma, self.mu, self.neg_jumps, None, self.label)

    def classify_variation(self) -> VariationClass:
        if self.sigma == 0.0 and self.neg_jumps.finite_variation:
            return VariationClass("bounded", self.linear_coefficient)
        return VariationClass("unbounded")

    def brownian_params(self) -> tuple[float, float] | None:
        """``(drift, sigma)`` when the model is a Brownian motion with drift."""
        if self.pos_jumps is None and isinstance(self.neg_jumps, NoJumps):
            return self.linear_coefficient, self.sigma
        return None

    def stable_params(self) -> tuple[float, float] | None:
        """``(alpha, scale)`` when ``psi(s) = scale * s**alpha`` exactly."""
        nj = self.neg_jumps
        if (self.pos_jumps is None and isinstance(nj, StableJumps)
                and self.sigma == 0.0 and self.linear_coefficient == 0.0):
            return nj.index, nj.scale
        return None

    # -- exponents -------------------------------------------------------

    def _require_sn(self):
        if self.pos_jumps is not None:
            raise ModelError("psi is defined for the spectrally negative part only; "
                             "use spectrally_negative_part() or laplace_exponent()")

    def _psi(self, s):
        """Exponent of the spectrally negative part without domain checks."""
        s = np.asarray(s)
        return (self.linear_coefficient * s + 0.5 * self.sigma ** 2 * s * s
                + self.neg_jumps.core(s))

    def _psi_prime(self, s):
        s = np.asarray(s)
        return (self.linear_coefficient + self.sigma ** 2 * s
                + self.neg_jumps.core_prime(s))

    def psi(self, s):
        """Laplace exponent ``log E exp(s X_1)`` for ``Re(s) >= 0``."""
        self._require_sn()
        arr = np.asarray(s)
        if np.any(np.real(arr) < 0):
            raise DomainError("psi requires Re(s) >= 0")
        return scalar_or_array(self._psi(arr), s)

    def psi_prime(self, s):
        self._require_sn()
        arr = np.asarray(s)
        if np.any(np.real(arr) < 0):
            raise DomainError("psi_prime requires Re(s) >= 0")
        return scalar_or_array(self._psi_prime(arr), s)

    def laplace_exponent(self, s):
        """Exponent of the full (two-sided) model for real ``0 <= s`` below the
        positive-jump moment abscissa."""
        arr = np.asarray(s, dtype=float)
        if np.any(arr < 0):
            raise DomainError("laplace_exponent requires s >= 0")
        val = self._psi(arr)
        if self.pos_jumps is not None:
            if np.any(arr >= self.pos_jumps.mgf_abscissa):
                raise DomainError("s beyond the exponential moment of the positive jumps")
            val = val + self.pos_jumps.mgf_part(arr)
        return scalar_or_array(val, s)

    def char_exponent(self, u):
        """Characteristic exponent ``-log E exp(i u X_1)`` for real ``u``."""
        arr = np.asarray(u, dtype=float)
        val = -self._psi(1j * arr)
        if self.pos_jumps is not None:
            val = val + self.pos_jumps.char_part(arr)
        return scalar_or_array(val.astype(complex), u)

    def phi(self, q: float) -> float:
        """Largest root of ``psi(s) = q`` for ``q >= 0``."""
        self._require_sn()
        q = check_scalar(q, "q", lower=0.0)
        lo = 0.0
        if float(self._psi_prime(0.0)) < 0.0:
            lo = _bracket_root(lambda s: float(self._psi_prime(s)), 0.0, "psi'")
        if q == 0.0 and lo == 0.0:
            return 0.0
        f = lambda s: float(self._psi(s)) - q
        if lo == 0.0 and f(1.0) > 0.0:
            # tiny q: narrow the bracket geometrically so brentq never has to
            # bisect its way down through hundreds of binary orders
            hi = 1.0
            while hi > 1e-300 and f(hi * 1e-4) > 0.0:
                hi *= 1e-4
            lo = hi * 1e-4 if hi > 1e-300 else 0.0
        root = _bracket_root(f, lo, "psi - q")
        for _ in range(3):
            d = float(self._psi_prime(root))
            if d <= 0:
                break
            step = f(root) / d
            if not math.isfinite(step) or root - step <= lo:
                break
            root -= step
            if abs(step) <= 4e-16 * max(root, 1e-300):
                break
        return root

    def phi_complex(self, z):
        """Analytic continuation of ``phi`` to ``Re(z) > 0``."""
        self._require_sn()
        zz = np.asarray(z, dtype=complex)
        if np.any(zz.real <= 0):
            raise DomainError("phi_complex requires Re(z) > 0")
        bp = self.brownian_params()
        if bp is not None:
            m, sig = bp
            if sig == 0:
                out = zz / m
            else:
                out = (-m + np.sqrt(m * m + 2.0 * zz * sig * sig)) / (sig * sig)
            return scalar_or_array(out, z)
        sp = self.stable_params()
        if sp is not None:
            alpha, c = sp
            return scalar_or_array(np.power(zz / c, 1.0 / alpha), z)
        flat = zz.reshape(-1)
        s = np.array([self.phi(v) for v in flat.real], dtype=complex)
        n_steps = 24
        for k in range(1, n_steps + 1):
            target = flat.real + 1j * flat.imag * (k / n_steps)
            for _ in range(4 if k < n_steps else 30):
                step = (self._psi(s) - target) / self._psi_prime(s)
                s = s - step
                if k == n_steps and np.all(np.abs(step) <= 1e-15 * np.abs(s)):
                    break
        resid = np.abs(self._psi(s) - flat)
        if not np.all(resid <= 1e-9 * np.maximum(np.abs(flat), 1.0)) or np.any(s.real <= 0):
            raise ConvergenceError("complex continuation of phi did not converge; "
                                   f"max residual {resid.max():.3g}")
        return scalar_or_array(s.reshape(zz.shape), z)

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        out = {"sigma": self.sigma, "mu": self.mu, "neg_jumps": self.neg_jumps.to_dict(),
               "pos_jumps": None if self.pos_jumps is None else self.pos_jumps.to_dict()}
        if self.label is not None:
            out["label"] = self.label
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "LevyModel":
        """Build a model from its dictionary form or from ``{"preset": ..., "params": ...}``."""
        if "preset" in data:
            return preset(data["preset"], **data.get("params", {}))
        nj = data.get("neg_jumps") or {"family": "none"}
        pj = data.get("pos_jumps")
        return cls(sigma=float(data.get("sigma", 0.0)), mu=float(data.get("mu", 0.0)),
                   neg_jumps=_neg_from_dict(nj),
                   pos_jumps=None if pj is None else _pos_from_dict(pj),
                   label=data.get("label"))


def _bracket_root(f, lo: float, what: str) -> float:
    """Root of an increasing function to the right of ``lo`` where ``f(lo) <= 0``."""
    hi = max(2.0 * lo, 1.0) if lo >= 1e-4 or lo == 0.0 else lo * 1e4
    n = 0
    while f(hi) <= 0.0:
        lo, hi = hi, 2.0 * hi
        n += 1
        if n > 1100:
            raise ConvergenceError(f"could not bracket root of {what}; last bracket [{lo}, {hi}]")
    try:
        return optimize.brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                               maxiter=1000)
    except (RuntimeError, ValueError) as exc:
        raise ConvergenceError(f"root of {what} failed in bracket [{lo}, {hi}]: {exc}") from exc


def _neg_from_dict(d: dict) -> _NegJumps:
    fam = d.get("family", "none")
    if fam == "none":
        return NoJumps()
    if fam == "exponential":
        return ExponentialJumps(float(d["intensity"]), float(d["rate"]))
    if fam == "stable_tail":
        return StableJumps(float(d["index"]), float(d.get("scale", 1.0)))
    if fam == "gamma_tail":
        return GammaJumps(float(d["shape"]), float(d["rate"]))
    raise ModelError(f"unknown negative jump family {fam!r}")


def _pos_from_dict(d: dict):
    fam = d.get("family")
    if fam == "exponential":
        return ExponentialUpJumps(float(d["intensity"]), float(d["rate"]))
    if fam == "point_masses":
        return DiscreteUpJumps(float(d["intensity"]), tuple(d["sizes"]), tuple(d["probs"]))
    raise ModelError(f"unknown positive jump family {fam!r}")


# --------------------------------------------------------------------------
# presets
# --------------------------------------------------------------------------

def brownian(drift: float = 0.0, sigma: float = 1.0) -> LevyModel:
    """Brownian motion ``X_t = drift t + sigma W_t``; ``psi(s) = drift s + sigma^2 s^2/2``."""
    check_scalar(sigma, "sigma", lower=0.0, strict_lower=True)
    return LevyModel(sigma=float(sigma), mu=-float(drift), label="brownian")


def stable(alpha: float = 1.5) -> LevyModel:
    """Spectrally negative alpha-stable process with ``psi(s) = s**alpha``."""
    jumps = StableJumps(float(alpha))
    return LevyModel(sigma=0.0, mu=jumps.compensator, neg_jumps=jumps, label="stable")


def sn_gamma(d: float = 1.0, alpha: float = 1.0, beta: float = 0.8) -> LevyModel:
    """Drift minus a gamma subordinator: ``psi(s) = d s - beta log(1 + s/alpha)``."""
    check_scalar(d, "d", lower=0.0, strict_lower=True)
    jumps = GammaJumps(float(beta), float(alpha))
    return LevyModel(sigma=0.0, mu=jumps.compensator - float(d), neg_jumps=jumps,
                     label="sn_gamma")


def sn_compound_poisson(d: float = 1.0, lam: float = 2.0, eta: float = 3.0) -> LevyModel:
    """Drift minus exponential compound Poisson jumps:
    ``psi(s) = d s + lam (eta/(eta+s) - 1)``."""
    check_scalar(d, "d", lower=0.0, strict_lower=True)
    jumps = ExponentialJumps(float(lam), float(eta))
    return LevyModel(sigma=0.0, mu=jumps.compensator - float(d), neg_jumps=jumps,
                     label="sn_compound_poisson")


def kou(mu: float = 0.0, sigma: float = 1.0, lam_plus: float = 1.0, eta_plus: float = 3.0,
        lam_minus: float = 1.0, eta_minus: float = 2.0) -> LevyModel:
    """Double exponential jump diffusion.

    ``X_t = mu t + sigma W_t + (upward exponential jumps) - (downward
    exponential jumps)``, with exponent ``sigma^2 s^2/2 + mu s
    + lam_minus (eta_minus/(eta_minus+s) - 1) + lam_plus (eta_plus/(eta_plus-s) - 1)``.
    """
    check_scalar(sigma, "sigma", lower=0.0, strict_lower=True)
    neg = ExponentialJumps(float(lam_minus), float(eta_minus))
    pos = ExponentialUpJumps(float(lam_plus), float(eta_plus))
    return LevyModel(sigma=float(sigma), mu=neg.compensator - float(mu), neg_jumps=neg,
                     pos_jumps=pos, label="kou")


PRESETS = {
    "brownian": brownian,
    "stable": stable,
    "sn_gamma": sn_gamma,
    "sn_compound_poisson": sn_compound_poisson,
    "kou": kou,
}


def preset(name: str, **params) -> LevyModel:
    """Look up a preset constructor by name and call it with ``params``."""
    try:
        ctor = PRESETS[name]
    except KeyError:
        raise ModelError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    try:
        return ctor(**params)
    except TypeError as exc:
        raise ModelError(f"bad parameters for preset {name!r}: {exc}") from None
