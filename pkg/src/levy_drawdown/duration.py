"""Laplace transform of the drawdown duration ``eta_b``.

``eta_b`` is the first time ``t`` at which ``t - G_t >= b``, where ``G_t`` is
the last time before ``t`` that the process sat at its running maximum.

Three routes are provided.

* Bounded-variation spectrally negative part: a ratio of integrals of
  ``P{M_{e_p ^ t} <= y}`` against the Lévy measure of the negative jumps.
* Unbounded variation: a ratio built from the excursion-length tail
  ``nu_L(t, inf) + kappa(0, 0)`` of the ladder process.
* Spectrally negative, unbounded variation: the excursion tail is replaced
  by ``g(t) = int_t^inf p_s(0)/s ds + Phi(0)`` (Kendall's identity), which
  only needs the transition density at 0.

The closed forms for the four presets are in :func:`example_closed_form`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize, special

from ._validation import check_scalar
from .asymptotics import certify_assumption1
from .ladder import LADDER_INVERSION, LadderData, build_ladder, kou_roots, _is_kou
from .levy_models import GammaJumps, LevyModel, ModelError, NoJumps, StableJumps
from .numerics import InversionConfig, QuadratureError, integrate, laplace_invert, \
    stable_density_at

__all__ = [
    "DurationQuery",
    "DurationResult",
    "RunningMaxCdf",
    "transition_density",
    "kendall_running_max_cdf",
    "brownian_running_max_cdf",
    "kendall_tail",
    "eta_lt_bounded",
    "eta_lt_unbounded",
    "eta_lt_kendall",
    "example_closed_form",
    "duration_lt",
    "EXAMPLE_NAMES",
]

EXAMPLE_NAMES = ("brownian", "stable", "gamma", "kou")

# tolerances for the nested quadratures of this module; the cross-path
# checks compare routes at 1e-10 so the defaults of ``integrate`` are too loose
_EPSREL = 1e-12
_TAIL_STOP = 1e-14


@dataclass(frozen=True)
class DurationQuery:
    """Arguments of ``E exp(-q eta_b)``."""

    q: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "q", check_scalar(self.q, "q", lower=0.0))
        object.__setattr__(self, "b", check_scalar(self.b, "b", lower=0.0, strict_lower=True))


@dataclass(frozen=True)
class DurationResult:
    value: float
    path: str
    source_diagnostics: dict = field(default_factory=dict)


# --------------------------------------------------------------------------
# integration helpers
# --------------------------------------------------------------------------

def _quad(f, a, b, epsrel=_EPSREL, limit=400):
    return integrate(f, a, b, epsabs=0.0, epsrel=epsrel, limit=limit).value


def _tail_integral(f: Callable[[float], float], start: float, epsrel: float = _EPSREL,
                   max_segments: int = 400) -> float:
    """``int_start^inf f`` over doubling segments.

    Summation stops once the geometric extrapolation of the remaining
    segments (ratio of the last two) falls below ``1e-14`` of the sum; that
    extrapolated tail is then added. Power-law integrands give a constant
    segment ratio, so the added tail is exact for them.
    """
    if start <= 0:
        raise ValueError("tail integral needs a positive start")
    total, prev, lo = 0.0, None, start
    for _ in range(max_segments):
        hi = 2.0 * lo
        seg = _quad(f, lo, hi, epsrel)
        total += seg
        if prev is not None and prev > 0 and seg >= 0:
            ratio = seg / prev
            if ratio < 1.0:
                rest = seg * ratio / (1.0 - ratio)
                if rest <= _TAIL_STOP * abs(total):
                    return total + rest
        if seg == 0.0 and total > 0.0:
            return total
        prev, lo = seg, hi
    raise QuadratureError(f"tail integral from {start} did not settle")


# --------------------------------------------------------------------------
# transition density
# --------------------------------------------------------------------------

def _gamma_density(d, alpha, beta, t, x):
    """Density of ``d t - Gamma(beta t, alpha)`` at ``x``."""
    z = d * t - x
    if z <= 0:
        return 0.0
    a = beta * t
    return math.exp(a * math.log(alpha) + (a - 1.0) * math.log(z) - alpha * z
                    - special.gammaln(a))


def _fourier_density(model: LevyModel, t: float, x: float) -> float:
    """Density of a spectrally negative ``X_t`` by Bromwich inversion of its
    moment generating function along ``Re(s) = c``.

    Right of the mean ``c`` is the saddle point of ``t psi(c) - c x``, which
    removes most of the oscillation and the cancellation in the light tail.
    Elsewhere ``c = 0`` and the cosine/sine parts go to the oscillatory rule.
    """
    psi = lambda s: complex(model._psi(s))
    c = 0.0
    if x > t * float(model._psi_prime(0.0)):
        h = lambda v: t * float(model._psi_prime(v)) - x
        hi = 1.0
        while h(hi) < 0.0:
            hi *= 2.0
        c = optimize.brentq(h, 0.0, hi, xtol=1e-14, rtol=1e-12)
    e0 = t * psi(c).real - c * x if c > 0 else 0.0
    if e0 < -745.0:
        # the saddle bound e^{e0} already underflows
        return 0.0
    g = lambda u: np.exp(t * psi(c + 1j * u) - (c + 1j * u) * x - e0) if c > 0 \
        else np.exp(t * psi(1j * u))
    cut = 1.0
    while abs(g(cut)) > 1e-17:
        cut *= 2.0
        if cut > 1e12:
            raise ModelError("characteristic function does not decay; no density")
    norm = integrate(lambda u: abs(g(u)), 0.0, cut, epsabs=0.0, epsrel=1e-6, limit=1000).value
    tol = dict(epsabs=1e-14 * norm, epsrel=1e-11, limit=2000)
    if c > 0:
        val = integrate(lambda u: g(u).real, 0.0, cut, **tol).value
        return math.exp(e0) * val / math.pi
    if x == 0.0:
        return integrate(lambda u: g(u).real, 0.0, cut, **tol).value / math.pi
    # Re(e^{-iux} g) = Re g cos(ux) + Im g sin(ux)
    re = integrate(lambda u: g(u).real, 0.0, cut, weight="cos", wvar=x, **tol).value
    im = integrate(lambda u: g(u).imag, 0.0, cut, weight="sin", wvar=x, **tol).value
    return (re + im) / math.pi


def transition_density(model: LevyModel, t: float, x: float) -> float:
    """Density ``p_t(x)`` of ``X_t``.

    Closed forms are used for Brownian motion, the pure stable model (series
    near 0) and drift minus a gamma subordinator. Other unbounded-variation
    spectrally negative models with an integrable characteristic function
    use Fourier inversion.
    """
    t = check_scalar(t, "t", lower=0.0, strict_lower=True)
    x = float(x)
    bp = model.brownian_params()
    if bp is not None:
        m, sig = bp
        return math.exp(-(x - m * t) ** 2 / (2.0 * sig * sig * t)) / (sig * math.sqrt(2.0 * math.pi * t))
    sp = model.stable_params()
    if sp is not None:
        alpha, c = sp
        if abs((c * t) ** (-1.0 / alpha) * x) <= 1.0:
            return float(stable_density_at(alpha, c * t, x))
        return _fourier_density(model, t, x)
    nj = model.neg_jumps
    if (model.pos_jumps is None and model.sigma == 0.0 and isinstance(nj, GammaJumps)):
        return _gamma_density(model.linear_coefficient, nj.rate, nj.shape, t, x)
    if model.pos_jumps is None and (model.sigma > 0.0 or isinstance(nj, StableJumps)):
        return _fourier_density(model, t, x)
    raise ModelError("no transition density available for this model "
                     "(bounded variation with atoms or non-integrable characteristic function)")


# --------------------------------------------------------------------------
# law of the running maximum
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RunningMaxCdf:
    """``(t, y) -> P{M_{e_p ^ t} <= y}`` with its provenance.

    Attributes
    ----------
    evaluator : callable
        ``evaluator(t, y)`` for ``t > 0``, ``y >= 0``.
    p : float
        Rate of the independent exponential time (0 means none).
    source : {"kendall_density", "closed_form", "monte_carlo"}
    error_budget : float
        Relative quadrature tolerance for analytic sources, largest
        standard error for Monte Carlo.
    """

    evaluator: Callable[[float, float], float]
    p: float
    source: str
    error_budget: float
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.source not in ("kendall_density", "closed_form", "monte_carlo"):
            raise ValueError(f"unknown source {self.source!r}")

    def __call__(self, t: float, y: float) -> float:
        if y <= 0:
            return 0.0
        return float(self.evaluator(t, y))


def _gamma_kendall_integral(d, alpha, beta, p, t, y, epsrel):
    """``int p_s(y)/s w(s) ds`` for drift minus a gamma subordinator.

    In ``z = s d - y`` the integrand is ``z^{a0 - 1} G(z)`` with
    ``a0 = beta y / d`` and ``G`` bounded, so near ``z = 0`` the singular
    factor is integrated exactly after subtracting ``G(0)``.
    """
    a0 = beta * y / d
    la = math.log(alpha)

    def weight(s):
        if s > t:
            return 1.0
        return -math.expm1(-p * s) if p > 0 else 0.0

    def big_g(z):
        s = (y + z) / d
        w = weight(s)
        if w == 0.0:
            return 0.0
        bs = beta * s
        zlog = (beta * z / d) * math.log(z) if z > 0 else 0.0
        return w / (s * d) * math.exp(bs * la - special.gammaln(bs) - alpha * z + zlog)

    z_t = t * d - y
    z_a = z_t if z_t > 0 else 1.0
    g0 = big_g(0.0)
    head = g0 * z_a ** a0 / a0
    head += integrate(lambda z: z ** (a0 - 1.0) * (big_g(z) - g0), 0.0, z_a,
                      epsabs=0.0, epsrel=epsrel, limit=400).value
    return head + _tail_integral(lambda z: z ** (a0 - 1.0) * big_g(z), z_a, epsrel)


def kendall_running_max_cdf(model: LevyModel, p: float = 0.0,
                            epsrel: float = 1e-10) -> RunningMaxCdf:
    """Running-maximum law from Kendall's identity ``P{T_y in ds} = (y/s) p_s(y) ds``.

    ``P{M_{e_p ^ t} <= y} = 1 - exp(-Phi(0) y) + y int_0^inf p_s(y)/s w(s) ds``
    with ``w(s) = 1 - exp(-p s)`` for ``s <= t`` and 1 beyond.
    """
    model._require_sn()
    p = check_scalar(p, "p", lower=0.0)
    phi0 = model.phi(0.0)
    transition_density(model, 1.0, 0.5)  # fail early when no density exists
    nj = model.neg_jumps
    gamma_case = model.sigma == 0.0 and isinstance(nj, GammaJumps)

    def evaluator(t, y):
        if gamma_case:
            body = _gamma_kendall_integral(model.linear_coefficient, nj.rate, nj.shape,
                                           p, t, y, epsrel)
        else:
            h = lambda s: transition_density(model, s, y) / s
            body = 0.0
            if p > 0:
                # dyadic breakpoints towards 0 where the density changes scale
                pts = [t * 2.0 ** -k for k in range(1, 12)]
                body = integrate(lambda s: h(s) * -math.expm1(-p * s), 0.0, t, epsabs=0.0,
                                 epsrel=epsrel, limit=400, points=pts).value
            body += _tail_integral(h, t, epsrel)
        return -math.expm1(-phi0 * y) + y * body

    return RunningMaxCdf(evaluator, p, "kendall_density", epsrel)


def brownian_running_max_cdf(drift: float, sigma: float) -> RunningMaxCdf:
    """Reflection-principle law of ``M_t`` for ``drift t + sigma W_t``."""

    def evaluator(t, y):
        st = sigma * math.sqrt(t)
        return float(special.ndtr((y - drift * t) / st)
                     - math.exp(2.0 * drift * y / sigma ** 2) * special.ndtr((-y - drift * t) / st))

    return RunningMaxCdf(evaluator, 0.0, "closed_form", 0.0)


def kendall_tail(model: LevyModel, t: float) -> float:
    """``int_t^inf p_s(0)/s ds + Phi(0)``, the limit of ``P{M_t <= y}/y`` as ``y -> 0``."""
    model._require_sn()
    return _tail_integral(lambda s: transition_density(model, s, 0.0) / s, t) + model.phi(0.0)


# --------------------------------------------------------------------------
# theorem routes
# --------------------------------------------------------------------------

def _query(q, b):
    return q if isinstance(q, DurationQuery) else DurationQuery(q, b)


def _jump_density(model: LevyModel):
    nj = model.neg_jumps
    if isinstance(nj, NoJumps):
        raise ModelError("bounded-variation route needs negative jumps")
    return lambda y: float(nj.density(y))


def _measure_integral(cdf: RunningMaxCdf, t: float, pi) -> float:
    """``int_0^inf P{M_{e_p ^ t} <= y} Pi(-dy)``."""
    eps = max(cdf.error_budget, 1e-10)
    f = lambda y: cdf(t, y) * pi(y)
    return _quad(f, 0.0, 1.0, eps) + _tail_integral(f, 1.0, eps)


def eta_lt_bounded(model: LevyModel, q, b: float | None = None,
                   cdf: Callable[[float], RunningMaxCdf] | None = None) -> DurationResult:
    """``E exp(-q eta_b)`` when the spectrally negative part has bounded variation.

    ``e^{-qb} int P{M_b <= y} Pi(-dy) / (q + int P{M_{e_q ^ b} <= y} Pi(-dy))``.

    Parameters
    ----------
    cdf : callable, optional
        ``cdf(p)`` returning a :class:`RunningMaxCdf` for rate ``p``. Defaults
        to the Kendall-density source, which needs a spectrally negative model
        with a transition density. Models with positive jumps must supply
        one (for instance a Monte Carlo source).
    """
    query = _query(q, b)
    sn = model.spectrally_negative_part()
    if not sn.classify_variation().bounded:
        raise ModelError("eta_lt_bounded needs a bounded-variation spectrally negative part")
    certify_assumption1(sn)
    if query.q == 0.0:
        return DurationResult(1.0, "theorem", {"note": "q = 0 limit"})
    if cdf is None:
        if not model.is_spectrally_negative:
            raise ModelError("models with positive jumps need an explicit running-maximum source")
        cdf = lambda p: kendall_running_max_cdf(model, p)
    pi = _jump_density(sn)
    cdf0, cdfq = cdf(0.0), cdf(query.q)
    num = _measure_integral(cdf0, query.b, pi)
    den = _measure_integral(cdfq, query.b, pi)
    value = math.exp(-query.q * query.b) * num / (query.q + den)
    diag = {"source": cdf0.source, "error_budget": max(cdf0.error_budget, cdfq.error_budget),
            "numerator_integral": num, "denominator_integral": den}
    return DurationResult(value, "theorem", diag)


def _ratio(q, b, tail_b, weighted, kappa00):
    top = math.exp(-q * b) * (tail_b + kappa00)
    return top / (weighted + math.exp(-q * b) * tail_b + kappa00)


def eta_lt_unbounded(model: LevyModel, q, b: float | None = None,
                     ladder: LadderData | None = None) -> DurationResult:
    """``E exp(-q eta_b)`` from the ladder excursion tail.

    ``e^{-qb}(nu(b) + k) / (int_0^b q e^{-qt} nu(t) dt + e^{-qb} nu(b) + k)``
    with ``nu = nu_L(., inf)`` and ``k = kappa(0, 0)``.
    """
    query = _query(q, b)
    sn = model.spectrally_negative_part()
    if sn.classify_variation().bounded:
        raise ModelError("eta_lt_unbounded needs an unbounded-variation spectrally negative part")
    if not (sn.sigma > 0 or isinstance(sn.neg_jumps, StableJumps)):
        raise ModelError("transition density of the model is not known to be bounded")
    certify_assumption1(sn)
    if query.q == 0.0:
        return DurationResult(1.0, "theorem", {"note": "q = 0 limit"})
    lad = build_ladder(model) if ladder is None else ladder
    qq, bb = query.q, query.b
    nu = lambda t: float(lad.nu_bar_L(t))
    # t = u^2 absorbs the t^{-1/2} growth of the tail at 0
    weighted = _quad(lambda u: 2.0 * u * qq * math.exp(-qq * u * u) * nu(u * u), 0.0,
                     math.sqrt(bb), epsrel=1e-10)
    value = _ratio(qq, bb, nu(bb), weighted, lad.kappa00)
    diag = {"kappa00": lad.kappa00, "d_L": lad.d_L, "nu_bar_L_at_b": nu(bb),
            "inversion": lad.inversion.method}
    return DurationResult(value, "theorem", diag)


def eta_lt_kendall(model: LevyModel, q, b: float | None = None) -> DurationResult:
    """``E exp(-q eta_b)`` with the excursion tail written through ``p_s(0)``.

    With ``h(s) = p_s(0)/s`` and ``g(t) = int_t^inf h + Phi(0)``, Fubini gives
    ``int_0^b q e^{-qt} g(t) dt = int_0^b h(s)(1 - e^{-qs}) ds
    + (1 - e^{-qb})(g(b) - Phi(0)) + (1 - e^{-qb}) Phi(0)``, so only
    single integrals of ``h`` are needed.
    """
    query = _query(q, b)
    model._require_sn()
    if model.classify_variation().bounded:
        raise ModelError("eta_lt_kendall needs unbounded variation")
    certify_assumption1(model)
    if query.q == 0.0:
        return DurationResult(1.0, "kendall", {"note": "q = 0 limit"})
    qq, bb = query.q, query.b
    h = lambda s: transition_density(model, s, 0.0) / s
    phi0 = model.phi(0.0)
    tail = _tail_integral(h, bb)
    head = _quad(lambda s: h(s) * -math.expm1(-qq * s), 0.0, bb)
    g_b = tail + phi0
    value = math.exp(-qq * bb) * g_b / (head + g_b)
    return DurationResult(value, "kendall", {"g_at_b": g_b, "phi0": phi0})


# --------------------------------------------------------------------------
# example displays
# --------------------------------------------------------------------------

def _example_brownian(mu, sigma, q, b):
    """Display with ``g(t) = 2 e^{-mu^2 t/(2 sigma^2)}/(sigma sqrt(2 pi t))
    - (2 mu / sigma^2) N(-mu sqrt(t)/sigma)``.

    The inner integral is taken in ``u = sqrt(t)`` to remove the ``t^{-1/2}``
    singularity.
    """
    sig2 = sigma * sigma

    def g(t):
        return (2.0 * math.exp(-mu * mu * t / (2.0 * sig2)) / (sigma * math.sqrt(2.0 * math.pi * t))
                - 2.0 * mu / sig2 * float(special.ndtr(-mu * math.sqrt(t) / sigma)))

    def g_times_u(u):
        # u * g(u^2) with the 1/u of the first term cancelled analytically
        return (2.0 * math.exp(-mu * mu * u * u / (2.0 * sig2)) / (sigma * math.sqrt(2.0 * math.pi))
                - 2.0 * mu / sig2 * u * float(special.ndtr(-mu * u / sigma)))

    weighted = _quad(lambda u: 2.0 * q * math.exp(-q * u * u) * g_times_u(u), 0.0, math.sqrt(b))
    gb = g(b)
    return math.exp(-q * b) * gb / (weighted + math.exp(-q * b) * gb)


def _example_stable(alpha, q, b):
    """``1 / (e^{qb} b^{1/alpha} int_0^b q e^{-qt} t^{-1/alpha} dt + 1)`` with the
    integral as ``q^{1/alpha} Gamma(1 - 1/alpha) P(1 - 1/alpha, q b)``."""
    a = 1.0 - 1.0 / alpha
    integral = q ** (1.0 / alpha) * special.gamma(a) * special.gammainc(a, q * b)
    return 1.0 / (math.exp(q * b) * b ** (1.0 / alpha) * integral + 1.0)


def _gamma_kernel(d, alpha, beta):
    """``s -> (d alpha)^{beta s} s^{beta s - 2} e^{-alpha s d} / Gamma(beta s)``."""
    lda = math.log(d * alpha)

    def k(s):
        bs = beta * s
        return math.exp(bs * lda + (bs - 2.0) * math.log(s) - alpha * s * d - special.gammaln(bs))

    return k


def _example_gamma(d, alpha, beta, q, b):
    k = _gamma_kernel(d, alpha, beta)
    big_a = lambda t: _tail_integral(k, t)
    # A(t) grows like log(1/t) at 0; split off [0, b/64] to help the extrapolation
    inner = lambda t: q * math.exp(-q * t) * big_a(t)
    weighted = _quad(inner, 0.0, b / 64.0) + _quad(inner, b / 64.0, b)
    ab = big_a(b)
    return math.exp(-q * b) * ab / (q + weighted + math.exp(-q * b) * ab)


def _example_kou(params, q, b):
    """Ladder display with ``kappa(0,0) = rho_{1,0} rho_{2,0} / eta+``.

    The tail ``nu_L`` comes from Talbot inversion of
    ``(kappa(a, 0) - kappa(0, 0))/a`` (no ladder-time drift since
    ``sigma > 0``); this is a separate route from :func:`eta_lt_unbounded`.
    """
    from .levy_models import kou
    model = kou(**params)
    eta_p = model.pos_jumps.rate
    r10, r20 = kou_roots(model, 0.0)
    k00 = float(r10 * r20 / eta_p)

    def transform(a):
        r1, r2 = kou_roots(model, a)
        return (r1 * r2 / eta_p - k00) / a

    cfg = InversionConfig("talbot", 32, 1e-12)
    nu = lambda t: float(laplace_invert(transform, t, cfg))
    weighted = _quad(lambda u: 2.0 * u * q * math.exp(-q * u * u) * nu(u * u), 0.0, math.sqrt(b),
                     epsrel=1e-10)
    nb = nu(b)
    return math.exp(-q * b) * (nb + k00) / (weighted + math.exp(-q * b) * nb + k00)


_EXAMPLE_DEFAULTS = {
    "brownian": {"mu": 0.0, "sigma": 1.0},
    "stable": {"alpha": 1.5},
    "gamma": {"d": 1.0, "alpha": 1.0, "beta": 0.8},
    "kou": {"mu": 0.0, "sigma": 1.0, "lam_plus": 1.0, "eta_plus": 3.0,
            "lam_minus": 1.0, "eta_minus": 2.0},
}


def example_closed_form(name: str, params: dict | None, q, b: float | None = None) -> float:
    """Evaluate the closed-form duration transform of a named example.

    Parameters
    ----------
    name : {"brownian", "stable", "gamma", "kou"}
    params : dict or None
        ``brownian``: ``mu`` (drift), ``sigma``; ``stable``: ``alpha``;
        ``gamma``: ``d``, ``alpha``, ``beta``; ``kou``: the arguments of
        :func:`levy_drawdown.levy_models.kou`. Missing keys take the preset values.
    q, b : float or DurationQuery

    Notes
    -----
    The Brownian ``g`` uses ``2 mu / sigma^2`` in front of ``N``; with
    ``sigma`` alone the expression is not homogeneous in the units of
    ``x`` and disagrees with ``int_t^inf p_s(0)/s ds`` unless ``sigma = 1``.
    For ``mu < 0`` the same expression equals that integral plus ``Phi(0)``.
    The gamma kernel carries ``(d alpha)^{beta s}`` inside the ``s`` integral.
    """
    if name not in _EXAMPLE_DEFAULTS:
        raise ValueError(f"unknown example {name!r}; choose from {EXAMPLE_NAMES}")
    query = _query(q, b)
    merged = dict(_EXAMPLE_DEFAULTS[name])
    unknown = set(params or {}) - set(merged)
    if unknown:
        raise ValueError(f"unknown parameters for {name}: {sorted(unknown)}")
    merged.update(params or {})
    if query.q == 0.0:
        return 1.0
    qq, bb = query.q, query.b
    if name == "brownian":
        sigma = check_scalar(merged["sigma"], "sigma", lower=0.0, strict_lower=True)
        return _example_brownian(float(merged["mu"]), sigma, qq, bb)
    if name == "stable":
        alpha = check_scalar(merged["alpha"], "alpha", lower=1.0, upper=2.0,
                             strict_lower=True, strict_upper=True)
        return _example_stable(alpha, qq, bb)
    if name == "gamma":
        d = check_scalar(merged["d"], "d", lower=0.0, strict_lower=True)
        al = check_scalar(merged["alpha"], "alpha", lower=0.0, strict_lower=True)
        be = check_scalar(merged["beta"], "beta", lower=0.0, strict_lower=True)
        if d * al < be:
            raise ValueError("gamma example needs d >= beta/alpha (no drift to -inf)")
        return _example_gamma(d, al, be, qq, bb)
    return _example_kou(merged, qq, bb)


# --------------------------------------------------------------------------
# dispatcher
# --------------------------------------------------------------------------

def _example_for(model: LevyModel):
    """Name and parameters of the example matching ``model``, if any."""
    bp = model.brownian_params()
    if bp is not None:
        return "brownian", {"mu": bp[0], "sigma": bp[1]}
    sp = model.stable_params()
    if sp is not None and sp[1] == 1.0:
        return "stable", {"alpha": sp[0]}
    nj = model.neg_jumps
    if model.pos_jumps is None and model.sigma == 0.0 and isinstance(nj, GammaJumps):
        return "gamma", {"d": model.linear_coefficient, "alpha": nj.rate, "beta": nj.shape}
    if _is_kou(model):
        return "kou", {"mu": -model.linear_coefficient, "sigma": model.sigma,
                       "lam_plus": model.pos_jumps.intensity, "eta_plus": model.pos_jumps.rate,
                       "lam_minus": model.neg_jumps.intensity,
                       "eta_minus": model.neg_jumps.rate}
    return None


def duration_lt(model: LevyModel, q, b: float | None = None, path: str = "auto",
                cdf: Callable[[float], RunningMaxCdf] | None = None) -> DurationResult:
    """Dispatch to a route for ``E exp(-q eta_b)``.

    ``path`` is one of ``"auto"``, ``"theorem"``, ``"kendall"`` or
    ``"example"``. ``"auto"`` picks the Kendall route for spectrally negative
    unbounded-variation models and the theorem route otherwise.
    """
    query = _query(q, b)
    sn = model.spectrally_negative_part()
    bounded = sn.classify_variation().bounded
    if path == "auto":
        path = "kendall" if (model.is_spectrally_negative and not bounded) else "theorem"
    if path == "theorem":
        if bounded:
            return eta_lt_bounded(model, query, cdf=cdf)
        return eta_lt_unbounded(model, query)
    if path == "kendall":
        return eta_lt_kendall(model, query)
    if path == "example":
        match = _example_for(model)
        if match is None:
            raise ModelError("model does not match any closed-form example")
        name, params = match
        return DurationResult(example_closed_form(name, params, query), "example",
                              {"example": name, "params": params})
    raise ValueError(f"unknown path {path!r}")
