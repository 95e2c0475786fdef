"""Monte Carlo estimators built on the compiled path engine."""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field, replace

import numba
import numpy as np

from ..levy_models import (DiscreteUpJumps, ExponentialJumps, ExponentialUpJumps, GammaJumps,
                      LevyModel, ModelError, NoJumps, StableJumps)
from .._validation import check_positive_int, check_scalar
from . import engine
from .rng import split_seed, uniforms_for

__all__ = [
    "SimConfig",
    "SimEstimate",
    "PathRecords",
    "PathTracker",
    "encode_model",
    "simulate_paths",
    "sample_increment",
    "path_increments",
    "bridge_uniforms",
    "monte_carlo_running_max",
    "estimate_tau_lt",
    "estimate_eta_lt",
    "estimate_eta_eps_lt",
    "estimate_running_max_cdf",
    "ladder_bias_budget",
    "HorizonError",
    "THREADS_ENV",
]

THREADS_ENV = "LEVY_DRAWDOWN_THREADS"
_EXHAUSTED_LIMIT = 1e-3


class HorizonError(RuntimeError):
    """The requested stopping time cannot be observed within the horizon."""


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo settings.

    Parameters
    ----------
    n_paths : int
    dt : float
        Fine grid step. Coarser grids of ``2 dt`` and ``4 dt`` are tracked on
        the same paths when ``ladder`` is true.
    horizon : float
        Paths are abandoned after this time; must be at least ``100 dt``.
    seed : int
        64-bit key of the counter-based generator.
    scheme : {"exact_increments", "euler"}
    ladder : bool
        Track the ``2 dt`` and ``4 dt`` grids for the bias budget.
    bridge : bool
        Register maxima reached between grid points by drawing the peak of
        the Gaussian part from its Brownian-bridge law. Only matters when
        ``sigma > 0``.
    chunk : int
        Paths per compiled call.
    threads : int, optional
        Worker threads; defaults to the ``LEVY_DRAWDOWN_THREADS`` environment
        variable, else numba's default. Results do not depend on it.
    """

    n_paths: int = 10_000
    dt: float = 1e-3
    horizon: float = 20.0
    seed: int = 12345
    scheme: str = "exact_increments"
    ladder: bool = True
    bridge: bool = True
    chunk: int = 1 << 16
    threads: int | None = None

    def __post_init__(self):
        check_positive_int(self.n_paths, "n_paths")
        check_scalar(self.dt, "dt", lower=0.0, strict_lower=True)
        check_scalar(self.horizon, "horizon", lower=0.0, strict_lower=True)
        if self.dt > self.horizon / 100.0:
            raise ValueError("dt must not exceed horizon/100")
        split_seed(self.seed)
        if self.scheme not in ("exact_increments", "euler"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        check_positive_int(self.chunk, "chunk")
        if self.threads is not None:
            check_positive_int(self.threads, "threads")

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.horizon / self.dt - 1e-9))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SimEstimate:
    """A Monte Carlo estimate with its discretisation diagnostics.

    Attributes
    ----------
    value, std_error : float
        Sample mean on the finest grid and ``sample sd / sqrt(n)``.
    n_effective : int
        Number of paths entering the mean.
    bias_note : str
        Direction of the grid-monitoring bias when known.
    ladder_values : tuple
        Estimates on grids ``dt, 2 dt, 4 dt`` (same paths).
    bias_budget : float
        See :func:`ladder_bias_budget`; the horizon truncation bound is
        added.
    exhausted_fraction : float
        Share of paths whose stopping time was not reached.
    """

    value: float
    std_error: float
    n_effective: int
    bias_note: str
    ladder_values: tuple = ()
    bias_budget: float = 0.0
    exhausted_fraction: float = 0.0
    flagged: bool = False
    diagnostics: dict = field(default_factory=dict)

    def agrees_with(self, target: float, n_se: float = 3.0) -> bool:
        return abs(self.value - target) <= n_se * self.std_error + self.bias_budget

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ladder_values"] = list(self.ladder_values)
        return out


# --------------------------------------------------------------------------
# model encoding
# --------------------------------------------------------------------------

def encode_model(model: LevyModel, scheme: str = "exact_increments"):
    """``(kind, scheme_code, par, sizes, cum)`` for the compiled engine."""
    nj, pj = model.neg_jumps, model.pos_jumps
    drift, sig = model.linear_coefficient, model.sigma
    sizes = np.zeros(1)
    cum = np.ones(1)
    code = engine.SCHEME_EXACT if scheme == "exact_increments" else engine.SCHEME_EULER
    infinite = isinstance(nj, (StableJumps, GammaJumps))
    if infinite and code == engine.SCHEME_EULER:
        raise ModelError("the Euler scheme needs finite jump activity")
    if isinstance(nj, NoJumps) and pj is None:
        return engine.KIND_BROWNIAN, code, np.array([drift, sig]), sizes, cum
    if isinstance(nj, StableJumps) and pj is None and sig == 0.0:
        alpha = nj.index
        unit = (-math.cos(0.5 * math.pi * alpha)) ** (1.0 / alpha) * nj.scale ** (1.0 / alpha)
        return engine.KIND_STABLE, code, np.array([drift, 0.0, alpha, unit]), sizes, cum
    if isinstance(nj, GammaJumps) and pj is None and sig == 0.0:
        return engine.KIND_GAMMA, code, np.array([drift, 0.0, nj.shape, nj.rate]), sizes, cum
    if isinstance(nj, (NoJumps, ExponentialJumps)):
        lam_dn = nj.intensity if isinstance(nj, ExponentialJumps) else 0.0
        eta_dn = nj.rate if isinstance(nj, ExponentialJumps) else 1.0
        lam_up, eta_up = 0.0, 1.0
        if isinstance(pj, ExponentialUpJumps):
            lam_up, eta_up = pj.intensity, pj.rate
        elif isinstance(pj, DiscreteUpJumps):
            lam_up, eta_up = pj.intensity, -1.0
            sizes = np.asarray(pj.sizes, dtype=float)
            cum = np.cumsum(np.asarray(pj.probs, dtype=float))
            cum[-1] = 1.0
        par = np.array([drift, sig, lam_dn, eta_dn, lam_up, eta_up])
        return engine.KIND_COMPOUND, code, par, sizes, cum
    raise ModelError("no increment sampler for this model/scheme pair")


def _set_threads(cfg: SimConfig):
    n = cfg.threads
    if n is None and os.environ.get(THREADS_ENV):
        n = int(os.environ[THREADS_ENV])
    if n is not None:
        numba.set_num_threads(min(int(n), numba.config.NUMBA_NUM_THREADS))


def path_increments(model: LevyModel, dt: float, n_steps: int, seed: int, path: int = 0,
                    scheme: str = "exact_increments", parts: bool = False):
    """Increments of one path exactly as the engine draws them.

    With ``parts`` the drift-plus-Gaussian part of each increment is returned
    as a second array.
    """
    kind, code, par, sizes, cum = encode_model(model, scheme)
    k0, k1 = split_seed(seed)
    inc, cont = engine.path_increments(kind, code, par, sizes, cum, float(dt), int(n_steps),
                                       int(path), k0, k1)
    return (inc, cont) if parts else inc


def bridge_uniforms(seed: int, path: int, n_obs: int, grid: int = 0) -> np.ndarray:
    """The ``(u_max, u_cross)`` pairs the engine uses on grid ``grid`` of ``path``."""
    return uniforms_for(seed, path, n_obs, slot=engine._SLOT_BRIDGE + grid)


def sample_increment(model: LevyModel, dt: float, rng_state=(0, 0, 0),
                     scheme: str = "exact_increments") -> float:
    """One increment of ``X`` over ``dt``.

    ``rng_state = (seed, path, step)`` addresses the counter-based stream.
    """
    seed, path, step = (int(v) for v in rng_state)
    return float(path_increments(model, dt, step + 1, seed, path, scheme)[step])


# --------------------------------------------------------------------------
# path records
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PathRecords:
    """Raw per-path output of :func:`simulate_paths` (grid axis ``dt, 2dt, 4dt``)."""

    config: SimConfig
    a: float
    bs: np.ndarray
    eps: np.ndarray
    ys: np.ndarray
    tau: np.ndarray
    eta: np.ndarray
    eta_eps: np.ndarray
    passage: np.ndarray
    steps: np.ndarray

    @property
    def n_grids(self) -> int:
        return self.tau.shape[1]


def simulate_paths(model: LevyModel, cfg: SimConfig, a: float | None = None, bs=(), eps=(),
                   ys=()) -> PathRecords:
    """Run the engine for all requested statistics at once."""
    kind, code, par, sizes, cum = encode_model(model, cfg.scheme)
    k0, k1 = split_seed(cfg.seed)
    bs = np.asarray(bs, dtype=float).reshape(-1)
    eps = np.asarray(eps, dtype=float).reshape(-1)
    ys = np.sort(np.asarray(ys, dtype=float).reshape(-1))
    n_str = 3 if cfg.ladder else 1
    _set_threads(cfg)
    parts = []
    for start in range(0, cfg.n_paths, cfg.chunk):
        n = min(cfg.chunk, cfg.n_paths - start)
        parts.append(engine.run_paths(kind, code, par, sizes, cum, cfg.dt, cfg.n_steps,
                                      start, n, k0, k1, -1.0 if a is None else float(a),
                                      bs, eps, ys, n_str, cfg.bridge))
    cat = [np.concatenate([p[i] for p in parts]) for i in range(5)]
    return PathRecords(cfg, -1.0 if a is None else float(a), bs, eps, ys, *cat)


# --------------------------------------------------------------------------
# reference tracker
# --------------------------------------------------------------------------

class PathTracker:
    """Plain-Python drawdown tracker used to cross-check the compiled engine.

    Feeds on increments one grid step at a time and keeps ``X``, ``M``,
    ``Y = M - X`` and ``G`` (last grid time at a new maximum), asserting
    ``Y >= 0``, ``M`` nondecreasing and ``G <= t`` after every step.

    Parameters
    ----------
    dt : float
        Grid step.
    a : float, optional
        Drawdown level for ``tau``.
    bs, eps : sequence of float
        Duration thresholds and perturbation levels.
    bridge_var : float, optional
        Variance of the Gaussian part over one step. When given, steps also
        take the continuous part and a uniform pair and look inside the step
        as the engine's bridge mode does.
    """

    def __init__(self, dt: float, a: float | None = None, bs=(), eps=(),
                 bridge_var: float | None = None):
        self.dt = float(dt)
        self.a = a
        self.bs = tuple(float(b) for b in bs)
        self.eps = tuple(float(e) for e in eps)
        self.bridge_var = bridge_var
        self.k = 0
        self.x = self.m = self.g = 0.0
        self.tau = None
        self.eta = {b: None for b in self.bs}
        self.eta_eps = {(e, b): None for e in self.eps for b in self.bs}
        self._start = {e: None for e in self.eps}

    @property
    def t(self) -> float:
        return self.k * self.dt

    @property
    def y(self) -> float:
        return self.m - self.x

    def _inside(self, dx, dc, u):
        """Highest point of the step and whether the level ``M - a`` was crossed."""
        x1 = self.x + dx
        if self.bridge_var is None:
            return x1, False
        v, x0, m = self.bridge_var, self.x, self.m
        mid = x0 + dc
        high = x1
        if mid >= m or 2.0 * (m - x0) * (m - mid) < engine.BRIDGE_TAIL * v:
            high = max(x0 + 0.5 * (dc + math.sqrt(dc * dc - 2.0 * v * math.log(u[0]))), x1)
        crossed = False
        if self.a is not None and self.tau is None and high < m:
            lo = m - self.a
            if mid <= lo:
                crossed = True
            elif 2.0 * (x0 - lo) * (mid - lo) < engine.BRIDGE_TAIL * v:
                crossed = u[1] < math.exp(-2.0 * (x0 - lo) * (mid - lo) / v)
        return high, crossed

    def step(self, dx: float, dc: float = 0.0, u=(0.5, 0.5)):
        m_before = self.m
        high, crossed = self._inside(dx, dc, u)
        mid = self.x + dc
        self.x += dx
        self.k += 1
        t = self.t
        for b in self.bs:
            if self.eta[b] is None and t - self.g >= b:
                self.eta[b] = t
        for e in self.eps:
            s0 = self._start[e]
            if s0 is not None:
                for b in self.bs:
                    if self.eta_eps[(e, b)] is None and t - s0 >= b:
                        self.eta_eps[(e, b)] = t
        if high >= self.m:
            self.m, self.g = high, t
            for e in self.eps:
                self._start[e] = None
        if self.y > 0.0:
            for e in self.eps:
                if self._start[e] is None and self.y > e:
                    self._start[e] = t
            if self.a is not None and self.tau is None and (crossed or self.y > self.a):
                level = crossed or (self.bridge_var is not None and self.m - mid >= self.a)
                self.tau = (t, self.a if level else self.y, self.m)
        assert self.y >= 0.0
        assert self.m >= m_before
        assert self.g <= t

    def run(self, increments, stride: int = 1, cont=None, uniforms=None):
        """Feed ``increments`` observed every ``stride`` steps.

        In bridge mode ``cont`` holds the per-step continuous parts and
        ``uniforms`` one pair per observation.
        """
        inc = np.asarray(increments, dtype=float)
        n = inc.size // stride * stride
        dxs = inc[:n].reshape(-1, stride).sum(axis=1)
        if self.bridge_var is None:
            for dx in dxs:
                self.step(float(dx))
            return self
        dcs = np.asarray(cont, dtype=float)[:n].reshape(-1, stride).sum(axis=1)
        for dx, dc, u in zip(dxs, dcs, np.asarray(uniforms)):
            self.step(float(dx), float(dc), u)
        return self


# --------------------------------------------------------------------------
# estimators
# --------------------------------------------------------------------------

_MIN_ORDER, _MAX_ORDER = 0.25, 1.0


def ladder_bias_budget(values, diff_se: float = 0.0) -> tuple[float, float]:
    """Bias allowance for the finest-grid estimate and the order used.

    With ``v1, v2, v4`` the estimates on grids ``dt, 2 dt, 4 dt`` the order
    is ``r = log2((v2 - v4)/(v1 - v2))`` clamped to ``[0.25, 1]`` (0.5 when
    the differences disagree in sign), and the allowance is
    ``(|v1 - v2| + 2 diff_se) / (2^r - 1)``, where ``diff_se`` is the
    standard error of the paired difference ``v1 - v2``.
    """
    v = list(values)
    if len(v) < 2:
        return 0.0, float("nan")
    d12 = v[0] - v[1]
    r = 0.5
    if len(v) >= 3 and d12 != 0.0:
        ratio = (v[1] - v[2]) / d12
        if ratio > 0:
            r = min(_MAX_ORDER, max(_MIN_ORDER, math.log2(ratio)))
    return (abs(d12) + 2.0 * diff_se) / (2.0 ** r - 1.0), r


def _mean_se(vals: np.ndarray):
    n = vals.size
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return mean, se


def _summarise(samples_by_grid, exhausted, cfg, q, note, extra=None) -> SimEstimate:
    vals = [float(np.mean(s)) for s in samples_by_grid]
    mean, se = _mean_se(samples_by_grid[0])
    if len(vals) > 1:
        _, diff_se = _mean_se(samples_by_grid[0] - samples_by_grid[1])
        budget, r = ladder_bias_budget(vals, diff_se)
    else:
        budget, r = 0.0, float("nan")
    frac = float(np.mean(exhausted))
    # an unfinished path contributes at most exp(-q horizon)
    budget += frac * math.exp(-q * cfg.horizon)
    diag = {"order_used": r, "dt": cfg.dt, "horizon": cfg.horizon}
    if extra:
        diag.update(extra)
    return SimEstimate(mean, se, int(samples_by_grid[0].size), note, tuple(vals), budget, frac,
                       frac > _EXHAUSTED_LIMIT, diag)


_TAU_NOTE = ("grid monitoring detects the first passage of the drawdown late and "
             "misses maxima between grid points; estimates move with dt")
_ETA_NOTE = ("grid monitoring misses returns to the maximum between grid points, "
             "merging excursions, so eta_b tends to be detected early")
_BRIDGE_NOTE = ("the Gaussian part is followed inside steps by bridge sampling; times "
                "are stamped at the end of the step and jumps at step ends, so a small "
                "dt-dependence remains")


def bias_note(model: LevyModel, cfg: SimConfig, grid_note: str = _TAU_NOTE) -> str:
    """Direction of the discretisation bias for ``model`` under ``cfg``."""
    return _BRIDGE_NOTE if cfg.bridge and model.sigma > 0 else grid_note


def estimate_tau_lt(model: LevyModel, q: float, s: float, a: float, cfg: SimConfig,
                    records: PathRecords | None = None) -> SimEstimate:
    """Estimate ``E exp(-q tau_a - s Y_{tau_a})``.

    The estimate's ``diagnostics["max_at_tau"]`` holds the running maximum at
    ``tau_a`` on the finest grid for paths that reached it.
    """
    q = check_scalar(q, "q", lower=0.0)
    s = check_scalar(s, "s", lower=0.0)
    a = check_scalar(a, "a", lower=0.0, strict_lower=True)
    if q == 0.0 and s == 0.0:
        return SimEstimate(1.0, 0.0, cfg.n_paths, "exact: the transform is 1", (1.0,), 0.0)
    rec = simulate_paths(model, cfg, a=a) if records is None else records
    if rec.a != a:
        raise ValueError("records were produced for a different level a")
    samples, exhausted = [], None
    for j in range(rec.n_grids):
        t, y = rec.tau[:, j, 0], rec.tau[:, j, 1]
        hit = t >= 0
        samples.append(np.where(hit, np.exp(-q * np.where(hit, t, 0.0) - s * y), 0.0))
        if j == 0:
            exhausted = ~hit
    est = _summarise(samples, exhausted, cfg, q, bias_note(model, cfg),
                     {"max_at_tau": rec.tau[exhausted == False, 0, 2]})  # noqa: E712
    if est.flagged and q == 0.0:
        raise HorizonError("tau_a not reached on more than 0.1% of paths; raise the horizon")
    return est


def estimate_eta_lt(model: LevyModel, q: float, b: float, cfg: SimConfig,
                    records: PathRecords | None = None) -> SimEstimate:
    """Estimate ``E exp(-q eta_b)`` with ``eta_b`` the first grid time with ``t - G_t >= b``."""
    q = check_scalar(q, "q", lower=0.0)
    b = check_scalar(b, "b", lower=0.0, strict_lower=True)
    if b < 10 * cfg.dt:
        raise ValueError("b must be at least 10 dt")
    if b > cfg.horizon:
        raise HorizonError("b exceeds the simulation horizon")
    if q == 0.0:
        return SimEstimate(1.0, 0.0, cfg.n_paths, "exact: eta_b is finite", (1.0,), 0.0)
    rec = simulate_paths(model, cfg, bs=[b]) if records is None else records
    k = _index_of(rec.bs, b, "b")
    samples = []
    exhausted = None
    for j in range(rec.n_grids):
        t = rec.eta[:, j, k]
        hit = t >= 0
        samples.append(np.where(hit, np.exp(-q * np.where(hit, t, 0.0)), 0.0))
        if j == 0:
            exhausted = ~hit
    return _summarise(samples, exhausted, cfg, q, bias_note(model, cfg, _ETA_NOTE))


def estimate_eta_eps_lt(model: LevyModel, q: float, b: float, eps: float, cfg: SimConfig,
                        records: PathRecords | None = None) -> SimEstimate:
    """Estimate ``E exp(-q eta_b^eps)``.

    ``eta_b^eps`` starts the duration clock when the drawdown first exceeds
    ``eps`` within an excursion and stops it at the return to the maximum.
    """
    q = check_scalar(q, "q", lower=0.0)
    b = check_scalar(b, "b", lower=0.0, strict_lower=True)
    eps = check_scalar(eps, "eps", lower=0.0, strict_lower=True)
    if b > cfg.horizon:
        raise HorizonError("b exceeds the simulation horizon")
    if b < 10 * cfg.dt:
        raise ValueError("b must be at least 10 dt")
    if q == 0.0:
        return SimEstimate(1.0, 0.0, cfg.n_paths, "exact: eta_b^eps is finite", (1.0,), 0.0)
    rec = simulate_paths(model, cfg, bs=[b], eps=[eps]) if records is None else records
    k = _index_of(rec.bs, b, "b")
    e = _index_of(rec.eps, eps, "eps")
    samples = []
    exhausted = None
    for j in range(rec.n_grids):
        t = rec.eta_eps[:, j, e, k]
        hit = t >= 0
        samples.append(np.where(hit, np.exp(-q * np.where(hit, t, 0.0)), 0.0))
        if j == 0:
            exhausted = ~hit
    return _summarise(samples, exhausted, cfg, q, bias_note(model, cfg, _ETA_NOTE))


def _index_of(arr: np.ndarray, value: float, name: str) -> int:
    idx = np.flatnonzero(arr == value)
    if idx.size == 0:
        raise ValueError(f"records hold no {name} = {value}")
    return int(idx[0])


def estimate_running_max_cdf(model: LevyModel, t: float, y_grid, cfg: SimConfig, p: float = 0.0):
    """Empirical ``P{M_{e_p ^ t} <= y}`` on ``y_grid``.

    Uses ``1 - E[1{T_y <= t} exp(-p T_y)]`` with ``T_y`` the first grid time
    with ``M > y``, which integrates the exponential time out exactly.
    Values between grid points are linearly interpolated; the curve is made
    nondecreasing by a running maximum. Returns a
    :class:`levy_drawdown.duration.RunningMaxCdf` with source
    ``"monte_carlo"``.
    """
    from ..duration import RunningMaxCdf

    t = check_scalar(t, "t", lower=0.0, strict_lower=True)
    p = check_scalar(p, "p", lower=0.0)
    ys = np.sort(np.asarray(y_grid, dtype=float).reshape(-1))
    if ys.size < 2 or np.any(ys <= 0) or np.any(np.diff(ys) <= 0):
        raise ValueError("y_grid must hold at least two distinct positive values")
    run_cfg = replace(cfg, horizon=t, ladder=False)
    # a geometric tail beyond the grid lets the empirical law reach 1
    tail = ys[-1] * 2.0 ** np.arange(1, 31)
    rec = simulate_paths(model, run_cfg, ys=np.concatenate([ys, tail]))
    tp = rec.passage[:, 0, :]
    passed = tp >= 0
    weights = np.where(passed, np.exp(-p * np.where(passed, tp, 0.0)), 0.0)
    raw = 1.0 - weights.mean(axis=0)
    se_all = weights.std(axis=0, ddof=1) / math.sqrt(weights.shape[0])
    vals_all = np.maximum.accumulate(raw)
    n = ys.size
    cdf_vals, se = vals_all[:n], se_all[:n]
    coarse = bool(ys[0] > 0.1 * ys[-1])
    diag = {"y_grid": ys.tolist(), "values": cdf_vals.tolist(), "std_error": se.tolist(),
            "coarse_near_zero": coarse, "t": t}
    knots_y = np.concatenate([[0.0], ys, tail])
    knots_v = np.concatenate([[0.0], vals_all])

    def evaluator(tt, y):
        if tt != t:
            raise ValueError(f"this Monte Carlo law was built for t = {t}")
        # below the first grid point interpolate towards (0, 0)
        return float(np.interp(y, knots_y, knots_v))

    return RunningMaxCdf(evaluator, p, "monte_carlo", float(se.max()), diag)


def monte_carlo_running_max(model: LevyModel, cfg: SimConfig, y_grid=None):
    """A ``cdf(p)`` source for :func:`levy_drawdown.duration.eta_lt_bounded`.

    Each call ``cdf(p)`` simulates ``P{M_{e_p ^ t} <= y}`` at ``t = cfg.horizon``
    from the same paths (same seed), so numerator and denominator of the
    bounded-variation formula share their random numbers.
    """
    ys = np.geomspace(1e-4, 50.0, 400) if y_grid is None else y_grid
    cache = {}

    def cdf(p: float):
        if p not in cache:
            cache[p] = estimate_running_max_cdf(model, cfg.horizon, ys, cfg, p=p)
        return cache[p]

    return cdf
