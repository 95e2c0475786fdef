"""Compiled path engine.

A model is encoded as an integer ``kind`` and a parameter vector:

==== ============ =====================================================
kind family       parameters (after ``drift, sigma``)
==== ============ =====================================================
0    Brownian     none
1    stable       ``alpha``, unit-time scale of the standard draw
2    gamma        ``beta`` (shape per unit time), ``alpha`` (rate)
3    compound     ``lam-``, ``eta-``, ``lam+``, ``eta+`` (``eta+ <= 0``
                  means discrete upward sizes from ``sizes``/``cum``)
==== ============ =====================================================

One run walks each path on the fine grid and tracks the drawdown on the
sub-grids of stride 1, 2 and 4 at the same time, so the three step sizes
share their random numbers.

With ``bridge`` set and ``sigma > 0`` each grid also looks inside its own
steps.  Over one step the drift-plus-Gaussian part is a Brownian bridge
given its endpoints (jumps are put at the end of the step), so the step's
maximum is drawn from the bridge law and a drawdown level crossed between
observations is caught with the bridge crossing probability.  Each grid
draws these from its own counter slot, so a grid behaves like the bridge
scheme at its own step size while sharing the increments with the others.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

if nb.config.THREADING_LAYER == "default":
    # TBB builds older than numba expects only produce a warning; OpenMP is
    # available wherever numba's wheels are
    nb.config.THREADING_LAYER = "omp"

from .rng import normal_pair, uniform_pair

KIND_BROWNIAN, KIND_STABLE, KIND_GAMMA, KIND_COMPOUND = 0, 1, 2, 3
SCHEME_EXACT, SCHEME_EULER = 0, 1

STRIDES = np.array([1, 2, 4], dtype=np.int64)
BRIDGE_TAIL = 50.0

_SLOT_GAUSS = 0
_SLOT_MAIN = 1
_SLOT_DOWN = 2
_SLOT_UP = 600
_SLOT_GAMMA = 1200
_SLOT_BRIDGE = 1800  # + grid index


@nb.njit(cache=True, inline="always")
def _poisson(u, mean, p0):
    """Poisson draw by inversion; ``p0 = exp(-mean)``."""
    k = 0
    p = p0
    c = p
    while u > c and k < 10000:
        k += 1
        p *= mean / k
        c += p
    return k


@nb.njit(cache=True)
def _gamma_draw(shape, step, path, k0, k1):
    """Gamma(shape, 1) by Marsaglia-Tsang, boosted for ``shape < 1``."""
    a = shape + 1.0 if shape < 1.0 else shape
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    slot = _SLOT_GAMMA
    while True:
        z, _ = normal_pair(step, slot, path, k0, k1)
        u, boost = uniform_pair(step, slot + 1, path, k0, k1)
        slot += 2
        v = 1.0 + c * z
        if v <= 0.0:
            continue
        v = v * v * v
        if math.log(u) < 0.5 * z * z + d - d * v + d * math.log(v):
            g = d * v
            if shape < 1.0:
                g *= math.exp(math.log(boost) / shape)
            return g


@nb.njit(cache=True, inline="always")
def _stable_draw(alpha, inv_alpha, expo, b, s, u1, u2):
    """Standard totally skewed (beta = -1) stable draw, Chambers-Mallows-Stuck.

    ``b`` and ``s`` are the skewness shift and scale of the method and
    ``expo = (1 - alpha)/alpha``.
    """
    v = math.pi * (u1 - 0.5)
    w = -math.log(u2)
    ab = alpha * (v + b)
    return (s * math.sin(ab) * math.exp(-inv_alpha * math.log(math.cos(v))
                                        + expo * math.log(math.cos(v - ab) / w)))


@nb.njit(cache=True)
def _exp_sum(n, rate, slot0, step, path, k0, k1):
    total = 0.0
    for j in range(0, n, 2):
        u1, u2 = uniform_pair(step, slot0 + j // 2, path, k0, k1)
        total -= math.log(u1)
        if j + 1 < n:
            total -= math.log(u2)
    return total / rate


@nb.njit(cache=True)
def _discrete_sum(n, sizes, cum, slot0, step, path, k0, k1):
    total = 0.0
    for j in range(n):
        u, _ = uniform_pair(step, slot0 + j, path, k0, k1)
        idx = 0
        while idx < cum.size - 1 and u > cum[idx]:
            idx += 1
        total += sizes[idx]
    return total


@nb.njit(cache=True)
def step_constants(kind, par, dt):
    """Per-step constants: ``c[0] = drift dt``, ``c[1] = sigma sqrt(dt)``, then
    family terms (stable: alpha, 1/alpha, (1-alpha)/alpha, CMS shift, CMS
    scale times ``(dt)^(1/alpha)``; gamma: shape dt, 1/rate; compound:
    lam- dt, eta-, lam+ dt, eta+, exp(-lam- dt), exp(-lam+ dt))."""
    c = np.zeros(8)
    c[0] = par[0] * dt
    c[1] = par[1] * math.sqrt(dt)
    if kind == KIND_STABLE:
        alpha = par[2]
        tpa = math.tan(0.5 * math.pi * alpha)
        c[2] = alpha
        c[3] = 1.0 / alpha
        c[4] = (1.0 - alpha) / alpha
        c[5] = math.atan(-tpa) / alpha
        c[6] = (1.0 + tpa * tpa) ** (0.5 / alpha) * par[3] * dt ** (1.0 / alpha)
    elif kind == KIND_GAMMA:
        c[2] = par[2] * dt
        c[3] = 1.0 / par[3]
    elif kind == KIND_COMPOUND:
        c[2] = par[2] * dt
        c[3] = par[3]
        c[4] = par[4] * dt
        c[5] = par[5]
        c[6] = math.exp(-c[2])
        c[7] = math.exp(-c[4])
    return c


@nb.njit(cache=True, inline="always")
def increment(kind, scheme, c, sizes, cum, step, path, k0, k1, z):
    """Increment over one step; ``z`` is the standard normal assigned to the step."""
    return c[0] + c[1] * z + jump_part(kind, scheme, c, sizes, cum, step, path, k0, k1)


@nb.njit(cache=True, inline="always")
def jump_part(kind, scheme, c, sizes, cum, step, path, k0, k1):
    """Non-Gaussian part of the increment over one step."""
    dx = 0.0
    if kind == KIND_STABLE:
        u1, u2 = uniform_pair(step, _SLOT_MAIN, path, k0, k1)
        dx += c[6] * _stable_draw(c[2], c[3], c[4], c[5], 1.0, u1, u2)
    elif kind == KIND_GAMMA:
        dx -= _gamma_draw(c[2], step, path, k0, k1) * c[3]
    elif kind == KIND_COMPOUND:
        u_dn, u_up = uniform_pair(step, _SLOT_MAIN, path, k0, k1)
        if scheme == SCHEME_EULER:
            n_dn = 1 if u_dn < c[2] else 0
            n_up = 1 if u_up < c[4] else 0
        else:
            n_dn = _poisson(u_dn, c[2], c[6]) if c[2] > 0 else 0
            n_up = _poisson(u_up, c[4], c[7]) if c[4] > 0 else 0
        if n_dn > 0:
            dx -= _exp_sum(n_dn, c[3], _SLOT_DOWN, step, path, k0, k1)
        if n_up > 0:
            if c[5] > 0:
                dx += _exp_sum(n_up, c[5], _SLOT_UP, step, path, k0, k1)
            else:
                dx += _discrete_sum(n_up, sizes, cum, _SLOT_UP, step, path, k0, k1)
    return dx


@nb.njit(cache=True, inline="always")
def bridge_peak(dc, var, u):
    """Maximum over a step of a Brownian bridge from 0 to ``dc`` with variance ``var``,
    by inversion of ``P(max > h) = exp(-2 h (h - dc) / var)``."""
    return 0.5 * (dc + math.sqrt(dc * dc - 2.0 * var * math.log(u)))


@nb.njit(cache=True, inline="always")
def bridge_crosses(lo, hi0, hi1, var, u):
    """Whether a bridge from ``hi0`` to ``hi1`` (both above ``lo``) dips below ``lo``."""
    return u < math.exp(-2.0 * (hi0 - lo) * (hi1 - lo) / var)


@nb.njit(cache=True)
def path_increments(kind, scheme, par, sizes, cum, dt, n_steps, path, k0, k1):
    """Increments of one path and their drift-plus-Gaussian parts, drawing
    random numbers exactly as ``run_paths``."""
    out = np.empty(n_steps)
    cont = np.empty(n_steps)
    c = step_constants(kind, par, dt)
    z1 = z2 = 0.0
    for k in range(n_steps):
        z = 0.0
        if c[1] > 0.0:
            if k % 2 == 0:
                z1, z2 = normal_pair(k // 2, _SLOT_GAUSS, path, k0, k1)
                z = z1
            else:
                z = z2
        cont[k] = c[0] + c[1] * z
        out[k] = cont[k] + jump_part(kind, scheme, c, sizes, cum, k, path, k0, k1)
    return out, cont


@nb.njit(cache=True, parallel=True)
def run_paths(kind, scheme, par, sizes, cum, dt, n_steps, path0, n_paths, k0, k1,
              a, bs, eps, ys, n_str, bridge):
    """Track drawdown statistics on ``n_str`` nested grids.

    Returns ``(tau, eta, eta_eps, passage, steps)`` where

    * ``tau[i, j, :] = (tau_a, Y at tau_a, M at tau_a)`` (``-1`` if unseen),
    * ``eta[i, j, k]`` is the first grid time with ``t - G_t >= bs[k]``,
    * ``eta_eps[i, j, e, k]`` is the same clock started when the drawdown
      first exceeds ``eps[e]`` in each excursion,
    * ``passage[i, j, m]`` is the first grid time with ``M > ys[m]``,
    * ``steps[i]`` is the number of fine steps walked.

    ``a <= 0`` disables ``tau``. A path stops once every requested time is
    found on every grid or after ``n_steps`` fine steps.
    """
    nb_, ne, ny = bs.size, eps.size, ys.size
    tau = np.full((n_paths, n_str, 3), -1.0)
    eta = np.full((n_paths, n_str, nb_), -1.0)
    eta_eps = np.full((n_paths, n_str, ne, nb_), -1.0)
    passage = np.full((n_paths, n_str, ny), -1.0)
    steps = np.zeros(n_paths, dtype=np.int64)
    c = step_constants(kind, par, dt)
    use_bridge = bridge and c[1] > 0.0
    var = c[1] * c[1]
    per_grid = (1 if a > 0 else 0) + nb_ + ne * nb_ + ny
    for i in nb.prange(n_paths):
        path = path0 + i
        x = 0.0
        m = np.zeros(n_str)
        g = np.zeros(n_str)
        start = np.full((n_str, ne), -1.0)
        nxt = np.zeros(n_str, dtype=np.int64)
        # position at each grid's last observation and the continuous part since
        x_obs = np.zeros(n_str)
        dc_acc = np.zeros(n_str)
        outstanding = per_grid * n_str
        z1 = z2 = 0.0
        k = 0
        while k < n_steps and outstanding > 0:
            z = 0.0
            if c[1] > 0.0:
                if k % 2 == 0:
                    z1, z2 = normal_pair(k // 2, _SLOT_GAUSS, path, k0, k1)
                    z = z1
                else:
                    z = z2
            dc = c[0] + c[1] * z
            x += dc + jump_part(kind, scheme, c, sizes, cum, k, path, k0, k1)
            k += 1
            for j in range(n_str):
                dc_acc[j] += dc
                stride = STRIDES[j]
                if k % stride != 0:
                    continue
                t = k * dt
                high = x
                mid = x
                crossed = False
                if use_bridge:
                    v = var * stride
                    mid = x_obs[j] + dc_acc[j]
                    lo = m[j] - a
                    # skip draws for events less likely than exp(-BRIDGE_TAIL)
                    want_max = mid >= m[j] or 2.0 * (m[j] - x_obs[j]) * (m[j] - mid) < BRIDGE_TAIL * v
                    want_cross = (a > 0 and tau[i, j, 0] < 0.0 and mid > lo
                                  and 2.0 * (x_obs[j] - lo) * (mid - lo) < BRIDGE_TAIL * v)
                    if want_max or want_cross:
                        u_max, u_cross = uniform_pair(k // stride - 1, _SLOT_BRIDGE + j,
                                                      path, k0, k1)
                        if want_max:
                            high = max(x_obs[j] + bridge_peak(dc_acc[j], v, u_max), x)
                        if want_cross and high < m[j]:
                            crossed = bridge_crosses(lo, x_obs[j], mid, v, u_cross)
                    if a > 0 and high < m[j] and mid <= lo:
                        crossed = True
                x_obs[j] = x
                dc_acc[j] = 0.0
                new_max = high >= m[j]
                # duration checks use the excursion that ends here, if any
                for kb in range(nb_):
                    if eta[i, j, kb] < 0.0 and t - g[j] >= bs[kb]:
                        eta[i, j, kb] = t
                        outstanding -= 1
                for e in range(ne):
                    if start[j, e] >= 0.0:
                        for kb in range(nb_):
                            if eta_eps[i, j, e, kb] < 0.0 and t - start[j, e] >= bs[kb]:
                                eta_eps[i, j, e, kb] = t
                                outstanding -= 1
                if new_max:
                    m[j] = high
                    g[j] = t
                    for e in range(ne):
                        start[j, e] = -1.0
                    while nxt[j] < ny and m[j] > ys[nxt[j]]:
                        passage[i, j, nxt[j]] = t
                        nxt[j] += 1
                        outstanding -= 1
                # after a peak inside the step the drawdown need not be zero
                y = m[j] - x
                if y > 0.0:
                    for e in range(ne):
                        if start[j, e] < 0.0 and y > eps[e]:
                            start[j, e] = t
                    if a > 0 and tau[i, j, 0] < 0.0 and (crossed or y > a):
                        tau[i, j, 0] = t
                        # the continuous part crosses at level a; only a jump overshoots
                        tau[i, j, 1] = a if crossed or (use_bridge and m[j] - mid >= a) else y
                        tau[i, j, 2] = m[j]
                        outstanding -= 1
        steps[i] = k
    return tau, eta, eta_eps, passage, steps
