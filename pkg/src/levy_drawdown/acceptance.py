"""Acceptance checks shared by the test-suite and ``levy-drawdown validate``.

Each check returns a :class:`CheckResult`; nothing here raises on a failed
comparison.  ``suite="full"`` uses the stated path counts and step sizes,
``suite="fast"`` shrinks the Monte Carlo work for a quick smoke run.
"""

from __future__ import annotations

import math
import time
import traceback
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from . import duration as dur
from . import levy_models as mdl
from .asymptotics import verify_asymptote_sn
from .ladder import build_ladder, kou_roots, reconstruct_kappa
from .magnitude import DrawdownQuery, quadruple_lt
from .scale_fn import ScaleFunction
from .simulate import (SimConfig, estimate_eta_eps_lt, estimate_eta_lt, estimate_tau_lt,
                       simulate_paths)

__all__ = ["CheckResult", "CHECKS", "run_check", "run_suite"]


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    metrics: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


# Monte Carlo settings per suite: (paths, dt) keyed by purpose
_MC = {
    "full": {
        "ks": (100_000, 1e-4),
        "tau_brownian": (1_000_000, 2.5e-4),
        "tau_stable": (1_000_000, 5e-4),
        "eta": (100_000, 1e-4),
        "gamma": (100_000, 1e-3),
        "kou": (100_000, 1e-4),
    },
    "fast": {
        "ks": (10_000, 1e-3),
        "tau_brownian": (20_000, 1e-3),
        "tau_stable": (20_000, 1e-3),
        "eta": (10_000, 1e-3),
        "gamma": (10_000, 1e-3),
        "kou": (10_000, 1e-3),
    },
}

_SEED = 20_160_901
_records_cache: dict = {}


def _records(key, model, cfg, **kw):
    """Simulated paths shared between checks that can reuse them."""
    full_key = (key, cfg)
    if full_key not in _records_cache:
        _records_cache[full_key] = simulate_paths(model, cfg, **kw)
    return _records_cache[full_key]


def _rel(a, b):
    return abs(a - b) / abs(b)


# --------------------------------------------------------------------------
# individual checks
# --------------------------------------------------------------------------

def check_scale_calibration(suite):
    x = np.logspace(-2, 1, 40)
    worst = 0.0
    cases = []
    for label, model in (("brownian(0,1)", mdl.brownian(0.0, 1.0)),
                         ("brownian(0.5,1.3)", mdl.brownian(0.5, 1.3)),
                         ("stable(1.5)", mdl.stable(1.5))):
        for q in (0.0, 0.5, 2.0):
            inv = ScaleFunction(model, q, backend="inversion").w(x)
            ref = ScaleFunction(model, q, backend="closed_form").w(x)
            err = float(np.max(np.abs(inv - ref) / np.abs(ref)))
            worst = max(worst, err)
            cases.append((label, q, err))
    # the power law at q = 0 on its own, independent of the series code
    alpha = 1.5
    inv = ScaleFunction(mdl.stable(alpha), 0.0, backend="inversion").w(x)
    pw = x ** (alpha - 1.0) / special.gamma(alpha)
    err_pw = float(np.max(np.abs(inv - pw) / pw))
    worst = max(worst, err_pw)
    ok = worst <= 1e-7
    return ok, f"max relative error {worst:.2e} (tolerance 1e-07)", {
        "cases": cases, "stable_power_law_error": err_pw}


def check_boundary_suite(suite):
    rows, ok = [], True
    for name in ("brownian", "stable", "sn_gamma", "sn_compound_poisson"):
        model = mdl.preset(name)
        for q in (0.0, 1.0):
            rep = ScaleFunction(model, q).boundary_report()
            good = rep.w0_ok and rep.w_prime0_ok
            ok &= good
            rows.append({"preset": name, "q": q, "W0+": rep.w0_predicted,
                         "W0+ extrapolated": rep.w0_extrapolated,
                         "W'0+": rep.w_prime0_predicted,
                         "W'0+ extrapolated": rep.w_prime0_extrapolated, "ok": good})
    bad = [f"{r['preset']} q={r['q']}" for r in rows if not r["ok"]]
    detail = "all presets match" if ok else "mismatch: " + ", ".join(bad)
    return ok, detail, {"rows": rows}


def check_max_exponential(suite):
    n, dt = _MC[suite]["ks"]
    out, ok = {}, True
    for label, model in (("brownian", mdl.brownian()), ("stable", mdl.stable(1.5))):
        cfg = SimConfig(n_paths=n, dt=dt, horizon=30.0, seed=_SEED, ladder=False)
        est = estimate_tau_lt(model, 1.0, 0.0, 1.0, cfg,
                              records=_records(("tau", label, 1.0), model, cfg, a=1.0))
        sample = est.diagnostics["max_at_tau"]
        sf = ScaleFunction(model, 0.0)
        mean = float(sf.w(1.0) / sf.w_prime(1.0))
        res = stats.kstest(sample, "expon", args=(0.0, mean))
        out[label] = {"p_value": float(res.pvalue), "mean_theory": mean,
                      "mean_sample": float(sample.mean()), "n": int(sample.size)}
        ok &= res.pvalue > 0.01
    detail = ", ".join(f"{k} p={v['p_value']:.3f}" for k, v in out.items())
    return ok, detail + " (needs p > 0.01)", out


def check_quadruple_lt(suite):
    cases = [(1.0, 0.0, 1.0), (1.0, 1.0, 1.0), (0.5, 2.0, 0.5)]
    out, ok = [], True
    for label, model, key in (("brownian", mdl.brownian(), "tau_brownian"),
                              ("stable", mdl.stable(1.5), "tau_stable")):
        n, dt = _MC[suite][key]
        for q, s, a in cases:
            cfg = SimConfig(n_paths=n, dt=dt, horizon=20.0, seed=_SEED + 1)
            rec = _records(("tau4", label, a), model, cfg, a=a)
            est = estimate_tau_lt(model, q, s, a, cfg, records=rec)
            exact = quadruple_lt(model, DrawdownQuery(q=q, s=s, a=a))
            good = est.agrees_with(exact)
            ok &= good
            out.append({"model": label, "q": q, "s": s, "a": a, "formula": exact,
                        "mc": est.value, "se": est.std_error, "budget": est.bias_budget,
                        "ladder": list(est.ladder_values), "ok": good})
    worst = max(abs(r["mc"] - r["formula"]) / (3 * r["se"] + r["budget"]) for r in out)
    return ok, f"worst |mc - formula| / (3 SE + budget) = {worst:.2f}", {"cases": out}


def check_asymptotics(suite):
    cases = (("brownian", mdl.brownian(), 1.0, 1.0),
             ("stable", mdl.stable(1.5), 1.0, 0.0),
             ("sn_gamma", mdl.sn_gamma(), 1.0, 1.0))
    out, ok = [], True
    for label, model, q, s in cases:
        res = verify_asymptote_sn(model, q, s)
        ok &= res.converged
        out.append({"model": label, "q": q, "s": s, "limit": res.limit_value,
                    "last_value": float(res.scaled_values[-1]),
                    "deviation": res.final_deviation, "converged": res.converged,
                    "values": res.scaled_values.tolist()})
    detail = ", ".join(f"{r['model']} dev {r['deviation']:.2e}" for r in out)
    return ok, detail, {"cases": out}


def check_duration_cross_path(suite):
    out, ok = [], True
    for name, model, params in (("brownian", mdl.brownian(), {}),
                                ("stable", mdl.stable(1.5), {"alpha": 1.5})):
        for q, b in ((1.0, 1.0), (2.0, 0.5), (0.5, 2.0)):
            k = dur.eta_lt_kendall(model, q, b).value
            e = dur.example_closed_form(name, params, q, b)
            err = _rel(k, e)
            ok &= err <= 1e-10
            out.append({"model": name, "q": q, "b": b, "kendall": k, "example": e, "rel": err})
    bm2 = mdl.brownian(0.0, math.sqrt(2.0))
    ladder = build_ladder(bm2)
    t = np.array([0.1, 1.0, 5.0])
    nu_err = float(np.max(np.abs(ladder.nu_bar_L(t) - 1 / np.sqrt(np.pi * t)) * np.sqrt(np.pi * t)))
    thm = []
    for q, b in ((1.0, 1.0), (2.0, 0.5)):
        v6 = dur.eta_lt_unbounded(bm2, q, b, ladder=ladder).value
        v7 = dur.eta_lt_kendall(bm2, q, b).value
        err = _rel(v6, v7)
        ok &= err <= 1e-5
        thm.append({"q": q, "b": b, "ladder_route": v6, "kendall_route": v7, "rel": err})
    worst_a = max(r["rel"] for r in out)
    worst_b = max(r["rel"] for r in thm)
    return ok, (f"kendall vs example {worst_a:.1e} (tol 1e-10); ladder vs kendall "
                f"{worst_b:.1e} (tol 1e-5); tail check {nu_err:.1e}"), {
        "examples": out, "ladder_vs_kendall": thm, "nu_bar_rel_error": nu_err}


def _eta_records(label, model, suite):
    n, dt = _MC[suite]["eta"]
    cfg = SimConfig(n_paths=n, dt=dt, horizon=15.0, seed=_SEED + 2)
    eps = (0.1, 0.05, 0.02) if label == "brownian" else ()
    return cfg, _records(("eta", label), model, cfg, bs=[0.5, 1.0], eps=eps)


def check_duration_mc(suite):
    out, ok = [], True
    for label, model in (("brownian", mdl.brownian()), ("stable", mdl.stable(1.5))):
        cfg, rec = _eta_records(label, model, suite)
        for q, b in ((1.0, 1.0), (2.0, 0.5)):
            est = estimate_eta_lt(model, q, b, cfg, records=rec)
            exact = dur.example_closed_form(label, {}, q, b)
            good = est.agrees_with(exact)
            ok &= good
            out.append({"model": label, "q": q, "b": b, "formula": exact, "mc": est.value,
                        "se": est.std_error, "budget": est.bias_budget,
                        "ladder": list(est.ladder_values), "ok": good})
    worst = max(abs(r["mc"] - r["formula"]) / (3 * r["se"] + r["budget"]) for r in out)
    return ok, f"worst |mc - formula| / (3 SE + budget) = {worst:.2f}", {"cases": out}


def check_eps_monotone(suite):
    model = mdl.brownian()
    cfg, rec = _eta_records("brownian", model, suite)
    q, b = 1.0, 1.0
    exact = dur.example_closed_form("brownian", {}, q, b)
    ests = [estimate_eta_eps_lt(model, q, b, e, cfg, records=rec) for e in (0.1, 0.05, 0.02)]
    vals = [e.value for e in ests]
    monotone = vals[0] < vals[1] < vals[2]
    gaps = [abs(v - exact) for v in vals]
    closer = gaps[2] < gaps[0]
    below = all(v <= exact + 3 * e.std_error + e.bias_budget for v, e in zip(vals, ests))
    ok = monotone and closer and below
    return ok, (f"values {', '.join(f'{v:.5f}' for v in vals)} toward {exact:.5f}; "
                f"monotone={monotone}, gap shrinks={closer}"), {
        "eps": [0.1, 0.05, 0.02], "values": vals, "se": [e.std_error for e in ests],
        "formula": exact}


def check_gamma(suite):
    model = mdl.sn_gamma()
    q, b = 1.0, 1.0
    thm = dur.eta_lt_bounded(model, q, b).value
    ex = dur.example_closed_form("gamma", {}, q, b)
    err = _rel(thm, ex)
    n, dt = _MC[suite]["gamma"]
    cfg = SimConfig(n_paths=n, dt=dt, horizon=40.0, seed=_SEED + 3)
    est = estimate_eta_lt(model, q, b, cfg)
    mc_ok = est.agrees_with(ex) and est.agrees_with(thm)
    ok = err <= 1e-6 and mc_ok
    return ok, (f"theorem vs example {err:.1e} (tol 1e-6); mc {est.value:.5f} +- "
                f"{est.std_error:.5f} (budget {est.bias_budget:.5f}) vs {ex:.5f}"), {
        "theorem": thm, "example": ex, "rel": err, "mc": est.to_dict()}


def check_kou(suite):
    model = mdl.kou()
    eta_p = model.pos_jumps.rate
    alphas = np.concatenate([[0.0], np.logspace(-3, 3, 25)])
    r1, r2 = kou_roots(model, alphas)
    order_ok = bool(np.all(r1 < eta_p) and np.all(eta_p < r2) and np.all(r1 >= -1e-12))
    ladder = build_ladder(model)
    rec_err = 0.0
    for a in (0.1, 1.0, 10.0):
        k = float(np.real(ladder.kappa(a, 0.0)))
        rec_err = max(rec_err, _rel(reconstruct_kappa(ladder, a), k))
    q, b = 1.0, 1.0
    formula = dur.eta_lt_unbounded(model, q, b, ladder=ladder).value
    example = dur.example_closed_form("kou", {}, q, b)
    n, dt = _MC[suite]["kou"]
    cfg = SimConfig(n_paths=n, dt=dt, horizon=15.0, seed=_SEED + 4)
    est = estimate_eta_lt(model, q, b, cfg)
    mc_ok = est.agrees_with(formula)
    ok = order_ok and rec_err <= 1e-5 and mc_ok
    return ok, (f"root order {'ok' if order_ok else 'violated'}; kappa reconstruction "
                f"{rec_err:.1e} (tol 1e-5); mc {est.value:.5f} +- {est.std_error:.5f} "
                f"(budget {est.bias_budget:.5f}) vs {formula:.5f}"), {
        "order_ok": order_ok, "reconstruction_error": rec_err, "formula": formula,
        "example_display": example, "mc": est.to_dict()}


CHECKS = {
    1: ("scale function calibration against closed forms", check_scale_calibration),
    2: ("boundary values of W and W' at 0+", check_boundary_suite),
    3: ("running maximum at tau_a is exponential (KS)", check_max_exponential),
    4: ("quadruple Laplace transform vs Monte Carlo", check_quadruple_lt),
    5: ("small-threshold limit of the drawdown transform", check_asymptotics),
    6: ("duration routes agree (Kendall, examples, ladder)", check_duration_cross_path),
    7: ("duration transform vs Monte Carlo", check_duration_mc),
    8: ("eps-approximation of eta_b is monotone", check_eps_monotone),
    9: ("gamma preset: bounded-variation route", check_gamma),
    10: ("Kou preset: ladder roots, reconstruction, Monte Carlo", check_kou),
}


def run_check(number: int, suite: str = "full") -> CheckResult:
    """Run one check, turning exceptions into a failed result."""
    if suite not in _MC:
        raise ValueError(f"unknown suite {suite!r}")
    name, fn = CHECKS[number]
    t0 = time.perf_counter()
    try:
        ok, detail, metrics = fn(suite)
    except Exception as exc:  # reported, never short-circuits the suite
        ok, detail, metrics = False, f"error: {exc!r}", {"traceback": traceback.format_exc()}
    return CheckResult(number, name, bool(ok), detail, _jsonable(metrics),
                       time.perf_counter() - t0)


def run_suite(suite: str = "fast", numbers=None, echo=None) -> list[CheckResult]:
    """Run the selected checks (all by default) and return their results."""
    results = []
    for k in sorted(CHECKS) if numbers is None else numbers:
        res = run_check(k, suite)
        if echo is not None:
            echo(res.line())
        results.append(res)
    _records_cache.clear()
    return results


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj
