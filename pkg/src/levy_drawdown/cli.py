"""Command-line front end: ``levy-drawdown <subcommand> ...``.

Grids are written as CSV, scalars as JSON, every float with 17 significant
digits.  Each run also writes a manifest (``<out>.manifest.json`` next to the
output file, or to stderr when the output goes to stdout) that ``rerun`` can
replay.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .levy_models import LevyModel, ModelError

FLOAT_FORMAT = ".17g"


class CliError(Exception):
    """A user-facing error; reported on stderr with exit status 2."""


# --------------------------------------------------------------------------
# formatting
# --------------------------------------------------------------------------

def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, FLOAT_FORMAT)


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, _level + 1) for v in seq) \
            + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# --------------------------------------------------------------------------
# model input
# --------------------------------------------------------------------------

def model_schema() -> dict:
    text = resources.files("levy_drawdown").joinpath("data/model.schema.json").read_text()
    return json.loads(text)


def load_model(spec: str) -> tuple[LevyModel, dict]:
    """Parse ``--model``: a preset name, inline JSON or a path to a JSON file."""
    import jsonschema

    from .levy_models import PRESETS

    if spec in PRESETS:
        data = {"preset": spec}
    else:
        path = Path(spec)
        text = path.read_text() if not spec.lstrip().startswith("{") and path.exists() else spec
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CliError(f"model is neither a preset, a file nor valid JSON: {exc}") from None
    try:
        jsonschema.validate(data, model_schema())
    except jsonschema.ValidationError as exc:
        raise CliError(f"model JSON does not match the schema: {exc.message}") from None
    try:
        return LevyModel.from_dict(data), data
    except (ModelError, ValueError) as exc:
        raise CliError(f"invalid model: {exc}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"expected comma-separated numbers, got {text!r}") from None


def _grid(text: str) -> np.ndarray:
    """``start:stop:n`` (log-spaced when prefixed with ``log:``) or a list."""
    log = text.startswith("log:")
    body = text[4:] if log else text
    if body.count(":") == 2:
        a, b, n = body.split(":")
        n = int(n)
        if n < 1:
            raise CliError("grid needs at least one point")
        a, b = float(a), float(b)
        if log:
            if a <= 0 or b <= 0:
                raise CliError("log grid bounds must be positive")
            return np.logspace(math.log10(a), math.log10(b), n)
        return np.linspace(a, b, n)
    return np.asarray(_floats(body))


# --------------------------------------------------------------------------
# subcommands; each returns (kind, payload, ok) with kind "json" or "csv"
# --------------------------------------------------------------------------

def cmd_scale_table(args, model):
    from .scale_fn import ScaleFunction

    x = _grid(args.x)
    if np.any(x <= 0):
        raise CliError("scale table needs x > 0")
    sf = ScaleFunction(model, args.q, backend=args.backend)
    w = np.atleast_1d(sf.w(x))
    wp = np.atleast_1d(sf.w_prime(x))
    z = np.atleast_1d(sf.z(x))
    rows = [[float(a), float(b), float(c), float(d)] for a, b, c, d in zip(x, w, wp, z)]
    return "csv", (["x", "W", "W_prime", "Z"], rows), True


def cmd_magnitude_lt(args, model):
    from .magnitude import DrawdownQuery, quadruple_lt

    query = DrawdownQuery(q=args.q, r=args.r, s=args.s, delta=args.delta, a=args.a)
    value = quadruple_lt(model, query)
    return "json", {"value": value, "query": vars(query)}, True


def cmd_asymptote(args, model):
    from .asymptotics import DEFAULT_EPS_GRID, verify_asymptote_sn

    eps = DEFAULT_EPS_GRID if args.eps is None else _grid(args.eps)
    res = verify_asymptote_sn(model, args.q, args.s, eps_grid=eps)
    rows = [[float(e), float(v), ""] for e, v in zip(res.epsilon_grid, res.scaled_values)]
    rows.append([0.0, float(res.limit_value), "limit"])
    return "csv", (["eps", "value", "tag"], rows), True


def _duration(model, q, b, args):
    """Analytic duration transform, or the bounded-variation route with a
    simulated running-maximum law when no analytic law exists."""
    from .duration import duration_lt

    try:
        return duration_lt(model, q, b, path=args.path)
    except ModelError:
        if args.path not in ("auto", "theorem") or args.mc_paths <= 0:
            raise
        if not model.spectrally_negative_part().classify_variation().bounded:
            raise
    from .simulate import SimConfig, monte_carlo_running_max

    cfg = SimConfig(n_paths=args.mc_paths, dt=min(args.mc_dt, b / 100.0), horizon=b,
                    seed=args.seed)
    return duration_lt(model, q, b, path="theorem", cdf=monte_carlo_running_max(model, cfg))


def cmd_duration_lt(args, model):
    res = _duration(model, args.q, args.b, args)
    diag = {k: v for k, v in res.source_diagnostics.items()
            if isinstance(v, (int, float, str, bool, dict, list))}
    return "json", {"value": res.value, "path": res.path, "q": args.q, "b": args.b,
                    "diagnostics": diag}, True


def cmd_duration_table(args, model):
    rows = []
    for q in _floats(args.q):
        for b in _floats(args.b):
            res = _duration(model, q, b, args)
            rows.append([q, b, float(res.value), res.path])
    return "csv", (["q", "b", "value", "path"], rows), True


def cmd_simulate(args, model):
    from .simulate import (SimConfig, estimate_eta_eps_lt, estimate_eta_lt,
                           estimate_running_max_cdf, estimate_tau_lt)
    from .simulate.estimators import bias_note

    cfg = SimConfig(n_paths=args.paths, dt=args.dt, horizon=args.horizon, seed=args.seed,
                    scheme=args.scheme, bridge=not args.no_bridge, threads=args.threads)
    if args.stat == "tau_lt":
        est = estimate_tau_lt(model, args.q, args.s, args.a, cfg)
    elif args.stat == "eta_lt":
        est = estimate_eta_lt(model, args.q, args.b, cfg)
    elif args.stat == "eta_eps_lt":
        est = estimate_eta_eps_lt(model, args.q, args.b, args.eps, cfg)
    else:
        y = _grid(args.y)
        cdf = estimate_running_max_cdf(model, args.t, y, cfg, p=args.q)
        d = cdf.diagnostics
        return "json", {"y": d["y_grid"], "value": d["values"], "std_error": d["std_error"],
                        "bias_note": bias_note(model, cfg, "grid monitoring misses maxima "
                                               "between grid points, so the cdf is biased up"),
                        "coarse_near_zero": d["coarse_near_zero"],
                        "config_echo": cfg.to_dict()}, not d["coarse_near_zero"]
    payload = {"value": est.value, "std_error": est.std_error, "bias_note": est.bias_note,
               "n_effective": est.n_effective, "ladder_values": list(est.ladder_values),
               "bias_budget": est.bias_budget, "exhausted_fraction": est.exhausted_fraction,
               "flagged": est.flagged, "config_echo": cfg.to_dict()}
    return "json", payload, not est.flagged


def cmd_validate(args, model=None):
    from .acceptance import run_suite

    numbers = None if args.only is None else [int(v) for v in args.only.split(",")]
    echo = (lambda line: print(line, file=sys.stderr, flush=True))
    results = run_suite(args.suite, numbers, echo=echo)
    report = {"suite": args.suite,
              "passed": sum(r.passed for r in results), "failed": sum(not r.passed for r in results),
              "checks": [{"number": r.number, "name": r.name, "passed": r.passed,
                          "detail": r.detail, "seconds": r.seconds, "metrics": r.metrics}
                         for r in results]}
    return "json", report, all(r.passed for r in results)


COMMANDS = {
    "scale-table": cmd_scale_table,
    "magnitude-lt": cmd_magnitude_lt,
    "asymptote": cmd_asymptote,
    "duration-lt": cmd_duration_lt,
    "duration-table": cmd_duration_table,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="levy-drawdown",
                                description="Drawdown transforms for Lévy processes.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, model=True):
        sp = sub.add_parser(name, help=help_)
        if model:
            sp.add_argument("--model", required=True,
                            help="preset name, inline JSON or path to a JSON file")
        sp.add_argument("--out", help="output file (stdout when omitted)")
        return sp

    sp = add("scale-table", "W, W' and Z on an x grid (CSV)")
    sp.add_argument("--q", type=float, default=0.0)
    sp.add_argument("--x", default="log:0.01:10:25",
                    help="grid as start:stop:n, log:start:stop:n or a comma list")
    sp.add_argument("--backend", choices=["auto", "closed_form", "inversion"], default="auto")

    sp = add("magnitude-lt", "joint transform at the first drawdown of size a (JSON)")
    for name, default in (("q", 0.0), ("r", 0.0), ("s", 0.0), ("delta", 0.0), ("a", 1.0)):
        sp.add_argument(f"--{name}", type=float, default=default)

    sp = add("asymptote", "small-threshold values and their limit (CSV)")
    sp.add_argument("--q", type=float, default=1.0)
    sp.add_argument("--s", type=float, default=0.0)
    sp.add_argument("--eps", help="decreasing eps grid; default 2^-2 .. 2^-10")

    for name, help_ in (("duration-lt", "E exp(-q eta_b) (JSON)"),
                        ("duration-table", "E exp(-q eta_b) over a q x b grid (CSV)")):
        sp = add(name, help_)
        table = name == "duration-table"
        sp.add_argument("--q", type=str if table else float, default="0.5,1,2" if table else 1.0)
        sp.add_argument("--b", type=str if table else float, default="0.5,1,2" if table else 1.0)
        sp.add_argument("--path", choices=["auto", "theorem", "kendall", "example"],
                        default="auto")
        sp.add_argument("--mc-paths", type=int, default=100_000,
                        help="paths for a simulated running-maximum law when no analytic "
                        "one exists (0 disables)")
        sp.add_argument("--mc-dt", type=float, default=1e-3)
        sp.add_argument("--seed", type=int, default=12345)

    sp = add("simulate", "Monte Carlo estimate (JSON)")
    sp.add_argument("--stat", choices=["tau_lt", "eta_lt", "eta_eps_lt", "max_cdf"],
                    required=True)
    for name, default in (("q", 1.0), ("s", 0.0), ("a", 1.0), ("b", 1.0), ("eps", 0.05),
                          ("t", 1.0)):
        sp.add_argument(f"--{name}", type=float, default=default)
    sp.add_argument("--y", default="0.1:3:30", help="grid for max_cdf")
    sp.add_argument("--paths", type=int, default=10_000)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--horizon", type=float, default=20.0)
    sp.add_argument("--seed", type=int, default=12345)
    sp.add_argument("--scheme", choices=["exact_increments", "euler"],
                    default="exact_increments")
    sp.add_argument("--no-bridge", action="store_true",
                    help="observe the path only at grid points")
    sp.add_argument("--threads", type=int,
                    help="worker threads (default: $LEVY_DRAWDOWN_THREADS or all cores)")

    sp = add("validate", "run the acceptance checks (JSON report)", model=False)
    sp.add_argument("suite", nargs="?", choices=["fast", "full"], default="fast")
    sp.add_argument("--only", help="comma-separated check numbers")

    sp = sub.add_parser("rerun", help="replay a run from its manifest")
    sp.add_argument("manifest")
    sp.add_argument("--out", help="output file (stdout when omitted)")
    return p


def _inline_model(argv: list[str], text: str) -> list[str]:
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--model":
            next(it, None)
            out += ["--model", text]
        elif tok.startswith("--model="):
            out += ["--model", text]
        else:
            out.append(tok)
    return out


def _emit(kind, payload, out):
    text = to_csv(*payload) if kind == "csv" else to_json(payload) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
    return text


def _run(argv: list[str]) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "rerun":
        try:
            manifest = json.loads(Path(args.manifest).read_text())
            replay = list(manifest["argv"])
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read manifest: {exc}") from None
        if "--out" in replay:
            i = replay.index("--out")
            del replay[i:i + 2]
        if args.out is not None:
            replay += ["--out", args.out]
        return _run(replay)

    t0 = time.perf_counter()
    model, model_json = (None, None)
    if getattr(args, "model", None) is not None:
        model, model_json = load_model(args.model)
        # inline the model so the manifest does not depend on a file
        argv = _inline_model(argv, json.dumps(model_json))
    try:
        kind, payload, ok = COMMANDS[args.command](args, model)
    except (ModelError, ValueError) as exc:
        raise CliError(str(exc)) from None
    _emit(kind, payload, args.out)
    params = {k: v for k, v in vars(args).items() if k not in ("command", "model", "out")}
    manifest = {"command": args.command, "argv": argv, "model": model_json,
                "parameters": params, "seed": params.get("seed"), "tool_version": __version__,
                "outputs": [] if args.out is None else [str(Path(args.out).resolve())],
                "wall_time_seconds": time.perf_counter() - t0, "succeeded": ok}
    text = to_json(manifest) + "\n"
    if args.out is None:
        sys.stderr.write(text)
    else:
        Path(str(args.out) + ".manifest.json").write_text(text)
    return 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        return _run(argv)
    except CliError as exc:
        print(f"levy-drawdown: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"levy-drawdown: I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
