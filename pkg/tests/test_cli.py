import csv
import io
import json
from pathlib import Path

import numpy as np
import pytest

from levy_drawdown import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def test_scale_table_is_monotone(capsys):
    code, out, err = run(capsys, "scale-table", "--model", "brownian", "--x", "log:0.01:10:20")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["x", "W", "W_prime", "Z"]
    w = np.array([float(r[1]) for r in rows])
    assert len(rows) == 20 and np.all(np.diff(w) > 0)
    assert json.loads(err)["command"] == "scale-table"


def test_duration_table_cardinality(capsys):
    code, out, _ = run(capsys, "duration-table", "--model", "stable", "--q", "0.5,1,2",
                       "--b", "0.5,1,2")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["q", "b", "value", "path"] and len(rows) == 9


def test_asymptote_table_ends_with_limit(capsys):
    code, out, _ = run(capsys, "asymptote", "--model", "brownian", "--q", "1", "--s", "1")
    _, rows = read_csv(out)
    assert rows[-1][2] == "limit"
    assert float(rows[-1][1]) == 1.0
    assert all(r[2] == "" for r in rows[:-1])


def test_floats_have_17_significant_digits(capsys):
    _, out, _ = run(capsys, "duration-lt", "--model", "stable", "--q", "1", "--b", "1")
    data = json.loads(out)
    token = out.split('"value": ')[1].split(",")[0]
    assert len(token.replace(".", "").lstrip("0")) == 17
    assert data["value"] == pytest.approx(0.1318369154700, rel=1e-12)


def test_fmt_float_round_trips():
    for x in (0.1, 1 / 3, 1e-300, 123456.789, -2.5e17):
        assert float(cli.fmt_float(x)) == x


def test_bad_model_json_exits_nonzero(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"sigma": -1, "mu": 0}')
    code, _, err = run(capsys, "duration-lt", "--model", str(bad))
    assert code != 0 and "schema" in err
    code, _, err = run(capsys, "magnitude-lt", "--model", "{not json")
    assert code != 0
    code, _, err = run(capsys, "magnitude-lt", "--model",
                       '{"neg_jumps": {"family": "stable_tail", "index": 3}}')
    assert code != 0


def test_model_file_and_manifest_round_trip(capsys, tmp_path):
    model = tmp_path / "kou.json"
    model.write_text(json.dumps({"preset": "kou", "params": {"sigma": 0.8}}))
    out = tmp_path / "res.json"
    code, _, _ = run(capsys, "magnitude-lt", "--model", str(model), "--q", "0.5",
                     "--s", "0.3", "--a", "0.7", "--out", str(out))
    # two-sided models have no spectrally negative scale function
    assert code != 0
    code, _, _ = run(capsys, "duration-lt", "--model", str(model), "--out", str(out))
    assert code == 0
    manifest = Path(str(out) + ".manifest.json")
    meta = json.loads(manifest.read_text())
    assert meta["model"] == {"preset": "kou", "params": {"sigma": 0.8}}
    assert meta["outputs"] == [str(out.resolve())]
    for key in ("command", "parameters", "seed", "tool_version", "wall_time_seconds"):
        assert key in meta
    model.unlink()  # the manifest carries the model inline
    again = tmp_path / "again.json"
    assert cli.main(["rerun", str(manifest), "--out", str(again)]) == 0
    assert again.read_bytes() == out.read_bytes()


def test_simulate_json_and_seed_reproducible(capsys, tmp_path):
    args = ["simulate", "--model", "brownian", "--stat", "eta_lt", "--q", "1", "--b", "0.5",
            "--paths", "300", "--dt", "0.01", "--horizon", "10", "--seed", "42"]
    out = tmp_path / "sim.json"
    assert cli.main(args + ["--out", str(out)]) == 0
    data = json.loads(out.read_text())
    for key in ("value", "std_error", "bias_note", "config_echo"):
        assert key in data
    assert data["config_echo"]["seed"] == 42
    again = tmp_path / "sim2.json"
    assert cli.main(["rerun", str(out) + ".manifest.json", "--out", str(again)]) == 0
    assert json.loads(again.read_text())["value"] == data["value"]


def test_simulate_max_cdf(capsys):
    code, out, _ = run(capsys, "simulate", "--model", "brownian", "--stat", "max_cdf",
                       "--t", "1", "--y", "0.05:2:10", "--paths", "200", "--dt", "0.005")
    data = json.loads(out)
    assert code == 0 and len(data["value"]) == 10
    assert np.all(np.diff(data["value"]) >= 0)


def test_validate_selected_checks(capsys):
    code, out, err = run(capsys, "validate", "fast", "--only", "1,2")
    report = json.loads(out)
    assert code == 0 and report["failed"] == 0
    assert [c["number"] for c in report["checks"]] == [1, 2]
    assert "[PASS]" in err


def test_shipped_schema_matches_docs():
    docs = Path(__file__).resolve().parents[1] / "docs" / "model.schema.json"
    assert json.loads(docs.read_text()) == cli.model_schema()


def test_duration_without_analytic_law_uses_simulation(capsys):
    code, out, _ = run(capsys, "duration-lt", "--model", "sn_compound_poisson",
                       "--mc-paths", "2000")
    data = json.loads(out)
    assert code == 0 and data["diagnostics"]["source"] == "monte_carlo"
    code, _, err = run(capsys, "duration-lt", "--model", "sn_compound_poisson",
                       "--mc-paths", "0")
    assert code != 0
