import json
import subprocess
import sys

import jsonschema
import pytest

from curvpinch import cli
from curvpinch.report import dumps_canonical, load_schema


def invoke(capsys, *args):
    code = cli.main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def strip_time(report):
    report["manifest"].pop("timestamp")
    return report


def test_verify_exit_code_reflects_identity_suites(capsys):
    # the positive-sign omega relation and the factor-4 relation fail; everything else passes
    code, out, _ = invoke(capsys, "verify", "--dims", "4,5,6", "--samples", "200", "--seed", "7")
    report = json.loads(out)
    failing = {sid for sid, rows in report["suites"].items() if any(r["violations"] for r in rows)}
    assert failing == {"omega_cubic", "five_dim_identity"}
    assert code == 1


def test_verify_passes_without_failing_identities(capsys):
    ids = [s for s in cli.suite.ALL_SUITES if s not in ("omega_cubic", "five_dim_identity")]
    code, out, _ = invoke(capsys, "verify", "--dims", "4-6", "--samples", "100", "--ineq", ",".join(ids))
    assert code == 0
    assert json.loads(out)["total_violations"] == 0


def test_verify_five_dim_rows(capsys):
    _, out, _ = invoke(capsys, "verify", "--dims", "5", "--samples", "100")
    suites = json.loads(out)["suites"]
    assert suites["five_dim_identity"][0]["dim"] == 5
    assert suites["five_dim_identity_factor2"][0]["max_deviation"] <= 1e-10


@pytest.mark.parametrize(
    "args",
    [
        ["verify", "--samples", "0"],
        ["verify", "--dims", "3,4"],
        ["verify", "--dims", "x"],
        ["verify", "--ineq", "nope"],
        ["verify", "--format", "csv"],
        ["pinch", "--model", "nowhere"],
        ["pinch"],
        ["pinch", "--model", "t4", "--theorem", "thm_einstein"],
        ["pinch", "--model", "sn:5", "--theorem", "thm_4d"],
        ["sharpness", "--ineq", "tachibana", "--dims", "3"],
        ["sharpness", "--restarts", "0"],
        ["constants", "--dims", "3"],
        ["frobnicate"],
        ["verify", "--config", "/nonexistent/cfg.json"],
    ],
)
def test_usage_errors_exit_2(capsys, args):
    code, _, err = invoke(capsys, *args)
    assert code == 2
    assert "error" in err


def test_pinch_examples(capsys):
    code, out, _ = invoke(capsys, "pinch", "--model", "s4", "--theorem", "thm_4d")
    v = json.loads(out)["verdicts"][0]
    assert code == 0 and v["holds"] and v["lhs"] == 0
    assert v["rhs"] == pytest.approx(8 * 3.141592653589793**2, rel=1e-13)
    code, out, _ = invoke(capsys, "pinch", "--model", "sn:7", "--theorem", "thm_ndim")
    v = json.loads(out)["verdicts"][0]
    assert code == 0 and not v["holds"] and v["ratio"] == pytest.approx(36 / 35, rel=1e-12)


def test_pinch_all_theorems_lists_inapplicable(capsys):
    code, out, _ = invoke(capsys, "pinch", "--model", "t4")
    report = json.loads(out)
    assert code == 0
    assert [v["theorem"] for v in report["verdicts"]] == ["cor_4d"]
    assert {s["theorem"] for s in report["not_applicable"]} == {"thm_4d", "thm_ndim", "thm_einstein"}


def test_constants_rows(capsys):
    code, out, _ = invoke(capsys, "constants")
    rows = {r["n"]: r for r in json.loads(out)["constants"]}
    assert code == 0
    assert rows[6]["C_symbolic"] == "sqrt(70)/(2*sqrt(3))" and rows[6]["agreement"]
    assert rows[9]["A"] == pytest.approx(7 / 160, rel=1e-15)
    assert rows[5]["pinchein_below_A"]
    assert all(r["agreement"] for r in rows.values())


def test_constants_csv_and_text(capsys):
    code, out, _ = invoke(capsys, "constants", "--format", "csv", "--dims", "4-5")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("n,C,") and len(lines) == 3
    code, out, _ = invoke(capsys, "constants", "--format", "text", "--dims", "6")
    assert "sqrt(70)/(2*sqrt(3))" in out


def test_models_command(capsys):
    code, out, _ = invoke(capsys, "models")
    report = json.loads(out)
    assert code == 0
    names = [m["model"] for m in report["models"]]
    assert names[:4] == ["s4", "s2xs2", "t4", "cp2"]
    assert all(m["all_pass"] for m in report["models"])


def test_sharpness_command(capsys):
    code, out, _ = invoke(capsys, "sharpness", "--ineq", "okumura", "--dims", "4", "--restarts", "3")
    res = json.loads(out)["results"][0]
    assert code == 0 and res["best_ratio"] >= 0.999 and res["empirical"]
    assert res["argmax"]["T"]["dim"] == 4


def test_reports_match_schema(capsys):
    schema = load_schema()
    for args in (["constants"], ["models"], ["pinch", "--model", "cp2"], ["verify", "--dims", "4", "--samples", "20"],
                 ["sharpness", "--restarts", "2", "--iters", "10"]):
        _, out, _ = invoke(capsys, *args)
        jsonschema.validate(json.loads(out), schema)


def test_json_roundtrip_is_byte_identical(capsys):
    _, out, _ = invoke(capsys, "verify", "--dims", "4", "--samples", "30", "--seed", "3")
    assert dumps_canonical(json.loads(out)) + "\n" == out


def test_same_manifest_same_payload(capsys):
    args = ("verify", "--dims", "5", "--samples", "50", "--seed", "4")
    _, a, _ = invoke(capsys, *args)
    _, b, _ = invoke(capsys, *args)
    assert strip_time(json.loads(a)) == strip_time(json.loads(b))
    _, c, _ = invoke(capsys, "verify", "--dims", "5", "--samples", "50", "--seed", "5")
    assert strip_time(json.loads(c))["suites"] != strip_time(json.loads(a))["suites"]


def test_manifest_contents(capsys):
    _, out, _ = invoke(capsys, "verify", "--dims", "4", "--samples", "10", "--seed", "12")
    m = json.loads(out)["manifest"]
    assert m["command"] == "verify" and m["seed"] == 12 and m["tool_version"] == cli.__version__
    assert m["parameters"]["samples"] == 10 and m["parameters"]["dims"] == [4]
    assert "T" in m["timestamp"]


def test_config_precedence(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 3, "verify": {"samples": 15, "dims": [4]}}))
    _, out, _ = invoke(capsys, "verify", "--config", str(cfg))
    m = json.loads(out)["manifest"]
    assert (m["seed"], m["parameters"]["samples"], m["parameters"]["dims"]) == (3, 15, [4])
    _, out, _ = invoke(capsys, "verify", "--config", str(cfg), "--samples", "7")
    assert json.loads(out)["manifest"]["parameters"]["samples"] == 7
    monkeypatch.setenv(cli.CONFIG_ENV, str(cfg))
    _, out, _ = invoke(capsys, "verify")
    assert json.loads(out)["manifest"]["parameters"]["samples"] == 15


def test_config_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"verify": {"smaples": 3}}))
    assert invoke(capsys, "verify", "--config", str(cfg))[0] == 2
    cfg.write_text("[1, 2]")
    assert invoke(capsys, "verify", "--config", str(cfg))[0] == 2


def test_out_file(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, out, _ = invoke(capsys, "constants", "--out", str(path))
    assert code == 0 and path.read_text() == out


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "curvpinch.cli", "pinch", "--model", "s4", "--format", "text"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "thm_4d" in proc.stdout
