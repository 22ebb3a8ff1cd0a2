import json

import jsonschema
import pytest

from stackel import cli


def run(*args):
    return cli.main([str(a) for a in args])


def strip_timing(doc):
    if isinstance(doc, dict):
        return {k: strip_timing(v) for k, v in doc.items() if k != "timing_s"}
    if isinstance(doc, list):
        return [strip_timing(v) for v in doc]
    return doc


@pytest.fixture(scope="module")
def verify_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("verify")
    rc = run("verify", "--all", "-n", 2, "--a", "1,2,4", "--seed", 42, "--samples", 5, "--out", out)
    return rc, out


def test_verify_exit_and_schema(verify_run):
    rc, out = verify_run
    assert rc == 0
    doc = json.loads((out / "report.json").read_text())
    jsonschema.validate(doc, cli.load_schema("report.schema.json"))
    assert doc["summary"]["ok"]
    names = {r["name"] for r in doc["results"]}
    assert any("perturbed integral coefficient" in n for n in names)
    assert (out / "report.md").read_text().startswith("# stackel verify report")


def test_report_deterministic_modulo_timing(verify_run, tmp_path, monkeypatch):
    _, out = verify_run
    monkeypatch.setenv("STACKEL_THREADS", "2")
    assert run("verify", "--all", "-n", 2, "--a", "1,2,4", "--seed", 42, "--samples", 5, "--out", tmp_path) == 0
    a = json.loads((out / "report.json").read_text())
    b = json.loads((tmp_path / "report.json").read_text())
    assert strip_timing(a) == strip_timing(b)


def test_config_file(tmp_path):
    cfg = {"n": 2, "a": ["1", "2", "4"], "seed": 1, "systems": ["neumann"], "checks": ["stackel"],
           "tol": 1e-10, "samples": 5}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert run("verify", "--config", path, "--out", tmp_path) == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["config"]["a"] == ["1", "2", "4"]


@pytest.mark.parametrize("args", [
    ("verify", "-n", 3, "--a", "1,2,4"),
    ("verify", "-n", 2, "--a", "1,2,2"),
    ("verify", "-n", 2, "--a", "1,0.5,4"),
    ("verify", "--nonsense"),
    ("quantum", "-n", 2, "--a", "1,2,4"),
    ("simulate", "--system", "neumann", "-n", 2),
])
def test_invalid_configuration_exits_2(args, tmp_path):
    assert run(*args, "--out", tmp_path) == 2


def test_invalid_config_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"n": 2, "a": ["1", "2", "4"], "extra": 1}))
    assert run("verify", "--config", path) == 2


def test_internal_error_exits_3(monkeypatch, tmp_path):
    def boom(*_):
        raise RuntimeError("boom")
    monkeypatch.setattr(cli, "run_task", boom)
    assert run("verify", "--checks", "stackel", "-n", 2, "--out", tmp_path) == 3


def test_unexpected_outcome_exits_1(monkeypatch, tmp_path):
    from stackel.report import VerificationReport

    def wrong(*_):
        rep = VerificationReport("forced", "forced")
        rep.add("always false", False)
        return [rep]
    monkeypatch.setattr(cli, "run_task", wrong)
    assert run("verify", "--checks", "stackel", "--systems", "neumann", "-n", 2, "--out", tmp_path) == 1


def test_quantum_marks_conformal_fail(tmp_path, capsys):
    rc = run("quantum", "--system", "jacobi-moser", "-n", 3, "--points", 2, "--testfns", 2, "--out", tmp_path)
    assert rc == 0
    assert "carter PASS, conformal FAIL" in capsys.readouterr().out


@pytest.fixture(scope="module")
def trajectory_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    csv_path = out / "out.csv"
    rc = run("simulate", "--system", "dual-moser", "-n", 2, "--a", "1,2,4", "-T", 10, "--csv", csv_path,
             "--out", out)
    assert rc == 0
    return csv_path


def test_simulate_writes_csv(trajectory_csv):
    lines = trajectory_csv.read_text().splitlines()
    assert lines[0] == "t,q0,q1,q2,v0,v1,v2,H,F0,F1,F2,J"
    assert len(lines) == 1002


def test_plot_outputs(trajectory_csv, tmp_path):
    assert run("plot", trajectory_csv, "--out", tmp_path) == 0
    assert (tmp_path / "drift.png").stat().st_size > 0
    assert (tmp_path / "trace.png").stat().st_size > 0


def test_plot_single_row(trajectory_csv, tmp_path):
    one = tmp_path / "one.csv"
    one.write_text("\n".join(trajectory_csv.read_text().splitlines()[:2]) + "\n")
    assert run("plot", one, "--out", tmp_path) == 0


@pytest.mark.parametrize("content", ["", "t,q0\n", "a,b,c\n1,2,3\n",
                                     "t,q0,q1,v0,v1,H,F0,F1,J\n1,2,3\n",
                                     "t,q0,q1,v0,v1,H,F0,F1,J\n1,2,3,4,5,6,7,8,x\n"])
def test_plot_rejects_malformed_csv(content, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text(content)
    assert run("plot", bad, "--out", tmp_path) == 2


def test_plot_missing_file(tmp_path):
    assert run("plot", tmp_path / "nope.csv") == 2
