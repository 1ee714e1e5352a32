import copy
import json
import subprocess
import sys

import pytest

from cli_configs import CONFIGS
from kernel_embed.cli import dumps, main


def run(tmp_path, command, cfg, *extra):
    path = tmp_path / f"{command}.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / f"{command}.report.json"
    code = main([command, "--config", str(path), "--out", str(out), *extra])
    return code, out


@pytest.mark.parametrize("command", sorted(CONFIGS))
def test_every_command_succeeds(tmp_path, command):
    code, out = run(tmp_path, command, CONFIGS[command])
    assert code == 0
    report = json.loads(out.read_text())
    assert list(report) == ["command", "inputs", "result", "provenance"]
    assert report["provenance"]["version"] == "0.1.0"
    assert report["inputs"]["kernel" if "kernel" in CONFIGS[command] else "pair"]


def walk(obj):
    if isinstance(obj, dict):
        yield obj
        for v in obj.values():
            yield from walk(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from walk(v)


@pytest.mark.parametrize("command", sorted(CONFIGS))
def test_certified_verdicts_carry_justification(tmp_path, command):
    code, out = run(tmp_path, command, CONFIGS[command])
    for d in walk(json.loads(out.read_text())):
        if d.get("certified") is True:
            assert d.get("justification")


def test_spectrum_report(tmp_path):
    code, out = run(tmp_path, "spectrum", CONFIGS["spectrum"], "--csv", str(tmp_path / "s.csv"))
    spec = json.loads(out.read_text())["result"]["spectrum"]
    assert len(spec["singular_values"]) == 10
    assert abs(spec["hs_trace"] - 0.5) < 1e-12
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "index,sigma" and len(lines) == 11


def test_seq_example_report(tmp_path):
    code, out = run(tmp_path, "seq-example", CONFIGS["seq-example"])
    v = json.loads(out.read_text())["result"]["verdicts"]
    assert v["bounded"]["verdict"] == "YesCertified"
    assert v["compact"]["verdict"] == "YesCertified"
    assert v["kernel_in_l2"]["verdict"] == "NoCertified"


def test_ivar_verdict_csv(tmp_path):
    code, out = run(tmp_path, "ivar-verdict", CONFIGS["ivar-verdict"], "--csv", str(tmp_path / "v.csv"))
    lines = (tmp_path / "v.csv").read_text().splitlines()
    assert lines[:3] == ["rank,subset,value", "1,{},1", "2,{1},0.5"]
    assert json.loads(out.read_text())["result"]["criterion"]["verdict"] == "CompactCertified"


def test_ivar_verdict_not_enumerable_still_reports(tmp_path):
    cfg = copy.deepcopy(CONFIGS["ivar-verdict"])
    cfg["weights"] = {"product": {"rule": "ones"}}
    cfg["kernel"]["params"]["nu"] = "0.5"
    code, out = run(tmp_path, "ivar-verdict", cfg)
    res = json.loads(out.read_text())["result"]
    assert code == 0
    assert res["criterion"]["verdict"] == "NonCompactCertified"
    assert res["enumeration"]["available"] is False


def test_ivar_spectrum_csv(tmp_path):
    run(tmp_path, "ivar-spectrum", CONFIGS["ivar-spectrum"], "--csv", str(tmp_path / "t.csv"))
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "rank,subset,eigen_indices,value"
    assert lines[1] == "1,{},(),1"


def test_kgamma_report(tmp_path):
    code, out = run(tmp_path, "kgamma", CONFIGS["kgamma"])
    res = json.loads(out.read_text())["result"]
    assert res["kgamma"]["value"] == 1.40625
    assert res["membership"]["verdict"] == "YesCertified"


@pytest.mark.parametrize(
    "command,mutate,field",
    [
        ("spectrum", lambda c: c.pop("measure"), "measure"),
        ("spectrum", lambda c: c["measure"].update(m=0), "measure"),
        ("spectrum", lambda c: c["kernel"].update(name="nope"), "kernel"),
        ("spectrum", lambda c: c["tunables"].update(top_n=0), "tunables.top_n"),
        ("spectrum", lambda c: c["tunables"].update(bogus=1), "tunables.bogus"),
        ("diagnose", lambda c: c["tunables"].update(levels=[64, 32, 128]), "tunables.levels"),
        ("seq-example", lambda c: c["tunables"].update(horizon=5), "tunables.horizon"),
        ("ivar-verdict", lambda c: c["weights"]["product"].update(rule="zzz"), "weights"),
        ("ivar-verdict", lambda c: c["measure"].update(weights=[0.5, 0.6]), "measure"),
        ("ivar-spectrum", lambda c: c.pop("assume_l2_orthogonal"), "assume_l2_orthogonal"),
        ("kgamma", lambda c: c.pop("x"), "x"),
    ],
)
def test_validation_failures_exit_2(tmp_path, capsys, command, mutate, field):
    cfg = copy.deepcopy(CONFIGS[command])
    cfg.setdefault("tunables", {})
    mutate(cfg)
    code, out = run(tmp_path, command, cfg)
    assert code == 2
    assert field in capsys.readouterr().err
    assert not out.exists()


def test_numeric_failure_exit_3(tmp_path, monkeypatch):
    from kernel_embed import operator
    from kernel_embed.errors import NumericFailure

    def boom(*a, **k):
        raise NumericFailure("eigensolver failed")

    monkeypatch.setattr(operator, "top_eigenvalues", boom)
    code, out = run(tmp_path, "spectrum", CONFIGS["spectrum"])
    assert code == 3 and not out.exists()


def test_annotation_conflict_exit_4(tmp_path, capsys):
    cfg = {"pair": {"mu": "1", "nu": "1", "annotations": {"ratio_limit": 0}}, "tunables": {"horizon": 100}}
    code, out = run(tmp_path, "seq-example", cfg)
    assert code == 4 and "index 100" in capsys.readouterr().err
    assert not out.exists()


def test_not_enumerable_exit_4(tmp_path):
    cfg = copy.deepcopy(CONFIGS["ivar-spectrum"])
    cfg["weights"] = {"product": {"rule": "custom", "annotations": {"expr": "1/j"}}}
    code, out = run(tmp_path, "ivar-spectrum", cfg)
    assert code == 4 and not out.exists()


def test_csv_on_command_without_table(tmp_path, capsys):
    code, out = run(tmp_path, "gram", CONFIGS["gram"], "--csv", str(tmp_path / "g.csv"))
    assert code == 2 and "--csv" in capsys.readouterr().err
    assert not out.exists()


def test_missing_config_file(tmp_path):
    assert main(["gram", "--config", str(tmp_path / "missing.json")]) == 2


def test_command_mismatch(tmp_path):
    cfg = dict(CONFIGS["gram"], command="spectrum")
    code, _ = run(tmp_path, "gram", cfg)
    assert code == 2


def test_output_paths_from_config(tmp_path):
    cfg = copy.deepcopy(CONFIGS["spectrum"])
    cfg["output"] = {"json": str(tmp_path / "a" / "r.json"), "csv": str(tmp_path / "a" / "r.csv")}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert main(["spectrum", "--config", str(path)]) == 0
    assert (tmp_path / "a" / "r.json").exists() and (tmp_path / "a" / "r.csv").exists()


def test_stdout_when_no_output(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(CONFIGS["gram"]))
    assert main(["gram", "--config", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["command"] == "gram"


def test_dumps_formatting():
    text = dumps({"b": 0.1, "a": [1, 2.5, float("inf")], "c": {"x": None, "y": True}})
    assert text.splitlines()[0:2] == ["{", '  "b": 0.10000000000000001,']
    assert json.loads(text) == {"b": 0.1, "a": [1, 2.5, "inf"], "c": {"x": None, "y": True}}


def test_console_script_entry_point(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(CONFIGS["seq-example"]))
    res = subprocess.run([sys.executable, "-m", "kernel_embed.cli", "seq-example", "--config", str(path)], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["result"]["verdicts"]["compact"]["certified"] is True
