import json
import subprocess
import sys

import pytest

from onecomp.cli import build_parser, main
from onecomp.inner import atomic, blaschke
from onecomp.serialize import SpecDocument


@pytest.fixture
def spec_file(tmp_path):
    p = tmp_path / "pair.json"
    p.write_text(json.dumps(SpecDocument(blaschke(0.5, -0.5), "pair", (0.1, 0.4)).to_json()))
    return p


FAST = ["--grid-levels", "2"]


def test_analyze_writes_report(spec_file, tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["analyze", "--spec", str(spec_file), "--out", str(out), *FAST]) == 0
    body = json.loads(out.read_text())
    assert [v["verdict"] for v in body["verdicts"]] == ["disconnected", "connected"]
    assert "eta=0.1 disconnected" in capsys.readouterr().out


def test_empty_eta_list(spec_file, tmp_path):
    out = tmp_path / "r.json"
    assert main(["analyze", "--spec", str(spec_file), "--eta", "", "--out", str(out), *FAST]) == 0
    assert json.loads(out.read_text())["verdicts"] == []


def test_output_dir_from_environment(spec_file, tmp_path, monkeypatch):
    monkeypatch.setenv("ONECOMP_OUT_DIR", str(tmp_path / "env"))
    assert main(["render", "--spec", str(spec_file), "--size", "32", *FAST]) == 0
    assert (tmp_path / "env" / "pair.ppm").read_bytes().startswith(b"P6")
    assert main(["render", "--spec", str(spec_file), "--format", "svg", "--size", "32", *FAST]) == 0
    assert (tmp_path / "env" / "pair.svg").exists()


def test_bad_spec_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "finite_blaschke"}')
    assert main(["analyze", "--spec", str(bad), "--out", str(tmp_path / "x.json")]) == 2
    assert "invalid spec" in capsys.readouterr().err
    assert main(["analyze", "--spec", str(tmp_path / "nope.json")]) == 2


def test_budget_exit_code(tmp_path, capsys):
    spec = tmp_path / "q.json"
    spec.write_text(json.dumps({
        "function": {"kind": "infinite_blaschke", "sequence": {"generator": "power", "params": {"p": 2}}},
        "eta": [0.5],
    }))
    code = main(["analyze", "--spec", str(spec), "--budget", "10", "--out", str(tmp_path / "q.out.json")])
    assert code == 3
    assert "budget" in capsys.readouterr().err


def test_unwritable_output(spec_file, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["analyze", "--spec", str(spec_file), "--out", str(blocker / "r.json"), *FAST]) == 1


def test_bad_eta_is_a_usage_error(spec_file):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--spec", str(spec_file), "--eta", "0.5,abc"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["analyze", "--spec", str(spec_file), "--eta", "1.5"])


def test_help_shows_defaults():
    text = build_parser()._subparsers._group_actions[0].choices["render"].format_help()
    assert "default: 256" in text
    assert "ONECOMP_OUT_DIR" in text


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "onecomp", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "paper-suite" in res.stdout


def test_run_suite_subset(tmp_path, monkeypatch, capsys):
    import onecomp.cli as cli

    real = cli.run_suite
    monkeypatch.setattr(cli, "run_suite", lambda out, policy: real(out, policy, names=["atomic"]))
    assert main(["paper-suite", "--out", str(tmp_path), *FAST]) == 0
    assert (tmp_path / "atomic.json").exists() and (tmp_path / "summary.json").exists()
