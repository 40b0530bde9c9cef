import json

import pytest

from localselberg.cli import load_config, main, ConfigError

GOOD = """
seed = 4
format = "json"

[[case]]
identity = "beta"
field = "Qp"
p = 2
a = 0.3
b = 0.4
id = "beta-q2"

[[case]]
identity = "beta"
field = "C"
a = 0.4
b = 0.4
samples = 4000
id = "beta-c"

[[case]]
identity = "ff_selberg"
field = "Fq"
p = 5
a = 2
b = 2
c = 1
n = 2
id = "ff5"
"""


def _write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_single_case_flags(capsys):
    rc = main(["verify", "--identity", "beta", "--field", "Qp", "--p", "2", "--a", "0.3",
               "--b", "0.4"])
    out = json.loads(capsys.readouterr().out)
    assert rc == 0 and out[0]["pass"] is True


def test_report_schema_and_determinism(tmp_path):
    cfg = _write(tmp_path, GOOD)
    reports = []
    for i, workers in enumerate((1, 2)):
        out = tmp_path / f"r{i}.json"
        assert main(["verify", "--config", cfg, "--output", str(out),
                     "--workers", str(workers)]) == 0
        reports.append(json.loads(out.read_text()))
    for r in reports:
        for rec in r:
            rec.pop("runtime_ms")
    assert json.dumps(reports[0]) == json.dumps(reports[1])
    fields = ["case_id", "identity", "backend", "params", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
              "cert_err", "mc_sigma", "sigma_dist", "pass", "seed"]
    assert all(k in reports[0][0] for k in fields)
    assert [r["case_id"] for r in reports[0]] == ["beta-q2", "beta-c", "ff5"]


def test_csv_and_table_formats(tmp_path, capsys):
    cfg = _write(tmp_path, GOOD)
    assert main(["verify", "--config", cfg, "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("case_id,identity,backend,params") and len(lines) == 4
    assert main(["verify", "--config", cfg, "--format", "table"]) == 0
    assert "PASS" in capsys.readouterr().out


@pytest.mark.parametrize("text", [
    GOOD + "\nbogus = 1\n",
    GOOD.replace('id = "ff5"', 'id = "ff5"\ncolour = "red"'),
    "[[case]]\nidentity = 'beta'\n",
    "not toml at all [",
    "seed = 1\n",
    GOOD.replace('format = "json"', 'format = "xml"'),
])
def test_malformed_config_exit_2_no_report(tmp_path, text):
    cfg = _write(tmp_path, text)
    out = tmp_path / "report.json"
    assert main(["verify", "--config", cfg, "--output", str(out)]) == 2
    assert not out.exists()


def test_region_violation_exit_2_names_case(tmp_path, capsys):
    bad = GOOD + '\n[[case]]\nidentity = "beta"\nfield = "Qp"\np = 3\na = 0.6\nb = 0.6\nid = "too-big"\n'
    out = tmp_path / "report.json"
    assert main(["verify", "--config", _write(tmp_path, bad), "--output", str(out)]) == 2
    assert "too-big" in capsys.readouterr().err
    assert not out.exists()


def test_budget_exhaustion_exit_3(tmp_path, capsys):
    text = GOOD.replace('id = "ff5"', 'id = "ff5"\nengine = { budget = 10 }')
    assert main(["verify", "--config", _write(tmp_path, text)]) == 3
    assert "ff5" in capsys.readouterr().err


def test_failing_case_exit_1(tmp_path, monkeypatch, capsys):
    import localselberg.cli as cli

    real = cli.record

    def flip(case):
        rec = real(case)
        return {**rec, "pass": rec["pass"] and case.case_id != "ff5"}

    monkeypatch.setattr(cli, "record", flip)
    assert main(["verify", "--config", _write(tmp_path, GOOD), "--workers", "1"]) == 1
    assert "FAIL ff5" in capsys.readouterr().err


def test_unknown_keys_rejected_directly():
    with pytest.raises(ConfigError):
        load_config('[[case]]\nidentity = "beta"\nfield = "Qp"\np = 2\nwhatever = 3\n')


def test_gamma_subcommand(capsys):
    assert main(["gamma", "--field", "Qp", "--p", "3", "--s", "0.5"]) == 0
    row = capsys.readouterr().out.strip().splitlines()[-1].split()
    assert row[1] == "1" and row[-1] == "yes"
    assert main(["gamma", "--field", "C", "--s", "0.5"]) == 0
    assert capsys.readouterr().out.strip().splitlines()[-1].split()[1] == "1"
    assert main(["gamma", "--field", "Qp", "--p", "3", "--s", "0"]) == 2
    assert "pole" in capsys.readouterr().err
    assert main(["gamma", "--field", "Qp", "--p", "3", "--s", "1.5"]) == 2
    assert main(["gamma", "--field", "Qp", "--p", "3", "--s", "1.5", "--continuation"]) == 0


def test_pole_case_exit_2(tmp_path, capsys):
    text = '[[case]]\nidentity = "ff_selberg"\nfield = "Fq"\np = 5\na = 1\nb = 1\nc = 1\nn = 2\nid = "trivial"\n'
    assert main(["verify", "--config", _write(tmp_path, text)]) == 2
    assert "trivial" in capsys.readouterr().err


def test_console_script_runs(tmp_path):
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "localselberg.cli", "verify", "--suite", "smoke",
                           "--format", "table", "--workers", "1"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.count("PASS") == 7
