import json
import subprocess
import sys

import pytest

from fbai.cli import main


def test_run_and_report(tmp_path, capsys):
    out = tmp_path / "r"
    rc = main(["run", "--preset", "exp1a,exp1c", "--algos", "ours,naive", "--reps", "2", "--seed", "42",
               "--out", str(out), "--workers", "1"])
    assert rc == 0
    assert {"runs.csv", "aggregate.csv", "experiment.json", "report.md"} <= {p.name for p in out.iterdir()}
    assert "exp1c" in capsys.readouterr().out
    assert main(["report", str(out)]) == 0


def test_sweep_n(tmp_path):
    out = tmp_path / "s"
    rc = main(["sweep", "--preset", "exp2_vary_n", "--values", "2,4", "--algos", "ours", "--reps", "1",
               "--out", str(out), "--workers", "1"])
    assert rc == 0
    assert (out / "plot_n.svg").exists()
    meta = json.loads((out / "experiment.json").read_text())
    assert [p["x"] for p in meta["points"]] == [2, 4]


def test_analyze_prints_json(capsys):
    assert main(["analyze", "--preset", "exp1c", "--delta", "0.1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["complexity"]["h_total"] == pytest.approx(280.5304, abs=1e-3)


def test_analyze_instance_file(tmp_path, capsys):
    from fbai.instance import preset

    p = tmp_path / "i.json"
    preset("drug").save(p)
    assert main(["analyze", "--instance", str(p)]) == 0
    assert json.loads(capsys.readouterr().out)["complexity"]["i_star"] == 2


def test_errors(tmp_path, capsys):
    assert main(["report", str(tmp_path)]) == 2
    assert main(["run", "--preset", "exp1a", "--algos", "bogus", "--out", str(tmp_path)]) == 2
    assert main(["analyze", "--instance", str(tmp_path / "none.json")]) == 2
    assert "error" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["run", "--out", str(tmp_path)])


def test_console_script_module():
    r = subprocess.run([sys.executable, "-m", "fbai.cli", "analyze", "--preset", "exp1a"],
                       capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["complexity"]["i_star"] == 4
