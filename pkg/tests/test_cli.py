import csv
import json

import pytest

from majority_avg.cli import main
from majority_avg.harness import read_report


@pytest.fixture
def small_report(tmp_path):
    out = tmp_path / "r.csv"
    code = main([
        "run", "--colours", "2,3", "--lengths", "40:120:40", "--trials", "6",
        "--seed", "3", "--out", str(out),
    ])
    assert code == 0
    return out


def test_predict(capsys):
    assert main(["predict", "--algorithm", "mjrty", "--colours", "3", "--length", "1000"]) == 0
    out = capsys.readouterr().out
    assert "expected_total" in out and "1749" in out


def test_predict_json(capsys):
    assert main(["predict", "--algorithm", "tournament", "--colours", "2", "--length", "1000", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["expected_total"] == pytest.approx(1168.6666666)
    assert set(data["terms"]) == {"phase1", "phase2_discarded", "phase2_lists"}


def test_predict_domain_error_is_usage(capsys):
    assert main(["predict", "--algorithm", "mjrty", "--colours", "2", "--length", "10"]) == 2
    assert "m must be" in capsys.readouterr().err


def test_argparse_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["predict", "--algorithm", "nope", "--colours", "3", "--length", "5"])
    assert exc.value.code == 2


def test_run_writes_report(small_report):
    report = read_report(small_report)
    assert len(report.rows) == 3 * 2 * 3


def test_run_config_file(tmp_path, capsys):
    conf = tmp_path / "exp.conf"
    out = tmp_path / "r.json"
    conf.write_text(f"algorithms = fischer_salzberg\ncolours = 3\nlengths = 30:60:30\ntrials = 4\nout = {out}\n")
    assert main(["run", "--config", str(conf), "--seed", "5"]) == 0
    data = json.loads(out.read_text())
    assert [(r["algorithm"], r["n"], r["seed"]) for r in data] == [("fischer_salzberg", 30, 5), ("fischer_salzberg", 60, 5)]


def test_run_unknown_config_key(tmp_path):
    conf = tmp_path / "exp.conf"
    conf.write_text("colour = 3\n")
    assert main(["run", "--config", str(conf), "--out", str(tmp_path / "r.csv")]) == 2


def test_run_needs_out():
    assert main(["run", "--colours", "3", "--trials", "2"]) == 2


def test_run_io_error(tmp_path):
    assert main(["run", "--colours", "3", "--lengths", "5", "--trials", "2",
                 "--out", str(tmp_path / "no" / "r.csv")]) == 3


def test_validate_exit_codes(small_report, tmp_path, capsys):
    assert main(["validate", "--in", str(small_report), "--max-rel-err", "100", "--min-ci-frac", "0"]) == 0
    assert main(["validate", "--in", str(small_report), "--max-rel-err", "0", "--min-ci-frac", "1"]) == 1
    out = capsys.readouterr().out
    assert "overall: FAIL" in out and "excluded mjrty m=2" in out
    assert main(["validate", "--in", str(tmp_path / "missing.csv")]) == 3


def test_oracle_commands(capsys):
    assert main(["oracle", "zeros", "--colours", "3", "--length", "3"]) == 0
    assert "1.66666666667" in capsys.readouterr().out
    assert main(["oracle", "pmaj", "--colours", "2", "--length", "4"]) == 0
    assert capsys.readouterr().out.strip() == "0.625"
    assert main(["oracle", "rho", "--colours", "2", "--length", "3"]) == 0
    assert capsys.readouterr().out.strip() == "0.75"
    assert main(["oracle", "enumerate", "--colours", "2", "--length", "2"]) == 0
    assert capsys.readouterr().out.splitlines()[1:] == ["0 0", "0 1", "1 0", "1 1"]
    assert main(["oracle", "enumerate", "--colours", "3", "--length", "5", "--check-all"]) == 0
    out = capsys.readouterr().out
    assert "checked 243 streams" in out and out.count("mismatches=0") == 3
    assert main(["oracle", "enumerate", "--colours", "2", "--length", "30"]) == 2


def test_figures_command(small_report, tmp_path):
    svg = tmp_path / "fig.svg"
    assert main(["figures", "--in", str(small_report), "--kind", "cross_algorithm", "--out", str(svg)]) == 0
    assert svg.read_text().lstrip().startswith("<?xml")
    with open(svg.with_suffix(".csv")) as fh:
        assert len(list(csv.DictReader(fh))) == 18
