import json
import os

import pytest

from sitetwin.cli import main


def run(tmp_path, *argv):
    return main(["--project", str(tmp_path / "proj"), *argv])


def test_init_demo_and_double_init(tmp_path, capsys):
    assert run(tmp_path, "init", "--demo") == 0
    out = capsys.readouterr().out
    assert "dfw-midrise" in out
    assert run(tmp_path, "init", "--demo") == 2  # already exists -> data error


def test_usage_error_exit_code_1(tmp_path):
    assert main(["--project", str(tmp_path), "notacommand"]) == 1
    assert main([]) == 1


def test_missing_project_is_data_error(tmp_path):
    assert run(tmp_path, "forecast") == 2


def test_week_and_forecast_flow(tmp_path, capsys):
    run(tmp_path, "init", "--demo")
    assert run(tmp_path, "week", "1", "--auto-decide") == 0
    assert run(tmp_path, "week", "2", "--auto-decide") == 0
    capsys.readouterr()
    assert run(tmp_path, "forecast") == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0] == "week,p50,p80"
    assert len(lines) == 3
    week1_p50 = float(lines[1].split(",")[1])
    assert abs(week1_p50 - 120.0) <= 1.0


def test_week_out_of_order_is_data_error(tmp_path):
    run(tmp_path, "init", "--demo")
    assert run(tmp_path, "week", "7") == 2


def test_evm_output(tmp_path, capsys):
    run(tmp_path, "init", "--demo")
    capsys.readouterr()
    assert run(tmp_path, "evm") == 0
    out = capsys.readouterr().out
    assert "crossover: month 3" in out
    assert out.splitlines()[1].startswith("1,0.92")


def test_ingest_bad_file_is_data_error(tmp_path):
    run(tmp_path, "init", "--id", "empty")
    bad = tmp_path / "bad.csv"
    bad.write_text("period,pv,ev,ac\n1,100,oops,90\n")
    assert run(tmp_path, "ingest", "evm", str(bad)) == 2


def test_decide_flow(tmp_path, capsys):
    run(tmp_path, "init", "--demo")
    run(tmp_path, "week", "1")
    capsys.readouterr()
    assert run(tmp_path, "recommend") == 0
    rec_line = capsys.readouterr().out.strip().splitlines()[0]
    action_id = rec_line.split()[0]
    assert run(tmp_path, "decide", action_id, "reject", "--reason", "Supervisor preference") == 0
    out = capsys.readouterr().out
    assert "rejected" in out
    # second decision on the same action is a data error
    assert run(tmp_path, "decide", action_id, "adopt") == 2


def test_whatif_and_tornado(tmp_path, capsys):
    run(tmp_path, "init", "--demo")
    scen = tmp_path / "scen.json"
    scen.write_text(json.dumps({
        "name": "test-offset",
        "perturbations": [{"type": "duration-offset", "activity": "A110", "days": 4}],
    }))
    capsys.readouterr()
    assert run(tmp_path, "--samples", "2000", "whatif", str(scen)) == 0
    out = capsys.readouterr().out
    assert "test-offset" in out
    value = float(out.strip().splitlines()[1].split(",")[1])
    assert value > 0

    assert run(tmp_path, "--samples", "1000", "tornado") == 0
    out = capsys.readouterr().out
    rows = out.strip().splitlines()
    assert len(rows) == 8  # header + seven fixture scenarios
    assert rows[0].startswith("rank,")


def test_report_after_replay(tmp_path, capsys):
    run(tmp_path, "init", "--demo")
    for week in range(1, 17):
        assert run(tmp_path, "week", str(week), "--auto-decide") == 0
    capsys.readouterr()
    assert run(tmp_path, "report") == 0
    out = capsys.readouterr().out
    assert "H1: met" in out
    assert "H3: partially met" in out
    assert "overtime reduction" in out


def test_report_before_replay_is_data_error(tmp_path):
    run(tmp_path, "init", "--demo")
    run(tmp_path, "week", "1")
    assert run(tmp_path, "report") == 2


def test_ablate_command(tmp_path, capsys):
    run(tmp_path, "init", "--demo")
    capsys.readouterr()
    assert run(tmp_path, "ablate", "bayes") == 0
    row = json.loads(capsys.readouterr().out)
    assert row["components_removed"] == ["bayes"]
