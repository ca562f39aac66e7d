import csv
import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from fusionlab import matrices
from fusionlab.cli import main


SCENARIO = """\
left
2
0 1
right
2
0 1
fuse 0 0
"""


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "two_paths.scenario"
    path.write_text(SCENARIO)
    return str(path)


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# analyze


def test_analyze_stdout(capsys):
    assert main(["analyze", "--matrix", "pbs2"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["matrix"] == "pbs2"
    assert report["units"] == "bits"
    assert report["total_relevant_probability"] == pytest.approx(0.5)
    assert len(report["relevant_outcomes"]) == 6
    live = [r for r in report["relevant_outcomes"] if r["probability"] > 0]
    assert len(live) == 4
    for row in live:
        assert row["probability"] == pytest.approx(0.125)
        assert row["entropy"] == pytest.approx(1.0)
        assert row["classification"]["labels"][0] == "Stabilizer"


def test_analyze_nats_scaling(capsys):
    main(["analyze", "--matrix", "pbs2"])
    bits = json.loads(capsys.readouterr().out)
    main(["analyze", "--matrix", "pbs2", "--nats"])
    nats = json.loads(capsys.readouterr().out)
    assert nats["units"] == "nats"
    live = [r for r in nats["relevant_outcomes"] if r["probability"] > 0]
    assert live[0]["entropy"] == pytest.approx(np.log(2.0))
    assert bits["relevant_outcomes"][1]["probability"] == pytest.approx(
        nats["relevant_outcomes"][1]["probability"]
    )


def test_analyze_writes_file(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["analyze", "--matrix", "theorem7", "--out", str(out)]) == 0
    assert f"wrote {out}" in capsys.readouterr().out
    report = json.loads(out.read_text())
    assert report["matrix"] == "theorem7"


def test_analyze_matrix_file_round_trip(tmp_path, capsys):
    path = tmp_path / "pbs2.json"
    matrices.save_matrix(path, matrices.builtin("pbs2"))
    assert main(["analyze", "--matrix", str(path)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["total_relevant_probability"] == pytest.approx(0.5)


def test_analyze_rejects_non_unitary(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"matrix": [[[1.0, 0.0]] * 4] * 4}))
    assert main(["analyze", "--matrix", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err


def test_analyze_rejects_missing_file(capsys):
    assert main(["analyze", "--matrix", "no_such_file.json"]) == 2
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# sample


def test_sample_deterministic(tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["sample", "--n", "20", "--seed", "9", "--out", str(out1)]) == 0
    assert main(["sample", "--n", "20", "--seed", "9", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    rows = _read_csv(out1)
    assert len(rows) == 20
    assert set(rows[0]) == {"p_total", "S_exp", "units"}
    assert rows[0]["units"] == "bits"
    summary = capsys.readouterr().out
    assert "S_exp mean=" in summary


def test_sample_threshold_mode(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code = main(
        ["sample", "--n", "10", "--mode", "threshold", "--s-target", "0.5",
         "--s-target", "1.0", "--out", str(out)]
    )
    assert code == 0
    rows = _read_csv(out)
    assert len(rows) == 20
    assert set(rows[0]) == {"s_target", "P", "units"}
    assert {r["s_target"] for r in rows} == {"0.5", "1"}


def test_sample_rejects_bad_n(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--n", "0"])
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# optimize


def test_optimize_tiny_threshold_run(tmp_path, capsys):
    code = main(
        ["optimize", "threshold", "--s-target", "1.0", "--s-target", "0.0",
         "--restarts", "2", "--iterations", "20", "--out", str(tmp_path)]
    )
    assert code == 0
    rows = _read_csv(tmp_path / "sweep_threshold.csv")
    assert [r["s_target_bits"] for r in rows] == ["1", "0"]
    assert float(rows[1]["P_max"]) == 1.0
    assert float(rows[0]["P_max"]) == 0.5
    best = json.loads((tmp_path / "best_threshold_s1.json").read_text())
    assert best["objective"] == "threshold"
    assert best["target"] == 1.0
    assert best["from_builtin"] in ("pbs2", "theorem7")
    u = matrices.matrix_from_json(best)
    assert u.shape == (4, 4)
    out = capsys.readouterr().out
    assert "wrote" in out and "states_used=" in out


def test_optimize_tiny_expectation_run(tmp_path):
    code = main(
        ["optimize", "expectation", "--p-target", "0.5", "--restarts", "2",
         "--iterations", "20", "--out", str(tmp_path)]
    )
    assert code == 0
    rows = _read_csv(tmp_path / "sweep_expectation.csv")
    assert set(rows[0]) == {
        "p_target",
        "S_exp_max",
        "S_exp_mean",
        "states_used",
        "seed",
        "iterations",
        "units",
    }
    assert float(rows[0]["S_exp_max"]) == pytest.approx(0.5, abs=1e-9)
    assert (tmp_path / "best_expectation_p0.5.json").exists()


def test_optimize_flag_validation(tmp_path, capsys):
    # missing targets
    assert main(["optimize", "expectation", "--out", str(tmp_path)]) == 2
    # wrong-mode flag
    assert main(
        ["optimize", "threshold", "--s-target", "0.5", "--p-target", "0.7",
         "--out", str(tmp_path)]
    ) == 2
    # target outside the valid range
    assert main(
        ["optimize", "expectation", "--p-target", "0.2", "--out", str(tmp_path)]
    ) == 2
    assert capsys.readouterr().err.count("error:") == 3


# ---------------------------------------------------------------------------
# verify


def test_verify_pass(capsys):
    assert main(["verify", "--trials", "10", "--suite", "unitarity",
                 "--suite", "norm_identity"]) == 0
    out = capsys.readouterr().out
    assert "unitarity: passed=" in out
    assert out.strip().endswith("PASS")


def test_verify_fault_injection_fails(capsys):
    code = main(["verify", "--trials", "10", "--suite", "channel_invariants",
                 "--inject-fault", "sign"])
    assert code == 1
    assert capsys.readouterr().out.strip().endswith("FAIL")


def test_verify_unknown_suite(capsys):
    assert main(["verify", "--trials", "5", "--suite", "bogus"]) == 2
    assert "unknown suite" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# oracle


def test_oracle_pass(scenario_file, tmp_path, capsys):
    out = tmp_path / "oracle.json"
    code = main(["oracle", scenario_file, "--matrix", "pbs2", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["pass"] is True
    assert report["arity"] == 1
    assert len(report["outcomes"]) == 6


def test_oracle_stdout(scenario_file, capsys):
    assert main(["oracle", scenario_file, "--matrix", "theorem7"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["pass"] is True


def test_oracle_register_too_large(tmp_path, capsys):
    big = SCENARIO.replace("left\n2\n0 1\n", "left\n8\n" + "".join(
        f"{i} {i+1}\n" for i in range(7)
    )).replace("right\n2\n0 1\n", "right\n8\n" + "".join(
        f"{i} {i+1}\n" for i in range(7)
    ))
    path = tmp_path / "big.scenario"
    path.write_text(big)
    assert main(["oracle", str(path), "--matrix", "pbs2"]) == 2
    assert "error:" in capsys.readouterr().err


def test_oracle_malformed_scenario(tmp_path, capsys):
    path = tmp_path / "broken.scenario"
    path.write_text("left\n2\n0 1\n")
    assert main(["oracle", str(path), "--matrix", "pbs2"]) == 2


# ---------------------------------------------------------------------------
# console entry point


@pytest.mark.skipif(shutil.which("fusionlab") is None, reason="script not installed")
def test_console_script_runs():
    proc = subprocess.run(
        ["fusionlab", "verify", "--trials", "5", "--suite", "unitarity"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "PASS" in proc.stdout


def test_module_invocation():
    proc = subprocess.run(
        [sys.executable, "-m", "fusionlab.cli", "analyze", "--matrix", "identity"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert '"total_relevant_probability": 1' in proc.stdout
