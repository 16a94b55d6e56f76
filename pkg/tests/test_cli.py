import csv
import json

import pytest

from kansim.cli import main
from kansim.model import synth_model
from kansim.modelio import save_model


def run_cli(args):
    return main(args)


def test_run_synth_kan_with_mask(tmp_path, capsys):
    out = tmp_path / "rep"
    rc = run_cli(["run", "--synth", "kan:72,48", "--mask", "1010", "--seed", "7",
                  "--batch", "16", "--out", str(out)])
    assert rc == 0
    rows = list(csv.DictReader(open(f"{out}.csv")))
    assert len(rows) == 1
    assert float(rows[0]["speedup_vs_baseline"]) > 1.0
    assert rows[0]["functional_ok"] == "True"
    sidecar = json.loads((tmp_path / "rep.json").read_text())
    assert sidecar["config"]["mask"] == "1010"
    assert sidecar["verdicts"]["functional_ok"] is True


def test_run_mode_mismatch_no_report(tmp_path, capsys):
    out = tmp_path / "bad"
    rc = run_cli(["run", "--synth", "mlp:8,4", "--mode", "kan-pipeline", "--out", str(out)])
    assert rc != 0
    assert not (tmp_path / "bad.csv").exists()
    assert "requires" in capsys.readouterr().err


def test_run_requires_exactly_one_model_source(tmp_path, capsys):
    rc = run_cli(["run", "--out", str(tmp_path / "x")])
    assert rc == 2
    rc = run_cli(["run", "--synth", "kan:4,4", "--model", "nope.vikn",
                  "--out", str(tmp_path / "x")])
    assert rc == 2


def test_run_deterministic_bytes(tmp_path, capsys):
    out = tmp_path / "det"
    args = ["run", "--synth", "kan:8,4", "--mask", "1100", "--seed", "3",
            "--batch", "8", "--out", str(out)]
    assert run_cli(args) == 0
    first = (tmp_path / "det.csv").read_bytes(), (tmp_path / "det.json").read_bytes()
    assert run_cli(args) == 0
    second = (tmp_path / "det.csv").read_bytes(), (tmp_path / "det.json").read_bytes()
    assert first == second


def test_run_loads_model_file(tmp_path, capsys):
    net = synth_model("mlp", [6, 4], seed=5)
    path = tmp_path / "m.vikn"
    save_model(net, path)
    rc = run_cli(["run", "--model", str(path), "--mode", "mlp-parallel",
                  "--out", str(tmp_path / "rep")])
    assert rc == 0


def test_run_f16_precision(tmp_path, capsys):
    rc = run_cli(["run", "--synth", "kan:6,4", "--precision", "f16-emu",
                  "--batch", "4", "--out", str(tmp_path / "h")])
    assert rc == 0


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"synth": "kan:8,4", "mask": "1010", "batch": 4, "seed": 1}))
    out = tmp_path / "c"
    rc = run_cli(["run", "--config", str(cfg), "--mask", "1111", "--out", str(out)])
    assert rc == 0
    sidecar = json.loads((tmp_path / "c.json").read_text())
    assert sidecar["config"]["mask"] == "1111"  # flag wins
    assert sidecar["config"]["batch"] == 4      # file value kept


def test_config_file_unknown_field(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"synth": "kan:8,4", "bogus": 1}))
    rc = run_cli(["run", "--config", str(cfg), "--out", str(tmp_path / "x")])
    assert rc == 2
    assert "bogus" in capsys.readouterr().err


def test_sweep_recipe_fig7(tmp_path, capsys):
    out = tmp_path / "f7"
    rc = run_cli(["sweep", "--recipe", "fig7", "--out", str(out)])
    assert rc == 0
    rows = list(csv.DictReader(open(f"{out}.csv")))
    assert [r["point"] for r in rows] == ["0", "25", "50", "75"]
    speedups = [float(r["speedup_vs_baseline"]) for r in rows]
    assert speedups == sorted(speedups)
    sidecar = json.loads((tmp_path / "f7.json").read_text())
    assert "speedup_at_75" in sidecar["headline"]


def test_sweep_recipe_fig8_headline(tmp_path, capsys):
    out = tmp_path / "f8"
    rc = run_cli(["sweep", "--recipe", "fig8", "--out", str(out)])
    assert rc == 0
    headline = json.loads((tmp_path / "f8.json").read_text())["headline"]
    assert headline["ops_ratio"] == pytest.approx(3.29, rel=0.10)
    assert headline["latency_ratio"] <= 1.6


def test_sweep_recipe_fig6(tmp_path, capsys):
    out = tmp_path / "f6"
    rc = run_cli(["sweep", "--recipe", "fig6", "--out", str(out)])
    assert rc == 0
    rows = list(csv.DictReader(open(f"{out}.csv")))
    assert [r["point"] for r in rows] == ["baseline", "zero_skip", "zero_skip_spu"]
    headline = json.loads((tmp_path / "f6.json").read_text())["headline"]
    assert headline["speedup_zero_skip"] >= 1.3
    assert headline["speedup_with_spu"] <= 2.2


def test_sweep_custom_param(tmp_path, capsys):
    out = tmp_path / "sw"
    rc = run_cli(["sweep", "--synth", "kan:16,8", "--param", "pattern_rate",
                  "--values", "0,50,75", "--batch", "8", "--out", str(out)])
    assert rc == 0
    rows = list(csv.DictReader(open(f"{out}.csv")))
    assert len(rows) == 3


def test_sweep_empty_values(tmp_path, capsys):
    rc = run_cli(["sweep", "--synth", "kan:16,8", "--param", "G",
                  "--values", "", "--out", str(tmp_path / "x")])
    assert rc == 2
    assert "empty sweep values" in capsys.readouterr().err


def test_config_echo_reproduces_rows(tmp_path, capsys):
    out = tmp_path / "orig"
    rc = run_cli(["run", "--synth", "kan:16,8", "--mask", "1010", "--seed", "9",
                  "--batch", "8", "--out", str(out)])
    assert rc == 0
    sidecar = json.loads((tmp_path / "orig.json").read_text())
    echo = dict(sidecar["config"])
    echo["out"] = str(tmp_path / "replay")
    cfg_path = tmp_path / "echo.json"
    cfg_path.write_text(json.dumps(echo))
    assert run_cli(["run", "--config", str(cfg_path)]) == 0
    orig_rows = (tmp_path / "orig.csv").read_text()
    replay_rows = (tmp_path / "replay.csv").read_text()
    assert orig_rows == replay_rows


def test_verify_green(capsys):
    assert run_cli(["verify"]) == 0
    out = capsys.readouterr().out
    lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert len(lines) >= 10
    assert all(l.startswith("PASS") for l in lines)


def test_verify_fault_injection(capsys):
    assert run_cli(["verify", "--inject-fault", "flip-basis-sign"]) == 1
    out = capsys.readouterr().out
    assert "FAIL partition_of_unity" in out
