import json

import pytest

from restframe.cli import main


def run(tmp_path, command, config=None, seed=42, name="run"):
    outdir = tmp_path / name
    argv = [command, "--out", str(outdir), "--seed", str(seed)]
    if config is not None:
        cfg_path = tmp_path / f"{name}.json"
        cfg_path.write_text(json.dumps(config))
        argv += ["--config", str(cfg_path)]
    code = main(argv)
    return code, outdir


SMALL = {
    "tube": {"n_axis_samples": 20, "n_random_samples": 10},
    "algebra": {"n_states": 5},
    "orbit": {"n_steps": 400, "step_size": 1e-3},
    "spectrum": {"n_points": 1200, "r_max": 120.0},
    "entangle": {"n_points": 64},
    "ehrenfest": {"n_modes": 512, "n_tau": 21},
}


@pytest.mark.parametrize("command", sorted(SMALL))
def test_subcommand_passes_and_writes_report(tmp_path, command):
    code, outdir = run(tmp_path, command, SMALL[command])
    assert code == 0
    report = json.loads((outdir / "report.json").read_text())
    assert report["experiment"] == command
    assert report["seed"] == 42
    assert report["passed"] is True
    assert report["checks"]
    for check in report["checks"]:
        assert {"name", "value", "threshold", "comparator", "passed"} <= set(check)
    for artifact in report["artifacts"]:
        assert (outdir / artifact.split("/")[-1]).exists()


@pytest.mark.parametrize("command,csv_names", [
    ("tube", ["tube_scan.csv"]),
    ("orbit", ["trajectory.csv", "worldlines.csv"]),
    ("entangle", ["kernel.csv"]),
    ("ehrenfest", ["ehrenfest.csv"]),
])
def test_repeat_runs_are_byte_identical(tmp_path, command, csv_names):
    _, first = run(tmp_path, command, SMALL[command], name="first")
    _, second = run(tmp_path, command, SMALL[command], name="second")
    for csv_name in csv_names:
        assert (first / csv_name).read_bytes() == (second / csv_name).read_bytes()


def test_figures_rendered_alongside_csv(tmp_path):
    _, outdir = run(tmp_path, "tube", SMALL["tube"])
    png = outdir / "tube_scan.png"
    assert png.exists() and png.stat().st_size > 0


def test_tube_spinless_offsets_vanish(tmp_path):
    config = dict(SMALL["tube"])
    config["S"] = [0.0, 0.0, 0.0]
    code, outdir = run(tmp_path, "tube", config)
    assert code == 0
    rows = (outdir / "tube_scan.csv").read_text().strip().splitlines()[1:]
    for row in rows:
        _, _, _, off_xt, off_r, rho = row.split(",")
        assert float(off_xt) == 0.0 and float(off_r) == 0.0 and float(rho) == 0.0


def test_spectrum_oscillator_oracle(tmp_path):
    config = {"potential": {"kind": "oscillator", "omega": 1.0},
              "r_max": 20.0, "n_points": 2000, "l_values": [0, 1]}
    code, outdir = run(tmp_path, "spectrum", config)
    assert code == 0
    payload = json.loads((outdir / "spectrum.json").read_text())
    assert payload[0]["levels"][0]["h"] == pytest.approx(3.0, abs=1e-3)
    assert payload[1]["levels"][0]["h"] == pytest.approx(5.0, abs=1e-3)
    assert payload[1]["levels"][0]["multiplicity"] == 3


def test_unknown_config_key_exits_1(tmp_path):
    code, _ = run(tmp_path, "tube", {"bogus": 1})
    assert code == 1


def test_bad_layout_exits_1(tmp_path):
    code, _ = run(tmp_path, "algebra", {"layouts": ["sideways"]})
    assert code == 1


def test_malformed_json_exits_1(tmp_path):
    cfg = tmp_path / "broken.json"
    cfg.write_text("{not json")
    code = main(["tube", "--config", str(cfg), "--out", str(tmp_path / "x")])
    assert code == 1


def test_missing_config_file_exits_1(tmp_path):
    code = main(["tube", "--config", str(tmp_path / "absent.json"),
                 "--out", str(tmp_path / "x")])
    assert code == 1


def test_negative_tolerance_rejected(tmp_path):
    code, _ = run(tmp_path, "tube", {"sup_tolerance": -1.0})
    assert code == 1


def test_numerical_failure_exits_2(tmp_path):
    # a potential well deep enough to break the mass-shell radicand
    config = dict(SMALL["orbit"])
    config["potential"] = {"kind": "custom-polynomial", "coefficients": [-9.0]}
    code, _ = run(tmp_path, "orbit", config)
    assert code == 2


def test_failed_check_exits_3(tmp_path):
    config = dict(SMALL["spectrum"])
    config["oracle_tolerance"] = 1e-12   # unreachable on a coarse grid
    code, outdir = run(tmp_path, "spectrum", config)
    assert code == 3
    report = json.loads((outdir / "report.json").read_text())
    assert report["passed"] is False


def test_env_var_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("RESTFRAME_OUT", str(tmp_path / "envout"))
    monkeypatch.chdir(tmp_path)
    code = main(["tube", "--seed", "1"])
    assert code == 0
    assert (tmp_path / "envout" / "tube" / "report.json").exists()


def test_seed_recorded_and_changes_sampling(tmp_path):
    _, first = run(tmp_path, "tube", SMALL["tube"], seed=1, name="seed1")
    _, second = run(tmp_path, "tube", SMALL["tube"], seed=2, name="seed2")
    assert json.loads((first / "report.json").read_text())["seed"] == 1
    assert (first / "tube_scan.csv").read_bytes() != (second / "tube_scan.csv").read_bytes()
