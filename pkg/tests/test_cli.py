import csv
import json

import numpy as np
import pytest

from maxmart import config
from maxmart.cli import git_hash, main
from maxmart.errors import DomainError


def write_config(path, **kw):
    path.write_text(json.dumps(kw))
    return str(path)


def test_evaluate_constant_matches_driver(tmp_path):
    cfg = write_config(tmp_path / "c.json", spec={"variant": "max", "f": {"kind": "constant", "params": {"value": 1}}},
                       horizon=0.05, dt=1e-3)
    assert main(["evaluate", "--config", cfg, "--out", str(tmp_path / "o"), "-n", "2"]) == 0
    rows = np.loadtxt(tmp_path / "o/evaluate/series_00000.csv", delimiter=",", skiprows=1)
    assert np.array_equal(rows[:, 1], rows[:, 3])
    meta = json.loads((tmp_path / "o/evaluate/series_00000.csv.meta.json").read_text())
    assert meta["seed"] == 0 and "config" in meta["inputs"]


def test_artifacts_are_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["simulate", "--out", str(tmp_path / d), "-n", "2", "--seed", "4",
                     "--config", write_config(tmp_path / "c.json", horizon=0.02, dt=1e-3)]) == 0
    for name in ("path_00000.csv", "path_00001.csv"):
        assert (tmp_path / "a/simulate" / name).read_bytes() == (tmp_path / "b/simulate" / name).read_bytes()


def test_detect(tmp_path):
    assert main(["detect", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "detect/detection.json").read_text())
    assert rep["is_ay"] is True
    grid = tmp_path / "detect/grid.csv"
    assert (tmp_path / "detect/grid.csv.meta.json").exists()
    cfg = write_config(tmp_path / "c.json", grid_file=str(grid))
    assert main(["detect", "--config", cfg, "--out", str(tmp_path / "again")]) == 0
    meta = json.loads((tmp_path / "again/detect/detection.json.meta.json").read_text())
    assert meta["inputs"]["grid_file"] == git_hash(grid.read_bytes())


def test_recover(tmp_path):
    cfg = write_config(tmp_path / "c.json", bin_centers=[0.1, 0.2], horizon=0.5)
    assert main(["recover", "--config", cfg, "--out", str(tmp_path), "-n", "20"]) == 0
    with open(tmp_path / "recover/f_hat.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2 and abs(float(rows[0]["f_hat"]) - float(rows[0]["f_true"])) < 0.05


def test_recover_empty_bin_is_inconclusive(tmp_path):
    cfg = write_config(tmp_path / "c.json", bin_centers=[9.0], horizon=0.01, dt=1e-3)
    assert main(["recover", "--config", cfg, "--out", str(tmp_path), "-n", "2"]) == 3


def test_verify_selection_and_summary(tmp_path):
    code = main(["verify", "--out", str(tmp_path), "--only", "bplus_x,subordinator_constant", "-n", "300"])
    assert code == 0
    reports = json.loads((tmp_path / "verify/reports.json").read_text())
    assert [r["name"] for r in reports] == ["subordinator_constant", "bplus_x"]
    with open(tmp_path / "verify/summary.csv") as fh:
        assert next(csv.reader(fh)) == ["name", "estimate", "reference", "statistic", "threshold", "verdict",
                                        "wall_time"]


def test_verify_failure_status(tmp_path):
    # convergence of E|H_T - 1| fails for exp_decay (see the notes in README)
    assert main(["verify", "--out", str(tmp_path), "--only", "convergence_exp_decay", "-n", "50"]) == 1


def test_stop_law(tmp_path):
    assert main(["stop-law", "--out", str(tmp_path), "-n", "300", "--config",
                 write_config(tmp_path / "c.json", stop_law_dt=1e-4)]) == 0
    assert (tmp_path / "stop-law/exit_law_samples.csv").read_text().startswith("side,max_value")
    assert json.loads((tmp_path / "stop-law/report.json").read_text())[0]["name"] == "exit_max_law"


def test_usage_errors(tmp_path, capsys):
    assert main(["verify", "--only", "nope", "--out", str(tmp_path)]) == 2
    assert main(["simulate", "--config", write_config(tmp_path / "c.json", dt=2.0, horizon=1.0)]) == 2
    assert main(["simulate", "--config", write_config(tmp_path / "d.json", colour="red")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["simulate", "--config", str(bad)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["dance"])
    assert exc.value.code == 2


def test_output_dir_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(config.OUT_ENV, str(tmp_path / "env"))
    assert config.load().output_dir == str(tmp_path / "env")
    assert config.load(output_dir="flag").output_dir == "flag"
    assert main(["simulate", "-n", "1", "--config", write_config(tmp_path / "c.json", horizon=0.01, dt=1e-3)]) == 0
    assert (tmp_path / "env/simulate/path_00000.csv").exists()


def test_config_validation():
    assert config.RunConfig().paths is None
    assert config.RunConfig(command="recover").paths == 20_000
    with pytest.raises(DomainError):
        config.RunConfig(n_paths=0)
    with pytest.raises(DomainError):
        config.RunConfig(spec={"variant": "max", "f": {"kind": "nope"}})
    with pytest.raises(DomainError):
        config.RunConfig(exit_interval=(1.0, 2.0))
