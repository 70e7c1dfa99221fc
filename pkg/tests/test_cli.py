import json

import pytest

from qadisorder.cli import main
from qadisorder.ensemble import OutputDistribution
from qadisorder.io import write_samples
from qadisorder.ising import enumerate_spectrum


def test_spectrum(tmp_path, capsys):
    assert main(["spectrum", "--alpha", "4", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "48 levels" in out and "ground -10.6" in out and "gap 0.4" in out
    assert (tmp_path / "spectrum.csv").read_text().splitlines()[1] == "-10.6,1"


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["spectrum"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 1
    assert main(["anneal", "--tau", "-1", "--out", str(tmp_path)]) == 1


def test_missing_file_is_data_error(tmp_path):
    assert main(["spectrum", "--problem", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == 2


def test_sweep_and_seed_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"alpha_grid": [4.0], "realizations": 500, "output_dir": "o"}))
    assert main(["sweep", "--config", str(cfg), "--seed", "11", "--workers", "1"]) == 0
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert manifest["master_seed"] == 11
    assert "ground_probability" in capsys.readouterr().out


def test_sweep_failure_exit_code(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"problem": {"n": 27, "h": [0.1] * 27}, "alpha_grid": [1.0], "realizations": 5}))
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 3


def test_bad_config_is_data_error(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text("{")
    assert main(["sweep", "--config", str(cfg)]) == 2


def test_anneal(tmp_path, capsys):
    problem = tmp_path / "p.json"
    problem.write_text(json.dumps({"n": 1, "h": [1.0]}))
    assert main(["anneal", "--problem", str(problem), "--action", "200", "--out", str(tmp_path)]) == 0
    record = json.loads((tmp_path / "anneal.json").read_text())
    assert record["ground_overlap"] > 0.99
    assert (tmp_path / "state.csv").exists() and (tmp_path / "anneal_levels.csv").exists()


def test_anneal_convergence_failure(tmp_path):
    # a step-change tolerance below round-off cannot be met before the step cap
    problem = tmp_path / "p.json"
    problem.write_text(json.dumps({"n": 1, "h": [1.0]}))
    args = ["anneal", "--problem", str(problem), "--action", "1e6", "--step-tol", "1e-15", "--out", str(tmp_path)]
    assert main(args) == 3


@pytest.fixture
def sample_files(tmp_path, ref4):
    s = enumerate_spectrum(ref4)
    g = s.levels[0].representatives[0]
    e = s.levels[1].representatives
    slow = write_samples(OutputDistribution({g: 9993, e[0]: 3, e[1]: 4}, 10000, 14), tmp_path / "slow.txt")
    fast = write_samples(OutputDistribution({g: 9766, e[0]: 93, e[1]: 64, e[2]: 74, s.levels[2].representatives[0]: 3},
                                            10000, 14), tmp_path / "fast.txt")
    return slow, fast


def test_ingest_fit_compare(tmp_path, capsys, sample_files):
    slow, fast = sample_files
    assert main(["ingest", str(slow), "--alpha", "4", "--out", str(tmp_path / "ing")]) == 0
    assert "10000 samples, 3 configurations, 2 levels" in capsys.readouterr().out
    assert main(["fit", str(tmp_path / "ing" / "distribution.csv"), "--alpha", "4"]) == 0
    assert json.loads(capsys.readouterr().out)["beta"] > 0
    assert main(["compare", str(slow), str(fast), "--alpha", "4", "--out", str(tmp_path / "cmp")]) == 0
    assert capsys.readouterr().out.startswith("JSD: ")
    assert (tmp_path / "cmp" / "comparison.json").exists()


def test_fit_unfittable_exit(tmp_path, ref4):
    g = enumerate_spectrum(ref4).levels[0].representatives[0]
    f = write_samples(OutputDistribution({g: 10}, 10, 14), tmp_path / "g.txt")
    assert main(["fit", str(f), "--alpha", "4"]) == 3


def test_wrong_width_is_data_error(tmp_path):
    f = tmp_path / "s.txt"
    f.write_text("n=3\n000,1\n")
    assert main(["ingest", str(f), "--out", str(tmp_path)]) == 2
