import csv
import json

import pytest

from qadisorder.disorder import DisorderParams
from qadisorder.ensemble import OutputDistribution, collapse_to_levels, run_disorder_ensemble
from qadisorder.errors import SchemaError
from qadisorder.ising import IsingProblem, enumerate_spectrum, reference_problem
from qadisorder.sweep import (
    SweepConfig,
    boltzmann_comparison,
    compare,
    config_from_dict,
    load_config,
    run_sweep,
)


def read_summary(report):
    with open(report.summary_path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_zero_sigma_cell(tmp_path):
    cfg = SweepConfig(reference_problem(), (4.0,), (DisorderParams(),), 200, 1, tmp_path)
    report = run_sweep(cfg)
    assert report.ok
    (row,) = read_summary(report)
    assert row["ground_probability"] == "1"
    assert row["status"] == "unfittable"
    fit = json.loads((tmp_path / "a00_d00_fit.json").read_text())
    assert fit["beta"] is None and fit["fit_status"] == "unfittable"


def test_alpha_grid_monotone(tmp_path):
    cfg = SweepConfig(reference_problem(), realizations=20_000, master_seed=3, output_dir=tmp_path)
    rows = read_summary(run_sweep(cfg))
    probs = [float(r["ground_probability"]) for r in rows]
    assert len(probs) == 6
    band = 3 * (0.25 / 20_000) ** 0.5
    assert all(b >= a - band for a, b in zip(probs, probs[1:]))
    assert probs[-1] > 0.9


def test_rerun_byte_identical(tmp_path):
    def run(out, workers):
        cfg = SweepConfig(reference_problem(), (0.1, 4.0), realizations=3000, master_seed=5, output_dir=out,
                          chunk_size=500)
        run_sweep(cfg, workers=workers)
        return {p.name: p.read_bytes() for p in sorted(out.iterdir())}

    first = run(tmp_path / "a", 1)
    assert first == run(tmp_path / "b", 1)
    assert first == run(tmp_path / "c", 2)


def test_manifest_lists_every_file(tmp_path):
    cfg = SweepConfig(reference_problem(), (0.5, 2.0), (DisorderParams(0.05, 0.035), DisorderParams(0.03, 0.021)),
                      500, 9, tmp_path)
    report = run_sweep(cfg)
    manifest = json.loads(report.manifest_path.read_text())
    listed = {f["path"] for f in manifest["files"]}
    assert listed == {p.name for p in tmp_path.iterdir()}
    assert all(f["seed"] == 9 for f in manifest["files"])
    cell_files = [f for f in manifest["files"] if f["kind"] == "levels"]
    assert {(f["alpha"], f["sigma_h"]) for f in cell_files} == {(0.5, 0.05), (0.5, 0.03), (2.0, 0.05), (2.0, 0.03)}
    assert manifest["failures"] == []


def test_failure_recorded(tmp_path):
    big = IsingProblem.from_dict([0.1] * 27, {})
    report = run_sweep(SweepConfig(big, (1.0,), realizations=10, output_dir=tmp_path))
    assert not report.ok
    manifest = json.loads(report.manifest_path.read_text())
    assert "CapabilityError" in manifest["failures"][0]["error"]
    assert read_summary(report)[0]["status"] == "error"


def test_dynamics_block(tmp_path):
    p = IsingProblem.from_dict([1.0, -0.5], {(0, 1): 0.3})
    cfg = config_from_dict(
        {"problem": {"n": 2, "h": [1.0, -0.5], "couplers": [{"i": 0, "j": 1, "value": 0.3}]},
         "alpha_grid": [1.0], "realizations": 100, "dynamics": {"actions": [5, 200]}, "output_dir": "out"},
        tmp_path,
    )
    assert cfg.problem == p
    report = run_sweep(cfg)
    overlaps = [r["ground_overlap"] for r in report.dynamics_rows]
    assert overlaps[1] > overlaps[0]
    assert (tmp_path / "out" / "dynamics.csv").exists()


def test_config_loading(tmp_path):
    (tmp_path / "p.json").write_text(json.dumps({"n": 1, "h": [0.5]}))
    (tmp_path / "c.json").write_text(json.dumps({"problem": {"file": "p.json"}, "disorder_grid": [
        {"sigma_h": 0.1, "quantize": True}], "master_seed": 4}))
    cfg = load_config(tmp_path / "c.json")
    assert cfg.problem.n == 1 and cfg.master_seed == 4
    assert cfg.disorder_grid == (DisorderParams(0.1, 0.0, quantize=True),)
    assert cfg.output_dir == tmp_path / "sweep_out"
    with pytest.raises(SchemaError):
        config_from_dict({"disorder_grid": [[0.1]]})
    with pytest.raises(SchemaError):
        config_from_dict({"alpha_grid": [-1.0]})


class TestCompare:
    def test_self_and_disjoint(self, ref4):
        s = enumerate_spectrum(ref4)
        g = OutputDistribution({s.levels[0].representatives[0]: 10}, 10, 14)
        e = OutputDistribution({s.levels[1].representatives[0]: 10}, 10, 14)
        assert compare(g, g, ref4, s).jsd_percent == 0.0
        report = compare(g, e, ref4, s)
        assert report.jsd_percent == 100.0
        assert report.fit_a is None
        assert "JSD: 100.00%" in report.to_text()

    def test_ensemble_against_own_boltzmann(self, ref01):
        s = enumerate_spectrum(ref01)
        d = run_disorder_ensemble(ref01, DisorderParams(0.05, 0.035), 100_000, 7)
        report, fit = boltzmann_comparison(collapse_to_levels(d, ref01, s), s)
        assert report.jsd < 0.05
        assert fit.beta > 0
        assert report.as_record()["jsd_percent"] == pytest.approx(100 * report.jsd)
