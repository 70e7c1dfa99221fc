"""Parameter sweeps over (alpha, sigma) cells and distribution comparisons.

Sweep config (JSON)::

    {
      "problem": "reference",            # or {"file": "p.json"} or an inline problem
      "alpha_grid": [0.1, 0.2, 0.5, 1.0, 2.0, 4.0],
      "disorder_grid": [[0.05, 0.035]],  # or [{"sigma_h": .., "sigma_j": .., "quantize": false, "clamp": false}]
      "realizations": 100000,
      "master_seed": 0,
      "chunk_size": 1024,
      "output_dir": "sweep_out",
      "dynamics": {"actions": [10, 100, 1000], "angular_factor": 6.283185307179586, "step_tol": 1e-8}
    }

Every cell uses ``master_seed``; output files are listed in ``manifest.json``
together with the parameters and seed that produced them.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import io
from .disorder import DisorderParams, sigma_e
from .dynamics import AnnealParams, Schedule, evolve_with_info, ground_overlap, measure_distribution
from .ensemble import (
    DEFAULT_CHUNK,
    LevelDistribution,
    OutputDistribution,
    collapse_to_levels,
    run_disorder_ensemble,
)
from .errors import QADisorderError, SchemaError, UnfittableError
from .ising import IsingProblem, Spectrum, enumerate_spectrum, reference_problem
from .stats import BoltzmannFit, align, boltzmann_distribution, fit_beta, jsd

log = logging.getLogger(__name__)

DEFAULT_ALPHAS = (0.1, 0.2, 0.5, 1.0, 2.0, 4.0)


@dataclass(frozen=True)
class DynamicsBlock:
    actions: tuple[float, ...]
    angular_factor: float = 2.0 * math.pi
    step_tol: float = 1e-8


@dataclass(frozen=True)
class SweepConfig:
    problem: IsingProblem
    alpha_grid: tuple[float, ...] = DEFAULT_ALPHAS
    disorder_grid: tuple[DisorderParams, ...] = (DisorderParams(0.05, 0.035),)
    realizations: int = 100_000
    master_seed: int = 0
    output_dir: Path = Path("sweep_out")
    chunk_size: int = DEFAULT_CHUNK
    dynamics: DynamicsBlock | None = None
    problem_source: str = "inline"

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if not self.alpha_grid or any(not a > 0 for a in self.alpha_grid):
            raise ValueError("alpha_grid must hold positive values")
        if not self.disorder_grid:
            raise ValueError("disorder_grid must not be empty")
        if self.dynamics is not None and any(not a > 0 for a in self.dynamics.actions):
            raise ValueError("dynamics actions must be positive")


def _parse_problem(entry, base: Path) -> tuple[IsingProblem, str]:
    if entry == "reference" or entry is None:
        return reference_problem(1.0), "reference"
    if isinstance(entry, dict) and "file" in entry:
        path = Path(entry["file"])
        if not path.is_absolute():
            path = base / path
        return io.load_problem(path), str(entry["file"])
    if isinstance(entry, dict):
        return io.problem_from_dict(entry), "inline"
    raise SchemaError(f"unrecognised problem entry {entry!r}")


def _parse_disorder(entry) -> DisorderParams:
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        return DisorderParams(float(entry[0]), float(entry[1]))
    if isinstance(entry, dict):
        return DisorderParams(
            float(entry.get("sigma_h", 0.0)),
            float(entry.get("sigma_j", 0.0)),
            bool(entry.get("quantize", False)),
            bool(entry.get("clamp", False)),
        )
    raise SchemaError(f"unrecognised disorder entry {entry!r}")


def config_from_dict(data: dict, base: Path = Path(".")) -> SweepConfig:
    try:
        problem, source = _parse_problem(data.get("problem", "reference"), base)
        dyn = data.get("dynamics")
        dynamics = None
        if dyn:
            dynamics = DynamicsBlock(
                tuple(float(a) for a in dyn["actions"]),
                float(dyn.get("angular_factor", 2.0 * math.pi)),
                float(dyn.get("step_tol", 1e-8)),
            )
        out = Path(data.get("output_dir", "sweep_out"))
        return SweepConfig(
            problem=problem,
            alpha_grid=tuple(float(a) for a in data.get("alpha_grid", DEFAULT_ALPHAS)),
            disorder_grid=tuple(_parse_disorder(e) for e in data.get("disorder_grid", [[0.05, 0.035]])),
            realizations=int(data.get("realizations", 100_000)),
            master_seed=int(data.get("master_seed", 0)),
            output_dir=out if out.is_absolute() else base / out,
            chunk_size=int(data.get("chunk_size", DEFAULT_CHUNK)),
            dynamics=dynamics,
            problem_source=source,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"invalid sweep config: {exc}") from exc


def load_config(path) -> SweepConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise io.ParseError(exc.msg, exc.lineno, str(path)) from exc
    return config_from_dict(data, path.parent)


@dataclass
class CellResult:
    alpha: float
    params: DisorderParams
    ground_probability: float | None = None
    levels_occupied: int | None = None
    fit: BoltzmannFit | None = None
    fit_status: str = "ok"
    error: str | None = None
    files: list[str] = field(default_factory=list)


@dataclass
class SweepReport:
    cells: list[CellResult]
    manifest_path: Path
    summary_path: Path
    dynamics_rows: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.error is None for c in self.cells) and all(r.get("error") is None for r in self.dynamics_rows)


def _rel(path: Path, root: Path) -> str:
    return str(path.relative_to(root))


def run_sweep(config: SweepConfig, workers: int = 1) -> SweepReport:
    """Run every (alpha, sigma) cell and write CSV/JSON outputs plus a manifest.

    A failing cell is recorded and the sweep continues; ``report.ok`` is
    False afterwards.
    """
    root = Path(config.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    manifest_files: list[dict] = []
    cells: list[CellResult] = []

    def record(path: Path, kind: str, **params):
        manifest_files.append({"path": _rel(path, root), "kind": kind, "seed": config.master_seed, **params})
        return _rel(path, root)

    base = config.problem
    for a_idx, alpha in enumerate(config.alpha_grid):
        ideal = base.with_alpha(alpha)
        spectrum = None
        for d_idx, params in enumerate(config.disorder_grid):
            cell = CellResult(alpha, params)
            cells.append(cell)
            tag = f"a{a_idx:02d}_d{d_idx:02d}"
            cell_params = {
                "alpha": alpha,
                "sigma_h": params.sigma_h,
                "sigma_j": params.sigma_j,
                "quantize": params.quantize,
                "clamp": params.clamp,
                "realizations": config.realizations,
            }
            log.info("cell %s: alpha=%g sigma_h=%g sigma_j=%g", tag, alpha, params.sigma_h, params.sigma_j)
            try:
                if spectrum is None:
                    spectrum = enumerate_spectrum(ideal)
                dist = run_disorder_ensemble(
                    ideal, params, config.realizations, config.master_seed, workers, config.chunk_size
                )
                levels = collapse_to_levels(dist, ideal, spectrum)
                cell.ground_probability = levels.probability_at(spectrum.ground_energy)
                cell.levels_occupied = len(levels.entries)
                cell.files.append(record(io.write_distribution_csv(dist, ideal, root / f"{tag}_distribution.csv"),
                                         "distribution", **cell_params))
                cell.files.append(record(io.write_levels_csv(levels, root / f"{tag}_levels.csv"),
                                         "levels", **cell_params))
                cell.files.append(record(io.write_histogram_csv(levels, root / f"{tag}_histogram.csv"),
                                         "histogram", **cell_params))
                fit_record = {"sigma_e": sigma_e(params, ideal.n_active, ideal.edge_count), **cell_params}
                try:
                    cell.fit = fit_beta(levels, spectrum)
                    fit_record.update(cell.fit.as_record())
                except UnfittableError as exc:
                    cell.fit_status = "unfittable"
                    fit_record.update({"beta": None, "fit_status": "unfittable", "reason": str(exc)})
                fit_record["support_size"] = len(levels.entries)
                cell.files.append(record(io.write_json(root / f"{tag}_fit.json", fit_record), "fit", **cell_params))
            except QADisorderError as exc:
                cell.error = f"{type(exc).__name__}: {exc}"
                log.error("cell %s failed: %s", tag, cell.error)

    summary_rows = []
    for c in cells:
        summary_rows.append(
            [
                io.fmt(c.alpha),
                io.fmt(c.params.sigma_h),
                io.fmt(c.params.sigma_j),
                config.master_seed,
                "" if c.ground_probability is None else io.fmt(c.ground_probability),
                "" if c.levels_occupied is None else c.levels_occupied,
                "" if c.fit is None else io.fmt(c.fit.beta),
                c.fit_status if c.error is None else "error",
                c.error or "",
            ]
        )
    summary_path = io._write_csv(
        root / "summary.csv",
        ["alpha", "sigma_h", "sigma_j", "seed", "ground_probability", "levels_occupied", "beta", "status", "error"],
        summary_rows,
    )
    record(summary_path, "summary")

    dynamics_rows: list[dict] = []
    if config.dynamics is not None:
        dynamics_rows = _run_dynamics(config, root, record)

    manifest = {
        "problem_source": config.problem_source,
        "problem": io.problem_to_dict(base),
        "master_seed": config.master_seed,
        "realizations": config.realizations,
        "files": manifest_files + [{"path": "manifest.json", "kind": "manifest", "seed": config.master_seed}],
        "failures": [
            {"alpha": c.alpha, "sigma_h": c.params.sigma_h, "sigma_j": c.params.sigma_j, "error": c.error}
            for c in cells
            if c.error
        ]
        + [r for r in dynamics_rows if r.get("error")],
    }
    manifest_path = io.write_json(root / "manifest.json", manifest)
    return SweepReport(cells, manifest_path, summary_path, dynamics_rows)


def _run_dynamics(config: SweepConfig, root: Path, record) -> list[dict]:
    dyn = config.dynamics
    schedule = Schedule()
    rows = []
    for a_idx, alpha in enumerate(config.alpha_grid):
        ideal = config.problem.with_alpha(alpha)
        for k, action in enumerate(dyn.actions):
            row = {"alpha": alpha, "action": action, "angular_factor": dyn.angular_factor}
            try:
                spectrum = enumerate_spectrum(ideal)
                state, info = evolve_with_info(
                    ideal.compact(), schedule,
                    AnnealParams(action_override=action, step_tol=dyn.step_tol, angular_factor=dyn.angular_factor),
                )
                levels = collapse_to_levels(measure_distribution(state, problem=ideal), ideal, spectrum)
                row.update(ground_overlap=ground_overlap(state, ideal.compact()), steps=info.steps)
                path = io.write_levels_csv(levels, root / f"anneal_a{a_idx:02d}_x{k:02d}_levels.csv")
                record(path, "anneal_levels", alpha=alpha, action=action, angular_factor=dyn.angular_factor)
            except (QADisorderError, ValueError) as exc:
                # ValueError: register too large for the statevector
                row["error"] = f"{type(exc).__name__}: {exc}"
            rows.append(row)
    path = io._write_csv(
        root / "dynamics.csv",
        ["alpha", "action", "ground_overlap", "steps", "error"],
        (
            [io.fmt(r["alpha"]), io.fmt(r["action"]),
             io.fmt(r["ground_overlap"]) if "ground_overlap" in r else "", r.get("steps", ""), r.get("error", "")]
            for r in rows
        ),
    )
    record(path, "dynamics_summary")
    return rows


@dataclass
class ComparisonReport:
    jsd: float
    table: list[tuple[float, int, float, float]]
    fit_a: BoltzmannFit | None
    fit_b: BoltzmannFit | None

    @property
    def jsd_percent(self) -> float:
        return 100.0 * self.jsd

    def to_text(self) -> str:
        lines = [f"JSD: {self.jsd_percent:.2f}%"]
        for name, fit in (("A", self.fit_a), ("B", self.fit_b)):
            lines.append(f"beta {name}: " + ("unfittable" if fit is None else f"{fit.beta:.6g}"))
        lines.append(f"{'energy':>14} {'deg':>5} {'P_A':>10} {'P_B':>10}")
        for e, g, pa, pb in self.table:
            lines.append(f"{e:>14.6g} {g:>5d} {pa:>10.6f} {pb:>10.6f}")
        return "\n".join(lines)

    def as_record(self) -> dict:
        return {
            "jsd": self.jsd,
            "jsd_percent": self.jsd_percent,
            "beta_a": None if self.fit_a is None else self.fit_a.beta,
            "beta_b": None if self.fit_b is None else self.fit_b.beta,
            "levels": [{"energy": e, "degeneracy": g, "p_a": pa, "p_b": pb} for e, g, pa, pb in self.table],
        }


def _try_fit(levels: LevelDistribution, spectrum: Spectrum) -> BoltzmannFit | None:
    try:
        return fit_beta(levels, spectrum)
    except UnfittableError:
        return None


def compare_levels(a: LevelDistribution, b: LevelDistribution, spectrum: Spectrum) -> ComparisonReport:
    pair = align(a, b)
    table = []
    for e, pa, pb in zip(pair.support, pair.p, pair.q):
        k = spectrum.find_level(e)
        table.append((float(e), spectrum.levels[k].degeneracy if k is not None else 0, float(pa), float(pb)))
    return ComparisonReport(jsd(pair), table, _try_fit(a, spectrum), _try_fit(b, spectrum))


def compare(
    dist_a: OutputDistribution, dist_b: OutputDistribution, problem: IsingProblem, spectrum: Spectrum | None = None
) -> ComparisonReport:
    """JSD, per-level table and beta fits of two output distributions."""
    spectrum = enumerate_spectrum(problem) if spectrum is None else spectrum
    return compare_levels(
        collapse_to_levels(dist_a, problem, spectrum), collapse_to_levels(dist_b, problem, spectrum), spectrum
    )


def boltzmann_comparison(levels: LevelDistribution, spectrum: Spectrum) -> tuple[ComparisonReport, BoltzmannFit]:
    """Compare an empirical distribution with its own fitted Boltzmann law."""
    fit = fit_beta(levels, spectrum)
    return compare_levels(levels, boltzmann_distribution(spectrum, fit.beta), spectrum), fit

