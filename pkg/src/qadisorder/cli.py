"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 compute error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import io
from .dynamics import AnnealParams, Schedule, evolve_with_info, ground_overlap, measure_distribution
from .ensemble import collapse_to_levels, default_workers
from .errors import ComputeError, DataError
from .ising import IsingProblem, enumerate_spectrum, low_energy_gap, reference_problem
from .stats import fit_beta
from .sweep import compare, load_config, run_sweep

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_COMPUTE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _problem(args) -> IsingProblem:
    problem = reference_problem(1.0) if args.problem == "reference" else io.load_problem(args.problem)
    if getattr(args, "alpha", None) is not None:
        problem = problem.with_alpha(args.alpha)
    return problem


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_spectrum(args) -> int:
    problem = _problem(args)
    spectrum = enumerate_spectrum(problem, args.merge_tol)
    path = io.write_spectrum_csv(spectrum, _out(args) / "spectrum.csv")
    print(f"{len(spectrum)} levels, ground {spectrum.ground_energy:.10g} (g={spectrum.levels[0].degeneracy})")
    if len(spectrum) > 1:
        print(f"gap {low_energy_gap(spectrum):.10g}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    if args.out is not None:
        config = replace(config, output_dir=Path(args.out))
    workers = default_workers() if args.workers is None else args.workers
    report = run_sweep(config, workers=workers)
    with open(report.summary_path) as fh:
        sys.stdout.write(fh.read())
    print(f"manifest: {report.manifest_path}")
    return EXIT_OK if report.ok else EXIT_COMPUTE


def cmd_anneal(args) -> int:
    problem = _problem(args)
    schedule = io.load_schedule(args.schedule) if args.schedule else Schedule()
    params = AnnealParams(
        tau=args.tau, action_override=args.action, step_tol=args.step_tol, angular_factor=args.angular_factor
    )
    state, info = evolve_with_info(problem, schedule, params)
    out = _out(args)
    dist = measure_distribution(state, shots=args.shots, seed=args.seed, problem=problem)
    spectrum = enumerate_spectrum(problem)
    levels = collapse_to_levels(dist, problem, spectrum)
    io.write_levels_csv(levels, out / "anneal_levels.csv")
    io.write_state_csv(state, out / "state.csv")
    record = {
        "action": info.action,
        "ground_overlap": ground_overlap(state, problem),
        "norm_drift_per_step": info.norm_drift,
        "refinement_delta": info.refinement_delta,
        "steps": info.steps,
    }
    io.write_json(out / "anneal.json", record)
    print(json.dumps(record, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_fit(args) -> int:
    problem = _problem(args)
    spectrum = enumerate_spectrum(problem)
    dist = io.read_any_distribution(args.distribution, problem)
    fit = fit_beta(collapse_to_levels(dist, problem, spectrum), spectrum)
    record = fit.as_record()
    if args.out:
        io.write_json(_out(args) / "fit.json", record)
    print(json.dumps(record, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_compare(args) -> int:
    problem = _problem(args)
    a = io.read_any_distribution(args.first, problem)
    b = io.read_any_distribution(args.second, problem)
    report = compare(a, b, problem)
    print(report.to_text())
    if args.out:
        io.write_json(_out(args) / "comparison.json", report.as_record())
    return EXIT_OK


def cmd_ingest(args) -> int:
    problem = _problem(args)
    dist = io.ingest_samples(args.samples, problem)
    spectrum = enumerate_spectrum(problem)
    levels = collapse_to_levels(dist, problem, spectrum)
    out = _out(args)
    io.write_distribution_csv(dist, problem, out / "distribution.csv")
    io.write_levels_csv(levels, out / "levels.csv")
    print(f"{dist.total} samples, {len(dist.counts)} configurations, {len(levels.entries)} levels")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qadisorder", description="Static-disorder quantum annealing toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def problem_args(p, out_required=True):
        p.add_argument("--problem", default="reference", help="problem JSON file or 'reference'")
        p.add_argument("--alpha", type=float, default=None, help="override the global scale")
        p.add_argument("--out", required=out_required, default=None)

    p = sub.add_parser("spectrum", help="enumerate and export the exact spectrum")
    problem_args(p)
    p.add_argument("--merge-tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", help="disorder ensembles over an (alpha, sigma) grid")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("anneal", help="statevector annealing run")
    problem_args(p)
    p.add_argument("--tau", type=float, default=1.0, help="annealing time in microseconds")
    p.add_argument("--action", type=float, default=None, help="dimensionless tau*B(1)*angular_factor")
    p.add_argument("--angular-factor", type=float, default=2.0 * math.pi)
    p.add_argument("--step-tol", type=float, default=1e-8)
    p.add_argument("--schedule", default=None, help="schedule coefficient JSON file")
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_anneal)

    p = sub.add_parser("fit", help="fit beta to a distribution or sample file")
    p.add_argument("distribution")
    problem_args(p, out_required=False)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("compare", help="JSD and beta fits of two distributions")
    p.add_argument("first")
    p.add_argument("second")
    problem_args(p, out_required=False)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("ingest", help="convert a sample file to distribution CSVs")
    p.add_argument("samples")
    problem_args(p)
    p.set_defaults(func=cmd_ingest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ComputeError as exc:
        print(f"compute error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
