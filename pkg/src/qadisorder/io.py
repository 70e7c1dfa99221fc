"""File formats.

Problem file (JSON)::

    {"n": 3, "alpha": 1.0, "h": [0.1, 0.0, -0.2],
     "couplers": [{"i": 0, "j": 1, "value": -0.5}],
     "active": [0, 1, 2]}            # optional

Sample file (hardware-style dump)::

    n=3
    010,25          # bit string, qubit 0 first; '0' is spin up
    +1 -1 -1,3      # or per-qubit spins separated by spaces

Schedule file (JSON): ``{"a": [...], "b": [...]}``, coefficients highest
degree first.

CSV exports use ``\\n`` line endings and 17 significant digits so that a
fixed input always produces byte-identical files.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from pathlib import Path
from typing import Iterable

import numpy as np

from .dynamics import QuantumState, Schedule
from .ensemble import LevelDistribution, LevelEntry, OutputDistribution
from .errors import ParseError, SchemaError
from .ising import IsingProblem, ProblemGraph, SpinConfiguration, Spectrum, energies


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path, header: list[str], rows: Iterable[Iterable]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


# -- problems -------------------------------------------------------------------


def problem_to_dict(problem: IsingProblem) -> dict:
    out = {
        "n": problem.n,
        "alpha": problem.alpha,
        "h": list(problem.h),
        "couplers": [{"i": i, "j": j, "value": v} for (i, j), v in zip(problem.graph.edges, problem.couplings)],
    }
    if problem.active is not None:
        out["active"] = list(problem.active)
    return out


def problem_from_dict(data: dict) -> IsingProblem:
    try:
        n = int(data["n"])
        h = [float(v) for v in data["h"]]
        couplers = data.get("couplers", [])
        edges = [(int(c["i"]), int(c["j"])) for c in couplers]
        values = [float(c["value"]) for c in couplers]
        alpha = float(data.get("alpha", 1.0))
        active = data.get("active")
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed problem description: {exc}") from exc
    if len(h) != n:
        raise SchemaError(f"problem declares n={n} but lists {len(h)} fields")
    try:
        normalized = [(min(i, j), max(i, j)) for i, j in edges]
        return IsingProblem(ProblemGraph(n, tuple(normalized)), tuple(h), tuple(values), alpha,
                            None if active is None else tuple(active))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def load_problem(path) -> IsingProblem:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, str(path)) from exc
    return problem_from_dict(data)


def save_problem(problem: IsingProblem, path) -> Path:
    return write_json(path, problem_to_dict(problem))


# -- spectra and distributions ----------------------------------------------------


def write_spectrum_csv(spectrum: Spectrum, path) -> Path:
    return _write_csv(path, ["energy", "degeneracy"], ((fmt(lv.energy), lv.degeneracy) for lv in spectrum.levels))


def write_distribution_csv(dist: OutputDistribution, ideal: IsingProblem, path) -> Path:
    configs = list(dist.counts)
    scored = energies(ideal, np.array([c.bits for c in configs], dtype=np.int64)) if configs else []
    rows = (
        (c.bitstring(), fmt(e), dist.counts[c], fmt(dist.counts[c] / dist.total))
        for c, e in zip(configs, scored)
    )
    return _write_csv(path, ["config_bits", "ideal_energy", "count", "probability"], rows)


def read_distribution_csv(path) -> OutputDistribution:
    counts: Counter = Counter()
    n = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:1] != ["config_bits"]:
            raise ParseError("expected a 'config_bits' header", 1, str(path))
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                config = SpinConfiguration.from_bitstring(row[0].strip())
                count = int(row[2])
            except (IndexError, ValueError) as exc:
                raise ParseError(str(exc), lineno, str(path)) from exc
            if n is None:
                n = config.n
            elif config.n != n:
                raise SchemaError(f"{path}:{lineno}: width {config.n} differs from {n}")
            counts[config.bits] += count
    if n is None:
        raise ParseError("distribution file has no rows", None, str(path))
    return OutputDistribution.from_bit_counts(n, counts)


def write_levels_csv(levels: LevelDistribution, path) -> Path:
    rows = (
        (fmt(e.energy), e.degeneracy, "" if e.count is None else e.count, fmt(e.probability))
        for e in levels.entries
    )
    return _write_csv(path, ["energy", "degeneracy", "count", "probability"], rows)


def read_levels_csv(path) -> LevelDistribution:
    entries = []
    total = 0
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            try:
                count = int(row["count"]) if row.get("count") else None
                entries.append(
                    LevelEntry(float(row["energy"]), int(row["degeneracy"]), float(row["probability"]), count)
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(str(exc), lineno, str(path)) from exc
            total += count or 0
    has_counts = entries and all(e.count is not None for e in entries)
    if has_counts:
        # probabilities are recomputed from counts so the sum is exact
        entries = [LevelEntry(e.energy, e.degeneracy, e.count / total, e.count) for e in entries]
    return LevelDistribution(tuple(entries), total if has_counts else None)


def write_histogram_csv(levels: LevelDistribution, path) -> Path:
    return _write_csv(path, ["energy", "probability"], ((fmt(e.energy), fmt(e.probability)) for e in levels.entries))


# -- hardware-style samples ----------------------------------------------------------


def _parse_config(text: str, n: int) -> SpinConfiguration:
    text = text.strip()
    if " " in text or text.startswith(("+", "-")):
        spins = [int(tok) for tok in text.split()]
        return SpinConfiguration.from_spins(spins)
    return SpinConfiguration.from_bitstring(text)


def read_samples(path, n_expected: int | None = None) -> OutputDistribution:
    """Parse a sample file; occurrences of repeated configurations are summed."""
    path = Path(path)
    counts: Counter = Counter()
    n = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if n is None:
                if not line.startswith("n="):
                    raise ParseError("expected header 'n=<int>'", lineno, str(path))
                try:
                    n = int(line[2:])
                except ValueError as exc:
                    raise ParseError(f"bad qubit count {line[2:]!r}", lineno, str(path)) from exc
                if n_expected is not None and n != n_expected:
                    raise SchemaError(f"{path}:{lineno}: file declares n={n}, problem has {n_expected}")
                continue
            parts = line.rsplit(",", 1)
            if len(parts) != 2:
                raise ParseError("expected '<configuration>,<occurrences>'", lineno, str(path))
            try:
                config = _parse_config(parts[0], n)
                occurrences = int(parts[1])
            except ValueError as exc:
                raise ParseError(str(exc), lineno, str(path)) from exc
            if occurrences < 1:
                raise ParseError("occurrences must be >= 1", lineno, str(path))
            if config.n != n:
                raise SchemaError(f"{path}:{lineno}: configuration has {config.n} qubits, expected {n}")
            counts[config.bits] += occurrences
    if n is None:
        raise ParseError("empty sample file", None, str(path))
    if not counts:
        raise ParseError("sample file has no records", None, str(path))
    return OutputDistribution.from_bit_counts(n, counts)


def write_samples(dist: OutputDistribution, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"n={dist.n}"] + [f"{c.bitstring()},{k}" for c, k in dist.counts.items()]
    path.write_text("\n".join(lines) + "\n")
    return path


def ingest_samples(path, problem: IsingProblem) -> OutputDistribution:
    return read_samples(path, problem.n)


def read_any_distribution(path, problem: IsingProblem) -> OutputDistribution:
    """Sample file or distribution CSV, told apart by the first line."""
    with open(path) as fh:
        first = fh.readline().strip()
    if first.startswith("config_bits"):
        dist = read_distribution_csv(path)
        if dist.n != problem.n:
            raise SchemaError(f"{path}: distribution width {dist.n} differs from problem width {problem.n}")
        return dist
    return ingest_samples(path, problem)


# -- dynamics ----------------------------------------------------------------------


def load_schedule(path) -> Schedule:
    try:
        data = json.loads(Path(path).read_text())
        return Schedule(tuple(data["a"]), tuple(data["b"]))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, str(path)) from exc
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"{path}: schedule needs 'a' and 'b' coefficient lists") from exc


def write_state_csv(state: QuantumState, path) -> Path:
    amps = state.amplitudes
    return _write_csv(
        path, ["basis_index", "re", "im"], ((z, fmt(a.real), fmt(a.imag)) for z, a in enumerate(amps))
    )
