"""Disorder ensembles: sample realizations, solve each exactly, aggregate outputs."""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .disorder import SEED_MASK, DisorderParams
from .errors import CapabilityError, ConsistencyError
from .ising import MAX_ENUMERATED, IsingProblem, SpinConfiguration, Spectrum, energies

DEFAULT_CHUNK = 1024
QUANTIZED_TIE_TOL = 1e-9


@dataclass(frozen=True)
class OutputDistribution:
    """Empirical counts over output configurations."""

    counts: Mapping[SpinConfiguration, int]
    total: int
    n: int

    def __post_init__(self):
        counts = dict(sorted(self.counts.items()))
        for c, k in counts.items():
            if c.n != self.n:
                raise ValueError(f"configuration width {c.n} differs from n={self.n}")
            if k < 0:
                raise ValueError("counts must be non-negative")
        if sum(counts.values()) != self.total:
            raise ValueError(f"counts sum to {sum(counts.values())}, total is {self.total}")
        if self.total <= 0:
            raise ValueError("total must be positive")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_bit_counts(cls, n: int, bit_counts: Mapping[int, int]) -> OutputDistribution:
        counts = {SpinConfiguration(int(b), n): int(k) for b, k in bit_counts.items() if k}
        return cls(counts, sum(counts.values()), n)

    def probability(self, config: SpinConfiguration) -> float:
        return self.counts.get(config, 0) / self.total

    def bit_counts(self) -> Counter:
        return Counter({c.bits: k for c, k in self.counts.items()})

    def merge(self, other: OutputDistribution) -> OutputDistribution:
        if other.n != self.n:
            raise ValueError("cannot merge distributions of different width")
        merged = self.bit_counts() + other.bit_counts()
        return OutputDistribution.from_bit_counts(self.n, merged)


@dataclass(frozen=True)
class LevelEntry:
    energy: float
    degeneracy: int
    probability: float
    count: int | None = None


@dataclass(frozen=True)
class LevelDistribution:
    """Probability per ideal energy level, ascending in energy.

    ``total`` is the number of samples behind the probabilities, or None
    for model distributions.
    """

    entries: tuple[LevelEntry, ...]
    total: int | None = None

    def __post_init__(self):
        entries = tuple(sorted(self.entries, key=lambda e: e.energy))
        object.__setattr__(self, "entries", entries)
        if entries and abs(sum(e.probability for e in entries) - 1.0) > 1e-12:
            raise ValueError("level probabilities must sum to 1")

    @property
    def energies(self) -> np.ndarray:
        return np.array([e.energy for e in self.entries])

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([e.probability for e in self.entries])

    @property
    def degeneracies(self) -> np.ndarray:
        return np.array([e.degeneracy for e in self.entries], dtype=np.int64)

    def mean_energy(self) -> float:
        return float(np.dot(self.probabilities, self.energies))

    def probability_at(self, energy: float, tol: float = 1e-9) -> float:
        for e in self.entries:
            if abs(e.energy - energy) <= tol:
                return e.probability
        return 0.0


def _chunk_bounds(realizations: int, chunk_size: int) -> list[tuple[int, int]]:
    return [(a, min(chunk_size, realizations - a)) for a in range(0, realizations, chunk_size)]


def _kernel_inputs(problem: IsingProblem):
    compact = problem.compact()
    indptr, nbr, eidx = _kernels.adjacency(compact.n, compact.edge_array)
    active_idx = np.array(problem.active_sites, dtype=np.int64)
    return (
        problem.alpha * problem.h_array,
        problem.alpha * problem.j_array,
        problem.active_mask,
        active_idx,
        np.left_shift(np.int64(1), active_idx),
        indptr,
        nbr,
        eidx,
    )


def _solve_chunk(inputs, params: DisorderParams, master_seed: int, first: int, count: int, tie_tol: float):
    bits = _kernels.ensemble_chunk(
        *inputs,
        params.sigma_h, params.sigma_j, params.quantize, params.clamp,
        np.uint64(master_seed & SEED_MASK), first, count, tie_tol,
    )
    values, freq = np.unique(bits, return_counts=True)
    return dict(zip(values.tolist(), freq.tolist()))


def realization_ground_bits(
    problem: IsingProblem, params: DisorderParams, master_seed: int, first: int, count: int
) -> np.ndarray:
    """Ground bit pattern of each realization ``first .. first+count-1``."""
    tie_tol = QUANTIZED_TIE_TOL if params.quantize else 0.0
    return _kernels.ensemble_chunk(
        *_kernel_inputs(problem),
        params.sigma_h, params.sigma_j, params.quantize, params.clamp,
        np.uint64(master_seed & SEED_MASK), first, count, tie_tol,
    )


def run_disorder_ensemble(
    problem: IsingProblem,
    params: DisorderParams,
    realizations: int,
    master_seed: int,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> OutputDistribution:
    """Count the exact ground configuration of ``realizations`` disordered copies.

    Realization ``i`` uses seed ``(master_seed, i)``; chunks are merged by
    summing counts, so the result does not depend on ``workers``.
    """
    if realizations < 1:
        raise ValueError("realizations must be >= 1")
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    if problem.n_active > MAX_ENUMERATED:
        raise CapabilityError(f"{problem.n_active} active qubits exceed the limit {MAX_ENUMERATED}")
    tie_tol = QUANTIZED_TIE_TOL if params.quantize else 0.0
    inputs = _kernel_inputs(problem)
    bounds = _chunk_bounds(realizations, chunk_size)
    total: Counter = Counter()
    if workers <= 1 or len(bounds) == 1:
        for first, count in bounds:
            total.update(_solve_chunk(inputs, params, master_seed, first, count, tie_tol))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_solve_chunk, inputs, params, master_seed, first, count, tie_tol)
                for first, count in bounds
            ]
            for fut in futures:
                total.update(fut.result())
    return OutputDistribution.from_bit_counts(problem.n, total)


def collapse_to_levels(
    dist: OutputDistribution, ideal: IsingProblem, spectrum: Spectrum, tol: float = 1e-9
) -> LevelDistribution:
    """Score each configuration with the ideal Hamiltonian and bin by level."""
    if dist.n != ideal.n:
        raise ValueError(f"distribution width {dist.n} differs from problem width {ideal.n}")
    configs = list(dist.counts)
    bits = np.array([c.bits for c in configs], dtype=np.int64)
    scored = energies(ideal, bits)
    level_counts: Counter = Counter()
    levels = spectrum.energies
    for config, e in zip(configs, scored.tolist()):
        k = int(np.searchsorted(levels, e))
        candidates = [i for i in (k - 1, k) if 0 <= i < len(levels) and abs(levels[i] - e) <= tol]
        if not candidates:
            raise ConsistencyError(
                f"configuration {config.bitstring()} has energy {e!r}, which matches no spectrum level"
            )
        best = min(candidates, key=lambda i: abs(levels[i] - e))
        level_counts[best] += dist.counts[config]
    entries = tuple(
        LevelEntry(spectrum.levels[k].energy, spectrum.levels[k].degeneracy, cnt / dist.total, cnt)
        for k, cnt in sorted(level_counts.items())
    )
    return LevelDistribution(entries, dist.total)


def level_distribution_from_counts(
    spectrum: Spectrum, counts: Iterable[tuple[float, int]], tol: float = 1e-9
) -> LevelDistribution:
    """Build a level distribution from (energy, count) pairs, e.g. a table column."""
    per_level: Counter = Counter()
    for e, cnt in counts:
        k = spectrum.find_level(e, tol)
        if k is None:
            raise ConsistencyError(f"energy {e!r} matches no spectrum level")
        per_level[k] += int(cnt)
    total = sum(per_level.values())
    if total <= 0:
        raise ValueError("no counts given")
    entries = tuple(
        LevelEntry(spectrum.levels[k].energy, spectrum.levels[k].degeneracy, c / total, c)
        for k, c in sorted(per_level.items())
        if c
    )
    return LevelDistribution(entries, total)


def default_workers() -> int:
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1)
