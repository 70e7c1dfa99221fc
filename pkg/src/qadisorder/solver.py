"""Exact ground states of diagonal Ising Hamiltonians."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import CapabilityError
from .ising import MAX_ENUMERATED, IsingProblem, SpinConfiguration, energies

NAIVE_LIMIT = 20
_NAIVE_BLOCK = 1 << 16


@dataclass(frozen=True)
class GroundStateResult:
    configs: tuple[SpinConfiguration, ...]
    energy: float

    @property
    def config(self) -> SpinConfiguration:
        """Deterministic representative: the lowest bit pattern."""
        return self.configs[0]


def _slack(problem: IsingProblem) -> float:
    # absorbs accumulation error of the candidate scan; candidates are re-scored exactly
    return 1e-9 * max(1.0, problem.spectral_bound())


def _finalize(problem: IsingProblem, compact_bits: np.ndarray, tie_tol: float) -> GroundStateResult:
    full = np.sort(np.asarray(problem.expand_bits(compact_bits), dtype=np.int64))
    exact = energies(problem, full)
    e0 = float(exact.min())
    keep = full[exact <= e0 + tie_tol]
    return GroundStateResult(tuple(SpinConfiguration(int(b), problem.n) for b in keep), e0)


def walk_arrays(problem: IsingProblem):
    """Compact, alpha-scaled arrays the Gray-code kernels operate on."""
    compact = problem.compact()
    h = compact.alpha * compact.h_array
    jv = compact.alpha * compact.j_array
    indptr, nbr, eidx = _kernels.adjacency(compact.n, compact.edge_array)
    return h, jv, indptr, nbr, eidx


def ground_state(problem: IsingProblem, tie_tol: float = 0.0) -> GroundStateResult:
    """All minimizers within ``tie_tol`` of the minimum, found by a Gray-code walk.

    Each step flips one spin and updates the energy by that spin's local
    field; a second walk collects candidates, which are re-scored by direct
    evaluation before the tie filter is applied.
    """
    if tie_tol < 0:
        raise ValueError("tie_tol must be non-negative")
    if problem.n_active > MAX_ENUMERATED:
        raise CapabilityError(f"{problem.n_active} active qubits exceed the limit {MAX_ENUMERATED}")
    arrays = walk_arrays(problem)
    emin = _kernels.walk_minimum(*arrays)
    candidates = _kernels.walk_below(*arrays, emin + tie_tol + _slack(problem))
    return _finalize(problem, candidates, tie_tol)


def ground_state_naive(problem: IsingProblem, tie_tol: float = 0.0) -> GroundStateResult:
    """Reference solver: evaluates each configuration from scratch via a
    dense spin/product feature matrix.  Used to cross-check ``ground_state``."""
    if tie_tol < 0:
        raise ValueError("tie_tol must be non-negative")
    if problem.n_active > NAIVE_LIMIT:
        raise CapabilityError(f"{problem.n_active} active qubits exceed the naive limit {NAIVE_LIMIT}")
    compact = problem.compact()
    n = compact.n
    edges = compact.edge_array
    weights = compact.alpha * np.concatenate([compact.h_array, compact.j_array])
    size = 1 << n
    values = np.empty(size)
    for start in range(0, size, _NAIVE_BLOCK):
        z = np.arange(start, min(size, start + _NAIVE_BLOCK), dtype=np.int64)
        spins = (1 - 2 * ((z[:, None] >> np.arange(n)) & 1)).astype(np.float64)
        products = spins[:, edges[:, 0]] * spins[:, edges[:, 1]]
        values[start : start + len(z)] = np.hstack([spins, products]) @ weights
    emin = values.min()
    candidates = np.flatnonzero(values <= emin + tie_tol + _slack(problem))
    return _finalize(problem, candidates, tie_tol)
