"""Gaussian static disorder on fields and couplers.

Every draw comes from a counter-based stream keyed on
``(master_seed, realization_index, parameter_index)``: parameter ``i < n``
is the field of site ``i`` and parameter ``n + k`` is coupler ``k``.  A
realization therefore never depends on how an ensemble is chunked or
scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .ising import IsingProblem, ProblemGraph

SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class DisorderParams:
    sigma_h: float = 0.0
    sigma_j: float = 0.0
    quantize: bool = False
    clamp: bool = False

    def __post_init__(self):
        for name in ("sigma_h", "sigma_j"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class RealizationSeed:
    master_seed: int
    realization_index: int

    def __post_init__(self):
        if self.realization_index < 0:
            raise ValueError("realization_index must be non-negative")

    def key(self) -> np.uint64:
        key = _kernels.stream_key(np.uint64(self.master_seed & SEED_MASK), np.uint64(self.realization_index))
        return np.uint64(key)


def gaussian_draws(seed: RealizationSeed, count: int) -> np.ndarray:
    """The first ``count`` standard-normal parameter draws of a realization."""
    return _kernels.normals(np.uint64(seed.master_seed & SEED_MASK), np.uint64(seed.realization_index), count)


def perturb(problem: IsingProblem, params: DisorderParams, seed: RealizationSeed) -> IsingProblem:
    """One disordered realization with alpha folded in.

    Fields become ``alpha*h_i + sigma_h*X_i`` on active sites, couplers
    ``alpha*J_ij + sigma_j*Y_ij``; sigma is not scaled by alpha.
    """
    h0 = problem.alpha * problem.h_array
    j0 = problem.alpha * problem.j_array
    h_out = np.empty_like(h0)
    j_out = np.empty_like(j0)
    _kernels.perturb_into(
        h0, j0, problem.active_mask, params.sigma_h, params.sigma_j,
        params.quantize, params.clamp, seed.key(), h_out, j_out,
    )
    return IsingProblem(
        ProblemGraph(problem.n, problem.graph.edges),
        tuple(h_out.tolist()),
        tuple(j_out.tolist()),
        1.0,
        problem.active,
    )


def sigma_e(params: DisorderParams, n_active: int, edge_count: int) -> float:
    """Aggregate energy-level uncertainty sqrt(sigma_h^2 N + sigma_J^2 |G|)."""
    if n_active < 0 or edge_count < 0:
        raise ValueError("counts must be non-negative")
    return math.sqrt(params.sigma_h**2 * n_active + params.sigma_j**2 * edge_count)
