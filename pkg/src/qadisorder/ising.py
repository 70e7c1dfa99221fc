"""Classical Ising target Hamiltonians, their energies and exact spectra.

Spin convention: bit ``i`` of a configuration word is 0 for ``s_i = +1`` and
1 for ``s_i = -1``.  Energies are dimensionless (units of the final schedule
value B(1)) and always include the global scale ``alpha``::

    E(s) = alpha * (sum_i h_i s_i + sum_{(i,j) in G} J_ij s_i s_j)
"""

from __future__ import annotations

import bisect
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CapabilityError, DegenerateSpectrumError

MAX_QUBITS = 30
MAX_ENUMERATED = 26
DEFAULT_MERGE_TOL = 1e-9
DEFAULT_MAX_REPRESENTATIVES = 16

FIELD_RANGE = (-2.0, 2.0)
COUPLER_RANGE = (-1.0, 1.0)

_BLOCK = 1 << 18


@dataclass(frozen=True, order=True)
class SpinConfiguration:
    """One classical register state packed into an ``n``-bit word."""

    bits: int
    n: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"qubit count {self.n} outside [1, {MAX_QUBITS}]")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bit pattern {self.bits:#x} does not fit in {self.n} qubits")

    @classmethod
    def from_spins(cls, spins: Sequence[int]) -> SpinConfiguration:
        bits = 0
        for i, s in enumerate(spins):
            if s == -1:
                bits |= 1 << i
            elif s != 1:
                raise ValueError(f"spin values must be +1 or -1, got {s!r}")
        return cls(bits, len(spins))

    @classmethod
    def from_bitstring(cls, text: str) -> SpinConfiguration:
        """Parse a string whose i-th character is the bit of qubit i."""
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        bits = 0
        for i, ch in enumerate(text):
            if ch == "1":
                bits |= 1 << i
        return cls(bits, len(text))

    def bitstring(self) -> str:
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(self.n))

    def spins(self) -> np.ndarray:
        return 1 - 2 * ((self.bits >> np.arange(self.n)) & 1)

    def flipped(self) -> SpinConfiguration:
        return SpinConfiguration(self.bits ^ ((1 << self.n) - 1), self.n)


@dataclass(frozen=True)
class ProblemGraph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"qubit count {self.n} outside [1, {MAX_QUBITS}]")
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        object.__setattr__(self, "edges", edges)
        seen = set()
        for i, j in edges:
            if not 0 <= i < j < self.n:
                raise ValueError(f"edge ({i}, {j}) must satisfy 0 <= i < j < {self.n}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))

    def __len__(self):
        return len(self.edges)


@dataclass(frozen=True)
class IsingProblem:
    """Fields and couplers of the target Hamiltonian plus the global scale.

    ``h`` and ``couplings`` hold unscaled values; ``couplings[k]`` belongs to
    ``graph.edges[k]``.  ``active`` optionally lists the sites that take
    part in the problem.  Sites outside it must carry no field and no
    coupler; they stay in the index space but are pinned to spin up by the
    enumerators and are not counted as qubits of the problem.
    """

    graph: ProblemGraph
    h: tuple[float, ...]
    couplings: tuple[float, ...]
    alpha: float = 1.0
    active: tuple[int, ...] | None = None

    def __post_init__(self):
        h = tuple(float(v) for v in self.h)
        couplings = tuple(float(v) for v in self.couplings)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "alpha", float(self.alpha))
        if len(h) != self.graph.n:
            raise ValueError(f"expected {self.graph.n} fields, got {len(h)}")
        if len(couplings) != len(self.graph.edges):
            raise ValueError(f"expected {len(self.graph.edges)} couplings, got {len(couplings)}")
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be positive and finite, got {self.alpha}")
        if not all(np.isfinite(h)) or not all(np.isfinite(couplings)):
            raise ValueError("fields and couplings must be finite")
        if self.active is not None:
            active = tuple(sorted(set(int(i) for i in self.active)))
            if not active or active[0] < 0 or active[-1] >= self.graph.n:
                raise ValueError("active sites must be a non-empty subset of range(n)")
            object.__setattr__(self, "active", active)
            inactive = set(range(self.graph.n)) - set(active)
            for i in inactive:
                if h[i] != 0.0:
                    raise ValueError(f"inactive site {i} carries a nonzero field")
            for i, j in self.graph.edges:
                if i in inactive or j in inactive:
                    raise ValueError(f"coupler ({i}, {j}) touches an inactive site")

    @classmethod
    def from_dict(
        cls,
        h: Sequence[float],
        j: Mapping[tuple[int, int], float],
        alpha: float = 1.0,
        active: Iterable[int] | None = None,
    ) -> IsingProblem:
        edges, values = [], []
        for (a, b), v in j.items():
            edges.append((min(a, b), max(a, b)))
            values.append(v)
        graph = ProblemGraph(len(h), tuple(edges))
        return cls(graph, tuple(h), tuple(values), alpha, None if active is None else tuple(active))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def j(self) -> dict[tuple[int, int], float]:
        return dict(zip(self.graph.edges, self.couplings))

    @property
    def active_sites(self) -> tuple[int, ...]:
        return tuple(range(self.n)) if self.active is None else self.active

    @property
    def n_active(self) -> int:
        return len(self.active_sites)

    @property
    def edge_count(self) -> int:
        return len(self.graph.edges)

    @cached_property
    def h_array(self) -> np.ndarray:
        return np.array(self.h, dtype=np.float64)

    @cached_property
    def j_array(self) -> np.ndarray:
        return np.array(self.couplings, dtype=np.float64)

    @cached_property
    def edge_array(self) -> np.ndarray:
        return np.array(self.graph.edges, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def active_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=np.bool_)
        mask[list(self.active_sites)] = True
        return mask

    def with_alpha(self, alpha: float) -> IsingProblem:
        return IsingProblem(self.graph, self.h, self.couplings, alpha, self.active)

    def scaled(self) -> IsingProblem:
        """Same Hamiltonian with alpha folded into h and J (alpha = 1)."""
        a = self.alpha
        return IsingProblem(
            self.graph, tuple(a * v for v in self.h), tuple(a * v for v in self.couplings), 1.0, self.active
        )

    def compact(self) -> IsingProblem:
        """Relabel onto the active sites only, preserving site and edge order."""
        if self.active is None:
            return self
        index = {s: k for k, s in enumerate(self.active)}
        graph = ProblemGraph(len(index), tuple((index[i], index[j]) for i, j in self.graph.edges))
        return IsingProblem(graph, tuple(self.h[s] for s in self.active), self.couplings, self.alpha)

    def expand_bits(self, compact_bits):
        """Map bit patterns over the active sites onto the full site layout."""
        if self.active is None:
            return compact_bits
        if isinstance(compact_bits, (int, np.integer)):
            out = 0
            for k, s in enumerate(self.active):
                if (int(compact_bits) >> k) & 1:
                    out |= 1 << s
            return out
        compact_bits = np.asarray(compact_bits, dtype=np.int64)
        out = np.zeros_like(compact_bits)
        for k, s in enumerate(self.active):
            out |= ((compact_bits >> k) & 1) << s
        return out

    def compress_bits(self, bits):
        if self.active is None:
            return bits
        if isinstance(bits, (int, np.integer)):
            return sum(((int(bits) >> s) & 1) << k for k, s in enumerate(self.active))
        bits = np.asarray(bits, dtype=np.int64)
        out = np.zeros_like(bits)
        for k, s in enumerate(self.active):
            out |= ((bits >> s) & 1) << k
        return out

    def spectral_bound(self) -> float:
        """Upper bound alpha * (sum|h| + sum|J|) on |E| over all configurations."""
        return self.alpha * (float(np.sum(np.abs(self.h_array))) + float(np.sum(np.abs(self.j_array))))

    def in_hardware_range(self, warn: bool = True) -> bool:
        ah = self.alpha * self.h_array
        aj = self.alpha * self.j_array
        ok = bool(
            np.all((ah >= FIELD_RANGE[0]) & (ah <= FIELD_RANGE[1]))
            and np.all((aj >= COUPLER_RANGE[0]) & (aj <= COUPLER_RANGE[1]))
        )
        if not ok and warn:
            warnings.warn("scaled fields or couplers exceed the hardware ranges", stacklevel=2)
        return ok


def energies(problem: IsingProblem, bits) -> np.ndarray:
    """Energies of many configurations given as an integer array of bit words.

    Terms are accumulated in a fixed order (fields by site, then couplers by
    edge) so that the value of one configuration does not depend on which
    batch it is evaluated in.
    """
    bits = np.asarray(bits, dtype=np.int64)
    acc = np.zeros(bits.shape, dtype=np.float64)
    for i, hi in enumerate(problem.h):
        acc += hi * (1 - 2 * ((bits >> i) & 1))
    for (i, j), jij in zip(problem.graph.edges, problem.couplings):
        acc += jij * (1 - 2 * (((bits >> i) ^ (bits >> j)) & 1))
    return problem.alpha * acc


def energy(problem: IsingProblem, config: SpinConfiguration) -> float:
    if config.n != problem.n:
        raise ValueError(f"configuration has {config.n} qubits, problem has {problem.n}")
    return float(energies(problem, np.array([config.bits]))[0])


def _check_enumerable(problem: IsingProblem, limit: int = MAX_ENUMERATED):
    if problem.n_active > limit:
        raise CapabilityError(f"{problem.n_active} active qubits exceed the enumeration limit {limit}")


def all_energies(problem: IsingProblem) -> np.ndarray:
    """Energies of every configuration of the active sites, indexed by compact bits."""
    _check_enumerable(problem)
    compact = problem.compact()
    size = 1 << compact.n
    out = np.empty(size, dtype=np.float64)
    for start in range(0, size, _BLOCK):
        stop = min(size, start + _BLOCK)
        out[start:stop] = energies(compact, np.arange(start, stop, dtype=np.int64))
    return out


@dataclass(frozen=True)
class Level:
    energy: float
    degeneracy: int
    representatives: tuple[SpinConfiguration, ...] = field(repr=False)


@dataclass(frozen=True)
class Spectrum:
    """Distinct energy levels in ascending order.

    Degeneracies count configurations of the active sites, so they sum to
    ``2 ** n_enumerated``; representatives are full ``n``-site configurations.
    """

    levels: tuple[Level, ...]
    n: int
    n_enumerated: int
    alpha: float
    merge_tol: float = DEFAULT_MERGE_TOL

    @cached_property
    def energies(self) -> np.ndarray:
        return np.array([lv.energy for lv in self.levels])

    @cached_property
    def degeneracies(self) -> np.ndarray:
        return np.array([lv.degeneracy for lv in self.levels], dtype=np.int64)

    @property
    def ground_energy(self) -> float:
        return self.levels[0].energy

    def __len__(self):
        return len(self.levels)

    def find_level(self, value: float, tol: float | None = None) -> int | None:
        """Index of the level within ``tol`` of ``value``, or None."""
        tol = self.merge_tol if tol is None else tol
        energies_ = self.energies
        k = bisect.bisect_left(energies_.tolist(), value - tol)
        best = None
        while k < len(energies_) and energies_[k] <= value + tol:
            if best is None or abs(energies_[k] - value) < abs(energies_[best] - value):
                best = k
            k += 1
        return best


def enumerate_spectrum(
    problem: IsingProblem,
    merge_tol: float = DEFAULT_MERGE_TOL,
    max_representatives: int = DEFAULT_MAX_REPRESENTATIVES,
) -> Spectrum:
    """Exact spectrum by evaluating all ``2 ** n_active`` configurations.

    Sorted energies closer than ``merge_tol`` to their predecessor join the
    same level; a level's energy is its lowest member.
    """
    e = all_energies(problem)
    order = np.argsort(e, kind="stable")
    es = e[order]
    starts = np.concatenate(([0], np.flatnonzero(np.diff(es) > merge_tol) + 1))
    stops = np.append(starts[1:], len(es))
    levels = []
    for a, b in zip(starts.tolist(), stops.tolist()):
        members = order[a:b]
        if b - a > 1:
            members = np.sort(members)
        reps = problem.expand_bits(members[:max_representatives])
        levels.append(
            Level(float(es[a]), b - a, tuple(SpinConfiguration(int(x), problem.n) for x in np.atleast_1d(reps)))
        )
    return Spectrum(tuple(levels), problem.n, problem.n_active, problem.alpha, merge_tol)


def low_energy_gap(spectrum: Spectrum) -> float:
    if len(spectrum.levels) < 2:
        raise DegenerateSpectrumError("spectrum has a single level, no gap")
    return spectrum.levels[1].energy - spectrum.levels[0].energy


REFERENCE_FIELDS = (-0.25, -0.1, -0.25, 0.0, -0.1, 0.25, 0.0, 0.0, -0.25, -0.1, -0.25, 0.0, 0.0, 0.25)
REFERENCE_COUPLERS = {
    (0, 4): -0.1,
    (1, 4): -0.1,
    (2, 4): -0.1,
    (0, 5): 0.2,
    (1, 5): -0.25,
    (2, 5): 0.2,
    (4, 12): -0.1,
    (8, 12): 0.2,
    (9, 12): -0.1,
    (10, 12): -0.25,
    (5, 13): 0.1,
    (8, 13): 0.1,
    (9, 13): -0.25,
    (10, 13): 0.2,
}
REFERENCE_ACTIVE = (0, 1, 2, 4, 5, 8, 9, 10, 12, 13)


def reference_problem(alpha: float = 1.0) -> IsingProblem:
    """The 14-slot, 10-qubit test Hamiltonian with a non-degenerate ground
    level and a threefold degenerate first excited level.

    Sites 3, 6, 7 and 11 are unused.
    """
    return IsingProblem.from_dict(REFERENCE_FIELDS, REFERENCE_COUPLERS, alpha, REFERENCE_ACTIVE)
