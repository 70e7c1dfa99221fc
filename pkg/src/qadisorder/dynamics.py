"""Statevector annealing dynamics for small registers.

The state evolves under ``H(s) = A(s) * sum_i sigma_x^(i) + B(s) * E_fin``
with ``s = t / tau``.  ``E_fin`` is the dimensionless (alpha-scaled) Ising
energy, so ``B(s)`` supplies the physical scale in GHz.  With hbar = 1 the
GHz values are multiplied by ``angular_factor`` against time in ns.

A problem with unused sites is evolved on its active sites only; the state
index is then a compact bit pattern (see ``IsingProblem.compact``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .ensemble import OutputDistribution
from .errors import ConvergenceError
from .ising import IsingProblem, all_energies, enumerate_spectrum

MAX_DYNAMIC_QUBITS = 14
DEFAULT_A = (-15.42, 38.33, -32.15, 9.13)
DEFAULT_B = (11.07, 2.19, 0.11)
NOMINAL_TOTAL = 1 << 40
MAX_STEPS = 1 << 22


@dataclass(frozen=True)
class Schedule:
    """Polynomial switching functions in GHz, coefficients highest degree first."""

    a_coeffs: tuple[float, ...] = DEFAULT_A
    b_coeffs: tuple[float, ...] = DEFAULT_B

    def __post_init__(self):
        object.__setattr__(self, "a_coeffs", tuple(float(c) for c in self.a_coeffs))
        object.__setattr__(self, "b_coeffs", tuple(float(c) for c in self.b_coeffs))
        if not self.a_coeffs or not self.b_coeffs:
            raise ValueError("schedule polynomials need at least one coefficient")
        a0, b0 = np.polyval(self.a_coeffs, 0.0), np.polyval(self.b_coeffs, 0.0)
        a1, b1 = np.polyval(self.a_coeffs, 1.0), np.polyval(self.b_coeffs, 1.0)
        if not (a0 > b0 and abs(a1) < b1):
            raise ValueError("schedule must start transverse-dominated and end Ising-dominated")

    @property
    def b_final(self) -> float:
        return float(np.polyval(self.b_coeffs, 1.0))


def eval_schedule(schedule: Schedule, s: float) -> tuple[float, float]:
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s = {s} outside [0, 1]")
    a = 0.0
    for c in schedule.a_coeffs:
        a = a * s + c
    b = 0.0
    for c in schedule.b_coeffs:
        b = b * s + c
    return a, b


@dataclass(frozen=True, eq=False)
class QuantumState:
    amplitudes: np.ndarray = field(repr=False)
    n: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} amplitudes, got shape {amps.shape}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state norm^2 is {norm!r}, not 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, n: int, bits: int) -> QuantumState:
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[bits] = 1.0
        return cls(amps, n)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class AnnealParams:
    """Annealing time and integrator settings.

    ``tau`` is in microseconds.  When ``action_override`` is set it replaces
    the physical duration by the dimensionless product tau * B(1) * angular_factor.
    """

    tau: float = 1.0
    action_override: float | None = None
    step_tol: float = 1e-8
    angular_factor: float = 2.0 * math.pi

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not self.step_tol > 0:
            raise ValueError("step_tol must be positive")
        if self.action_override is not None and not self.action_override > 0:
            raise ValueError("action_override must be positive")

    def action(self, schedule: Schedule) -> float:
        if self.action_override is not None:
            return float(self.action_override)
        return self.tau * 1000.0 * schedule.b_final * self.angular_factor


def initial_state(n: int) -> QuantumState:
    """Ground state |->^n of sum_i sigma_x: amplitude (-1)^popcount(z) / 2^(n/2)."""
    if not 1 <= n <= MAX_DYNAMIC_QUBITS:
        raise ValueError(f"n = {n} outside [1, {MAX_DYNAMIC_QUBITS}]")
    z = np.arange(1 << n)
    parity = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        parity ^= (z >> i) & 1
    return QuantumState((1 - 2 * parity) / 2 ** (n / 2), n)


def _check_dims(problem: IsingProblem, n: int):
    if problem.n_active != n:
        raise ValueError(f"state has {n} qubits, problem has {problem.n_active} active qubits")
    if n > MAX_DYNAMIC_QUBITS:
        raise ValueError(f"{n} qubits exceed the statevector limit {MAX_DYNAMIC_QUBITS}")


def apply_sigma_x_sum(amplitudes: np.ndarray, n: int) -> np.ndarray:
    z = np.arange(len(amplitudes))
    out = np.zeros_like(amplitudes, dtype=np.complex128)
    for i in range(n):
        out += amplitudes[z ^ (1 << i)]
    return out


def apply_hamiltonian(
    problem: IsingProblem,
    schedule: Schedule,
    s: float,
    state: QuantumState,
    angular_factor: float = 2.0 * math.pi,
) -> np.ndarray:
    """Matrix-free H(s)|psi>, returned as an (unnormalized) amplitude array."""
    _check_dims(problem, state.n)
    a, b = eval_schedule(schedule, s)
    psi = state.amplitudes
    diag = b * all_energies(problem)
    return angular_factor * (diag * psi + a * apply_sigma_x_sum(psi, state.n))


@dataclass(frozen=True)
class EvolutionInfo:
    steps: int
    refinement_delta: float
    norm_drift: float
    action: float


def evolve_with_info(problem: IsingProblem, schedule: Schedule, params: AnnealParams):
    """``evolve`` plus the step count, step-halving change and norm drift."""
    n = problem.n_active
    _check_dims(problem, n)
    e_fin = np.ascontiguousarray(all_energies(problem))
    action = params.action(schedule)
    # generator in s: (tau_ns * angular_factor) * H_GHz, and tau_ns * angular_factor = action / B(1)
    scale = action / schedule.b_final
    a_c = np.array(schedule.a_coeffs)
    b_c = np.array(schedule.b_coeffs)
    psi0 = np.array(initial_state(n).amplitudes)

    s_grid = np.linspace(0.0, 1.0, 65)
    a_max = max(abs(np.polyval(a_c, s)) for s in s_grid)
    b_max = max(abs(np.polyval(b_c, s)) for s in s_grid)
    rate = scale * (a_max * n + b_max * float(np.max(np.abs(e_fin))))
    steps = max(16, int(math.ceil(rate / 0.5)))

    coarse, drift = _kernels.rk4_propagate(psi0, e_fin, a_c, b_c, scale, n, steps)
    while True:
        fine_steps = 2 * steps
        if fine_steps > MAX_STEPS:
            raise ConvergenceError(
                f"step refinement did not reach tolerance {params.step_tol} within {MAX_STEPS} steps"
            )
        fine, fine_drift = _kernels.rk4_propagate(psi0, e_fin, a_c, b_c, scale, n, fine_steps)
        delta = 1.0 - abs(np.vdot(coarse, fine))
        if delta < params.step_tol:
            break
        coarse, drift, steps = fine, fine_drift, fine_steps
    info = EvolutionInfo(fine_steps, float(delta), float(max(drift, fine_drift)), action)
    return QuantumState(fine, n), info


def evolve(problem: IsingProblem, schedule: Schedule, params: AnnealParams) -> QuantumState:
    """Propagate |->^n from s = 0 to s = 1 with fixed-step RK4.

    The step count doubles until halving the step changes the final state by
    less than ``step_tol`` (measured as 1 - |<coarse|fine>|); the finer run
    is returned.
    """
    return evolve_with_info(problem, schedule, params)[0]


def measure_distribution(
    state: QuantumState,
    shots: int | None = None,
    seed: int | None = None,
    problem: IsingProblem | None = None,
    nominal_total: int = NOMINAL_TOTAL,
) -> OutputDistribution:
    """Read-out statistics in the computational basis.

    Without ``shots`` the Born probabilities are turned into integer counts
    out of ``nominal_total`` by largest-remainder rounding.  With ``shots``
    they are multinomially sampled.  Passing ``problem`` maps compact bit
    patterns back onto its full site layout (unused sites read as spin up).
    """
    probs = state.probabilities()
    probs = probs / probs.sum()
    if shots is None:
        raw = probs * nominal_total
        counts = np.floor(raw).astype(np.int64)
        remainder = int(nominal_total - counts.sum())
        if remainder > 0:
            order = np.argsort(-(raw - counts), kind="stable")
            counts[order[:remainder]] += 1
    else:
        if shots < 1:
            raise ValueError("shots must be positive")
        counts = np.random.default_rng(seed).multinomial(shots, probs)
    nz = np.flatnonzero(counts)
    bits = nz
    n = state.n
    if problem is not None:
        _check_dims(problem, n)
        bits = problem.expand_bits(nz)
        n = problem.n
    return OutputDistribution.from_bit_counts(n, dict(zip(np.atleast_1d(bits).tolist(), counts[nz].tolist())))


def ground_manifold_mask(problem: IsingProblem, merge_tol: float = 1e-9) -> np.ndarray:
    e = all_energies(problem)
    e0 = enumerate_spectrum(problem, merge_tol, max_representatives=1).ground_energy
    return e <= e0 + merge_tol


def ground_overlap(state: QuantumState, problem: IsingProblem) -> float:
    """Total Born probability on the ideal ground level."""
    _check_dims(problem, state.n)
    return float(np.sum(state.probabilities()[ground_manifold_mask(problem)]))
