"""Static-disorder model of quantum annealer output statistics.

Exact spectra and ground states of small Ising Hamiltonians, Gaussian
disorder ensembles, Boltzmann fits and divergences, and statevector
annealing dynamics.
"""

from .disorder import DisorderParams, RealizationSeed, perturb, sigma_e
from .dynamics import (
    AnnealParams,
    QuantumState,
    Schedule,
    apply_hamiltonian,
    eval_schedule,
    evolve,
    ground_overlap,
    initial_state,
    measure_distribution,
)
from .ensemble import (
    LevelDistribution,
    LevelEntry,
    OutputDistribution,
    collapse_to_levels,
    run_disorder_ensemble,
)
from .ising import (
    IsingProblem,
    ProblemGraph,
    SpinConfiguration,
    Spectrum,
    energy,
    enumerate_spectrum,
    low_energy_gap,
    reference_problem,
)
from .solver import GroundStateResult, ground_state, ground_state_naive
from .stats import (
    AlignedDistributionPair,
    BoltzmannFit,
    align,
    boltzmann_distribution,
    fit_beta,
    fit_beta_lsq,
    jsd,
    kld,
)

__version__ = "0.1.0"
