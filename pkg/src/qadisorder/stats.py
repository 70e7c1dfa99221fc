"""Divergences between discrete distributions and Boltzmann fits over a spectrum.

Divergences use log base 2, so the Jensen-Shannon divergence lies in [0, 1].
Inverse temperatures are in units of 1/B(1) with k_B = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ensemble import LevelDistribution, LevelEntry
from .errors import AlignmentError, ConsistencyError, UnfittableError
from .ising import Spectrum

PROB_TOL = 1e-12
BETA_TOL = 1e-10
_MAX_BETA = 1e12


@dataclass(frozen=True)
class AlignedDistributionPair:
    support: tuple
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        q = np.asarray(self.q, dtype=np.float64)
        if p.shape != q.shape or p.ndim != 1 or len(p) != len(self.support):
            raise ValueError("p, q and support must be 1-d and of equal length")
        for name, v in (("p", p), ("q", q)):
            if np.any(v < 0) or not np.all(np.isfinite(v)):
                raise ValueError(f"{name} has negative or non-finite entries")
            if abs(v.sum() - 1.0) > PROB_TOL:
                raise ValueError(f"{name} sums to {v.sum()!r}, not 1")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "support", tuple(self.support))

    @classmethod
    def from_arrays(cls, p: Sequence[float], q: Sequence[float]) -> AlignedDistributionPair:
        return cls(tuple(range(len(p))), np.asarray(p, dtype=np.float64), np.asarray(q, dtype=np.float64))

    def swapped(self) -> AlignedDistributionPair:
        return AlignedDistributionPair(self.support, self.q, self.p)


def kld(pair: AlignedDistributionPair) -> float:
    """D(P||Q) in bits; ``math.inf`` when P puts mass where Q has none.

    Summed as q*(r ln r - r + 1) with r = p/q, which adds sum(q - p) = 0 but
    makes every term non-negative, so rounding cannot drive the total below 0.
    """
    p, q = pair.p, pair.q
    if np.any((p > 0) & (q == 0)):
        return math.inf
    mask = (q > 0) & (p > 0)
    x = p[mask] / q[mask] - 1.0
    terms = q[mask] * ((1.0 + x) * np.log1p(x) - x)
    # a level with p = 0 contributes exactly q to the shifted sum
    terms = np.append(terms, q[(q > 0) & (p == 0)])
    return float(np.sum(np.maximum(terms, 0.0)) / math.log(2.0))


def _jsd_kernel(d: np.ndarray) -> np.ndarray:
    """(1+d) ln(1+d) + (1-d) ln(1-d) for |d| <= 1, accurate near d = 0."""
    out = np.empty_like(d)
    small = np.abs(d) < 1e-3
    d2 = d[small] ** 2
    # series sum_k d^(2k) / (k (2k - 1)), truncated after d^8
    out[small] = d2 * (1.0 + d2 * (1.0 / 6.0 + d2 * (1.0 / 15.0 + d2 / 28.0)))
    big = d[~small]
    with np.errstate(divide="ignore", invalid="ignore"):
        plus = np.where(big > -1.0, (1.0 + big) * np.log1p(big), 0.0)
        minus = np.where(big < 1.0, (1.0 - big) * np.log1p(-big), 0.0)
    out[~small] = plus + minus
    return out


def jsd(pair: AlignedDistributionPair) -> float:
    """Jensen-Shannon divergence in bits.

    Writing p = m(1+d), q = m(1-d) with m the midpoint gives a sum of
    non-negative per-level terms.  Inputs that agree to within ``PROB_TOL``
    everywhere are treated as identical.
    """
    p, q = pair.p, pair.q
    if np.max(np.abs(p - q), initial=0.0) < PROB_TOL:
        return 0.0
    m = 0.5 * (p + q)
    mask = m > 0
    d = (p[mask] - q[mask]) / (p[mask] + q[mask])
    value = float(np.sum(m[mask] * _jsd_kernel(d))) / (2.0 * math.log(2.0))
    # rounding can push the sum a hair above 1 for disjoint supports
    return min(1.0, value)


def align(a: LevelDistribution, b: LevelDistribution, tol: float = 1e-9) -> AlignedDistributionPair:
    """Union of the level supports of ``a`` and ``b``, matched within ``tol``."""
    for name, dist in (("first", a), ("second", b)):
        e = dist.energies
        if len(e) > 1 and np.any(np.diff(e) <= tol):
            raise AlignmentError(f"{name} distribution has levels closer than {tol}")
    support: list[float] = []
    p: list[float] = []
    q: list[float] = []
    ia = ib = 0
    ea, eb = a.entries, b.entries
    while ia < len(ea) or ib < len(eb):
        if ib >= len(eb) or (ia < len(ea) and ea[ia].energy < eb[ib].energy - tol):
            support.append(ea[ia].energy)
            p.append(ea[ia].probability)
            q.append(0.0)
            ia += 1
        elif ia >= len(ea) or eb[ib].energy < ea[ia].energy - tol:
            support.append(eb[ib].energy)
            p.append(0.0)
            q.append(eb[ib].probability)
            ib += 1
        else:
            support.append(ea[ia].energy)
            p.append(ea[ia].probability)
            q.append(eb[ib].probability)
            ia += 1
            ib += 1
    return AlignedDistributionPair(tuple(support), np.array(p), np.array(q))


def _weights(energies: np.ndarray, degeneracies: np.ndarray, beta: float) -> np.ndarray:
    # shift by the energy that maximizes the exponent so the largest weight is the degeneracy
    ref = energies.min() if beta >= 0 else energies.max()
    return degeneracies * np.exp(-beta * (energies - ref))


def boltzmann_probabilities(spectrum: Spectrum, beta: float) -> np.ndarray:
    w = _weights(spectrum.energies, spectrum.degeneracies.astype(np.float64), beta)
    return w / w.sum()


def boltzmann_distribution(spectrum: Spectrum, beta: float) -> LevelDistribution:
    """Degeneracy-weighted Boltzmann probability of every level."""
    if not math.isfinite(beta):
        raise ValueError("beta must be finite")
    probs = boltzmann_probabilities(spectrum, beta)
    probs = probs / probs.sum()
    entries = tuple(
        LevelEntry(lv.energy, lv.degeneracy, float(pk)) for lv, pk in zip(spectrum.levels, probs)
    )
    return LevelDistribution(entries, None)


def model_mean_energy(spectrum: Spectrum, beta: float) -> float:
    return float(np.dot(boltzmann_probabilities(spectrum, beta), spectrum.energies))


@dataclass(frozen=True)
class BoltzmannFit:
    beta: float
    mean_energy_residual: float
    log_likelihood: float
    support_size: int
    method: str = "ml"

    def as_record(self) -> dict:
        return {
            "beta": self.beta,
            "log_likelihood": self.log_likelihood,
            "mean_energy_residual": self.mean_energy_residual,
            "method": self.method,
            "support_size": self.support_size,
        }


def _level_indices(empirical: LevelDistribution, spectrum: Spectrum, tol: float) -> np.ndarray:
    idx = []
    for e in empirical.entries:
        k = spectrum.find_level(e.energy, tol)
        if k is None:
            raise ConsistencyError(f"level {e.energy!r} is not in the spectrum")
        idx.append(k)
    return np.array(idx, dtype=np.int64)


def _log_likelihood(empirical: LevelDistribution, idx: np.ndarray, spectrum: Spectrum, beta: float) -> float:
    logq = np.log(boltzmann_probabilities(spectrum, beta)[idx])
    weights = np.array(
        [e.count if e.count is not None else e.probability for e in empirical.entries], dtype=np.float64
    )
    mask = weights > 0
    return float(np.sum(weights[mask] * logq[mask]))


def fit_beta(empirical: LevelDistribution, spectrum: Spectrum, tol: float = 1e-9) -> BoltzmannFit:
    """Maximum-likelihood inverse temperature.

    The likelihood is stationary where the model mean energy equals the
    empirical one; the model mean falls strictly with beta, so the root is
    bracketed by geometric expansion and then bisected to ``BETA_TOL``.
    """
    idx = _level_indices(empirical, spectrum, tol)
    energies = spectrum.energies
    target = float(np.dot(empirical.probabilities, energies[idx]))
    lo_e, hi_e = float(energies[0]), float(energies[-1])
    margin = 1e-12 * max(1.0, hi_e - lo_e)
    if len(energies) < 2 or target <= lo_e + margin or target >= hi_e - margin:
        raise UnfittableError(
            f"empirical mean energy {target!r} is not inside the spectral range [{lo_e!r}, {hi_e!r}]"
        )

    def excess(beta: float) -> float:
        return model_mean_energy(spectrum, beta) - target

    step = 1.0 / (hi_e - lo_e)
    lo, hi = -step, step
    while excess(lo) <= 0:
        lo *= 2.0
        if -lo > _MAX_BETA:
            raise UnfittableError("could not bracket beta from below")
    while excess(hi) >= 0:
        hi *= 2.0
        if hi > _MAX_BETA:
            raise UnfittableError("could not bracket beta from above")
    while hi - lo > BETA_TOL:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    beta = 0.5 * (lo + hi)
    return BoltzmannFit(
        beta=beta,
        mean_energy_residual=excess(beta),
        log_likelihood=_log_likelihood(empirical, idx, spectrum, beta),
        support_size=len(empirical.entries),
    )


def fit_beta_lsq(empirical: LevelDistribution, spectrum: Spectrum, tol: float = 1e-9) -> BoltzmannFit:
    """Alternative fit: weighted least squares of log(p_k / g_k) against E_k.

    Weights are sample counts (or probabilities); only populated levels
    enter.  Kept as a diagnostic next to ``fit_beta``.
    """
    idx = _level_indices(empirical, spectrum, tol)
    probs = empirical.probabilities
    mask = probs > 0
    if mask.sum() < 2:
        raise UnfittableError("need at least two populated levels for a least-squares fit")
    x = spectrum.energies[idx][mask]
    y = np.log(probs[mask] / spectrum.degeneracies[idx][mask])
    w = np.array(
        [e.count if e.count is not None else e.probability for e in empirical.entries], dtype=np.float64
    )[mask]
    slope, _ = np.polyfit(x, y, 1, w=np.sqrt(w))
    beta = -float(slope)
    target = float(np.dot(probs, spectrum.energies[idx]))
    return BoltzmannFit(
        beta=beta,
        mean_energy_residual=model_mean_energy(spectrum, beta) - target,
        log_likelihood=_log_likelihood(empirical, idx, spectrum, beta),
        support_size=len(empirical.entries),
        method="lsq",
    )


def sample_levels(
    distribution: LevelDistribution, samples: int, rng: np.random.Generator
) -> LevelDistribution:
    """Multinomial resample of a level distribution; empty levels are dropped."""
    counts = rng.multinomial(samples, distribution.probabilities)
    entries = tuple(
        LevelEntry(e.energy, e.degeneracy, int(c) / samples, int(c))
        for e, c in zip(distribution.entries, counts)
        if c
    )
    return LevelDistribution(entries, samples)
