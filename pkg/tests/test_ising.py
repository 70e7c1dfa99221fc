import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_problem
from qadisorder.errors import CapabilityError, DegenerateSpectrumError
from qadisorder.ising import (
    IsingProblem,
    ProblemGraph,
    SpinConfiguration,
    all_energies,
    energies,
    energy,
    enumerate_spectrum,
    low_energy_gap,
    reference_problem,
)


def brute_energy(h, j, alpha, spins):
    return alpha * (sum(hi * s for hi, s in zip(h, spins)) + sum(v * spins[a] * spins[b] for (a, b), v in j.items()))


class TestSpinConfiguration:
    def test_bit_convention(self):
        c = SpinConfiguration(0b101, 3)
        assert c.spins().tolist() == [-1, 1, -1]
        assert c.bitstring() == "101"
        assert SpinConfiguration.from_spins([-1, 1, -1]) == c
        assert SpinConfiguration.from_bitstring("101") == c

    @pytest.mark.parametrize("bits,n", [(4, 2), (-1, 3), (0, 0), (0, 31)])
    def test_invalid(self, bits, n):
        with pytest.raises(ValueError):
            SpinConfiguration(bits, n)

    def test_flip(self):
        assert SpinConfiguration(0b01, 2).flipped() == SpinConfiguration(0b10, 2)


class TestProblem:
    def test_graph_validation(self):
        with pytest.raises(ValueError):
            ProblemGraph(3, ((0, 1), (0, 1)))
        with pytest.raises(ValueError):
            ProblemGraph(3, ((1, 0),))
        with pytest.raises(ValueError):
            ProblemGraph(3, ((0, 3),))
        assert len(ProblemGraph(3, ((0, 1), (1, 2)))) == 2

    def test_alpha_must_be_positive(self):
        with pytest.raises(ValueError):
            IsingProblem.from_dict([0.1], {}, alpha=0.0)

    def test_inactive_sites_must_be_empty(self):
        with pytest.raises(ValueError):
            IsingProblem.from_dict([0.1, 0.2], {}, active=[0])
        with pytest.raises(ValueError):
            IsingProblem.from_dict([0.1, 0.0], {(0, 1): 0.3}, active=[0])

    def test_hardware_range_warning(self):
        p = IsingProblem.from_dict([1.5], {}, alpha=2.0)
        with pytest.warns(UserWarning):
            assert not p.in_hardware_range()
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert reference_problem(4.0).in_hardware_range()

    def test_compact_round_trip(self):
        p = reference_problem(1.0)
        c = p.compact()
        assert c.n == 10 and c.active is None
        for bits in (0, 1, 0b1010110011, 1023):
            full = p.expand_bits(bits)
            assert p.compress_bits(full) == bits
            assert energy(c, SpinConfiguration(bits, 10)) == energy(p, SpinConfiguration(full, 14))


class TestEnergy:
    def test_null_hamiltonian(self):
        p = IsingProblem.from_dict([0.0] * 3, {})
        assert all(energy(p, SpinConfiguration(b, 3)) == 0.0 for b in range(8))

    def test_single_coupler_antialigned(self):
        p = IsingProblem.from_dict([0.0, 0.0], {(0, 1): 0.5})
        assert energy(p, SpinConfiguration(0b01, 2)) == -0.5

    def test_reference_all_up(self):
        # direct sum of the 14 field and 14 coupler literals
        assert energy(reference_problem(1.0), SpinConfiguration(0, 14)) == pytest.approx(-1.0499999999999998, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            energy(reference_problem(), SpinConfiguration(0, 3))

    def test_matches_brute_force(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 7))
            p = random_problem(rng, n, alpha=float(rng.uniform(0.1, 4)))
            for bits in range(1 << n):
                spins = [1 - 2 * ((bits >> i) & 1) for i in range(n)]
                assert energy(p, SpinConfiguration(bits, n)) == pytest.approx(
                    brute_energy(p.h, p.j, p.alpha, spins), abs=1e-12
                )


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 8), c=st.floats(0.01, 10))
def test_energy_linear_in_alpha(seed, n, c):
    p = random_problem(np.random.default_rng(seed), n)
    bits = np.arange(1 << n)
    np.testing.assert_allclose(energies(p.with_alpha(c), bits), c * energies(p, bits), rtol=1e-12, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 8))
def test_global_flip_covariance(seed, n):
    p = random_problem(np.random.default_rng(seed), n)
    fields_only = IsingProblem(p.graph, p.h, tuple(0.0 for _ in p.couplings))
    couplers_only = IsingProblem(p.graph, tuple(0.0 for _ in p.h), p.couplings)
    for bits in range(1 << n):
        c = SpinConfiguration(bits, n)
        assert energy(fields_only, c.flipped()) == pytest.approx(-energy(fields_only, c), abs=1e-12)
        assert energy(couplers_only, c.flipped()) == pytest.approx(energy(couplers_only, c), abs=1e-12)


class TestSpectrum:
    def test_single_spin(self):
        s = enumerate_spectrum(IsingProblem.from_dict([1.0], {}))
        assert [(lv.energy, lv.degeneracy) for lv in s.levels] == [(-1.0, 1), (1.0, 1)]
        assert low_energy_gap(s) == 2.0

    def test_two_spin_coupler(self):
        s = enumerate_spectrum(IsingProblem.from_dict([0.0, 0.0], {(0, 1): 1.0}))
        assert [(lv.energy, lv.degeneracy) for lv in s.levels] == [(-1.0, 2), (1.0, 2)]

    def test_reference_alpha4(self, ref4):
        s = enumerate_spectrum(ref4)
        assert s.levels[0].energy == pytest.approx(-10.6, abs=1e-9)
        assert s.levels[0].degeneracy == 1
        assert s.levels[1].energy == pytest.approx(-10.2, abs=1e-9)
        assert s.levels[1].degeneracy == 3
        assert s.degeneracies.sum() == 2**10
        assert low_energy_gap(s) == pytest.approx(0.4, abs=1e-9)

    def test_gap_scales_with_alpha(self, ref01):
        assert low_energy_gap(enumerate_spectrum(ref01)) == pytest.approx(0.01, abs=1e-12)

    def test_degenerate_spectrum(self):
        with pytest.raises(DegenerateSpectrumError):
            low_energy_gap(enumerate_spectrum(IsingProblem.from_dict([0.0, 0.0], {})))

    def test_capability_guard(self):
        with pytest.raises(CapabilityError):
            enumerate_spectrum(IsingProblem.from_dict([0.1] * 27, {}))

    def test_representatives_capped_and_exact(self):
        p = IsingProblem.from_dict([0.0] * 6, {})
        s = enumerate_spectrum(p, max_representatives=4)
        assert s.levels[0].degeneracy == 64
        assert [c.bits for c in s.levels[0].representatives] == [0, 1, 2, 3]

    def test_find_level(self, ref4):
        s = enumerate_spectrum(ref4)
        assert s.find_level(-10.2 + 1e-12) == 1
        assert s.find_level(-10.4) is None

    def test_all_energies_indexing(self, ref4):
        e = all_energies(ref4)
        c = ref4.compact()
        for bits in (0, 17, 1023):
            assert e[bits] == energy(c, SpinConfiguration(bits, 10))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 12), alpha=st.floats(0.05, 5))
def test_spectrum_invariants(seed, n, alpha):
    p = random_problem(np.random.default_rng(seed), n, alpha=alpha)
    s = enumerate_spectrum(p)
    assert s.degeneracies.sum() == 2**n
    assert np.all(np.diff(s.energies) > s.merge_tol)
    bound = p.spectral_bound()
    assert np.max(np.abs(s.energies)) <= bound + 1e-12
    for lv in s.levels[:5] + s.levels[-5:]:
        for rep in lv.representatives:
            assert abs(energy(p, rep) - lv.energy) <= s.merge_tol


def test_degeneracies_match_counting():
    # quantized couplings create genuine degeneracies
    p = IsingProblem.from_dict([0.5, 0.5, 0.5], {(0, 1): 0.5, (1, 2): 0.5})
    s = enumerate_spectrum(p)
    counts = {}
    for spins in itertools.product([1, -1], repeat=3):
        e = round(brute_energy(p.h, p.j, 1.0, spins), 9)
        counts[e] = counts.get(e, 0) + 1
    assert [(round(lv.energy, 9), lv.degeneracy) for lv in s.levels] == sorted(counts.items())
