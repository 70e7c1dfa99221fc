import math

import numpy as np
import pytest

from qadisorder.disorder import DisorderParams, RealizationSeed, gaussian_draws, perturb, sigma_e
from qadisorder.ising import SpinConfiguration, energy, enumerate_spectrum, reference_problem

R = 100_000


@pytest.fixture(scope="module")
def draws():
    return np.array([gaussian_draws(RealizationSeed(12345, r), 28) for r in range(R)])


def test_params_validation():
    with pytest.raises(ValueError):
        DisorderParams(-0.1, 0.0)
    with pytest.raises(ValueError):
        DisorderParams(0.0, math.nan)
    with pytest.raises(ValueError):
        RealizationSeed(0, -1)


def test_zero_disorder_is_scaled_input(ref4):
    q = perturb(ref4, DisorderParams(0.0, 0.0), RealizationSeed(7, 3))
    assert q.alpha == 1.0
    assert q.h == tuple(4.0 * v for v in ref4.h)
    assert q.couplings == tuple(4.0 * v for v in ref4.couplings)
    assert q.active == ref4.active


def test_deterministic(ref4):
    params = DisorderParams(0.05, 0.035)
    a = perturb(ref4, params, RealizationSeed(99, 17))
    b = perturb(ref4, params, RealizationSeed(99, 17))
    assert a == b
    assert a != perturb(ref4, params, RealizationSeed(99, 18))
    assert a != perturb(ref4, params, RealizationSeed(100, 17))


def test_perturbation_uses_parameter_slots(ref4):
    params = DisorderParams(0.05, 0.035)
    seed = RealizationSeed(5, 11)
    z = gaussian_draws(seed, ref4.n + ref4.edge_count)
    q = perturb(ref4, params, seed)
    for i in range(ref4.n):
        expected = 4.0 * ref4.h[i] + (0.05 * z[i] if ref4.active_mask[i] else 0.0)
        assert q.h[i] == expected
    for k in range(ref4.edge_count):
        assert q.couplings[k] == 4.0 * ref4.couplings[k] + 0.035 * z[ref4.n + k]


def test_disorder_not_scaled_with_alpha():
    seed = RealizationSeed(1, 1)
    params = DisorderParams(0.05, 0.035)
    lo = perturb(reference_problem(0.1), params, seed)
    hi = perturb(reference_problem(4.0), params, seed)
    np.testing.assert_allclose(
        np.array(lo.h) - 0.1 * np.array(reference_problem().h),
        np.array(hi.h) - 4.0 * np.array(reference_problem().h),
        atol=1e-12,
    )


def test_quantize_and_clamp():
    p = reference_problem(4.0)
    q = perturb(p, DisorderParams(0.05, 0.035, quantize=True), RealizationSeed(3, 4))
    for v in q.h + q.couplings:
        assert abs(v * 1000 - round(v * 1000)) < 1e-9
    c = perturb(p, DisorderParams(5.0, 5.0, clamp=True), RealizationSeed(3, 4))
    assert all(-2.0 <= v <= 2.0 for v in c.h)
    assert all(-1.0 <= v <= 1.0 for v in c.couplings)
    assert max(abs(v) for v in c.couplings) == 1.0


def test_field_marginal_matches_gaussian_law():
    # h~_0 = -0.25 + 0.05 X; 3-sigma bands of mean and std for 1e5 draws
    p = reference_problem(1.0)
    params = DisorderParams(0.05, 0.0)
    samples = np.array([perturb(p, params, RealizationSeed(2024, r)).h[0] for r in range(R)])
    assert abs(samples.mean() - (-0.25)) < 0.0005
    assert abs(samples.std(ddof=1) - 0.05) < 0.0005


def test_parameter_streams_uncorrelated(draws):
    corr = np.corrcoef(draws.T)
    off = corr[np.triu_indices(corr.shape[0], 1)]
    assert np.abs(off).max() < 0.01


def test_realization_streams_uncorrelated(draws):
    for p in (0, 13, 27):
        assert abs(np.corrcoef(draws[:-1, p], draws[1:, p])[0, 1]) < 0.01
    assert np.abs(draws.mean(axis=0)).max() < 3 * 3.5 / math.sqrt(R)


def test_sigma_e_examples():
    assert sigma_e(DisorderParams(0.0, 0.0), 10, 14) == 0.0
    assert sigma_e(DisorderParams(0.05, 0.0), 4, 0) == pytest.approx(0.1, abs=1e-15)
    # sqrt(0.05^2 * 10 + 0.035^2 * 14)
    assert sigma_e(DisorderParams(0.05, 0.035), 10, 14) == pytest.approx(0.2053046516764781, abs=1e-12)
    with pytest.raises(ValueError):
        sigma_e(DisorderParams(), -1, 0)


def test_ground_level_shift_variance_bounded(ref4):
    params = DisorderParams(0.05, 0.035)
    g = enumerate_spectrum(ref4).levels[0].representatives[0]
    e0 = energy(ref4, g)
    shifts = np.array([energy(perturb(ref4, params, RealizationSeed(77, r)), g) - e0 for r in range(20_000)])
    var = shifts.var(ddof=1)
    bound = sigma_e(params, ref4.n_active, ref4.edge_count) ** 2
    # every active term enters the ground configuration, so the variance saturates the bound
    assert var <= bound * (1 + 3 * math.sqrt(2 / (len(shifts) - 1)))
    assert var == pytest.approx(bound, rel=0.05)


def test_inactive_sites_untouched(ref4):
    q = perturb(ref4, DisorderParams(0.3, 0.3), RealizationSeed(1, 2))
    assert all(q.h[i] == 0.0 for i in (3, 6, 7, 11))
    assert energy(q, SpinConfiguration(1 << 3, 14)) == energy(q, SpinConfiguration(0, 14))
