import math

import numpy as np
import pytest

from qdchoice import experiment as ex
from qdchoice.circuit import ExperimentSetting, JointDistribution
from qdchoice.errors import DegenerateConditioningError, InsufficientStatisticsError, InvalidArgumentError
from qdchoice.noise import noisy_joint_distribution

PHIS = np.linspace(0.0, math.pi, 5).tolist()


def test_point_mass_sampling():
    rec = ex.sample_shots([1, 0, 0, 0], 1000, 7)
    assert rec.counts == (1000, 0, 0, 0)
    rec = ex.sample_shots([0, 0, 0, 1], 5, 7)
    assert rec.counts == (0, 0, 0, 5)


def test_uniform_within_five_sigma():
    n = 10 ** 6
    rec = ex.sample_shots([0.25] * 4, n, 123)
    sigma = math.sqrt(n * 0.25 * 0.75)
    assert sum(rec.counts) == n
    assert all(abs(c - n / 4) < 5 * sigma for c in rec.counts)


def test_sampling_is_deterministic():
    j = noisy_joint_distribution(ExperimentSetting(0.6, 1.2, 0.7))
    assert ex.sample_shots(j, 5000, 42) == ex.sample_shots(j, 5000, 42)
    assert ex.sample_shots(j, 5000, 42).counts != ex.sample_shots(j, 5000, 43).counts


def test_rng_is_pcg64():
    assert isinstance(ex.make_rng(1).bit_generator, np.random.PCG64)
    with pytest.raises(InvalidArgumentError):
        ex.make_rng(-1)


def test_point_seeds_are_distinct_and_stable():
    seeds = [ex.point_seed(5, i) for i in range(100)]
    assert len(set(seeds)) == 100
    assert seeds == [ex.point_seed(5, i) for i in range(100)]


def test_empirical_distribution_examples():
    rec = ex.ShotRecord((1, 2, 3, 4), 10, 0)
    assert np.allclose(ex.empirical_distribution(rec).p, [0.1, 0.2, 0.3, 0.4], atol=0)
    f, n = ex.conditional_frequencies(rec, 1)
    assert n == 6 and np.allclose(f, [2 / 6, 4 / 6])
    assert list(ex.empirical_distribution(ex.ShotRecord((1, 0, 0, 0), 1, 0)).p) == [1, 0, 0, 0]
    assert list(ex.empirical_distribution(ex.ShotRecord((1, 1, 1, 1), 4, 0)).p) == [0.25] * 4


def test_empirical_converges_like_inverse_sqrt(rng):
    j = noisy_joint_distribution(ExperimentSetting(1.0, 2.0, 0.8))
    for n in (10 ** 2, 10 ** 4, 10 ** 6):
        dev = np.abs(ex.empirical_distribution(ex.sample_shots(j, n, n)).p - j.p).max()
        assert dev < 5 * math.sqrt(0.25 / n)


def test_shot_record_validation():
    with pytest.raises(InvalidArgumentError):
        ex.ShotRecord((1, 2, 3), 6, 0)
    with pytest.raises(InvalidArgumentError):
        ex.ShotRecord((1, 2, 3, 4), 11, 0)
    with pytest.raises(InvalidArgumentError):
        ex.sample_shots([0.25] * 4, 0, 0)


def test_conditional_without_events():
    with pytest.raises(InsufficientStatisticsError):
        ex.conditional_frequencies(ex.ShotRecord((5, 0, 5, 0), 10, 0), 1)


def test_analytic_visibility_examples():
    assert ex.analytic_visibility(math.pi / 2, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert ex.analytic_visibility(math.pi / 2, 0.5) == pytest.approx(2 / 3, abs=1e-15)
    assert ex.analytic_visibility(math.pi / 4, 0.2) == pytest.approx(0.2, abs=1e-15)
    assert ex.analytic_visibility(0.3, 0.0) == 0.0
    for alpha in (0.1, 0.8, 1.5):
        assert ex.analytic_visibility(alpha, 1.0) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(DegenerateConditioningError):
        ex.analytic_visibility(0.0, 1.0)


@pytest.mark.parametrize("alpha,eps", [(math.pi / 2, 1.0), (math.pi / 2, 0.5), (math.pi / 4, 0.2), (0.4, 0.9)])
def test_analytic_visibility_matches_fringe(alpha, eps):
    """Max/min of the exact A = 1 conditional fringe over a fine phase sweep."""
    f = []
    for phi in np.linspace(0, 2 * math.pi, 101):
        p = noisy_joint_distribution(ExperimentSetting(alpha, phi, eps)).as_matrix()
        f.append(p[0, 1] / p[:, 1].sum())
    f = np.array(f)
    fringe = (f.max() - f.min()) / (f.max() + f.min())
    assert ex.analytic_visibility(alpha, eps) == pytest.approx(fringe, abs=1e-12)


def test_estimate_within_three_standard_errors():
    est = ex.estimate_visibility(math.pi / 2, 0.5, PHIS, 10 ** 5, 3)
    assert est.conditioned_on == 1
    assert 0 < est.std_error < 0.01
    assert abs(est.value - 2 / 3) < 3 * est.std_error


def test_estimate_full_contrast_has_zero_spread():
    # the fringe minimum is exactly zero, so every sample agrees and the error vanishes
    est = ex.estimate_visibility(math.pi / 2, 1.0, PHIS, 10 ** 5, 3)
    assert est.value == pytest.approx(1.0, abs=1e-12)
    assert abs(est.value - 1.0) <= 3 * est.std_error + 1e-12


def test_estimate_is_deterministic():
    a = ex.estimate_visibility(0.9, 0.6, PHIS, 2000, 11)
    assert a == ex.estimate_visibility(0.9, 0.6, PHIS, 2000, 11)


def test_estimate_coverage_over_seeds():
    hits = 0
    target = ex.analytic_visibility(math.pi / 4, 0.2)
    for seed in range(100):
        est = ex.estimate_visibility(math.pi / 4, 0.2, PHIS, 10 ** 4, seed)
        hits += abs(est.value - target) < 3 * est.std_error
    assert hits >= 99


def test_particle_branch_shows_no_fringe():
    for alpha, eps in [(math.pi / 4, 1.0), (0.3, 0.5), (1.2, 0.2)]:
        for i, phi in enumerate(PHIS):
            s = ExperimentSetting(alpha, phi, eps)
            rec = ex.sample_shots(noisy_joint_distribution(s), 10 ** 5, i, s)
            f, n = ex.conditional_frequencies(rec, 0)
            assert abs(f[0] - 0.5) < 5 * math.sqrt(0.25 / n)


def test_visibility_monotone_in_noise_weight():
    vals = [ex.analytic_visibility(0.8, e) for e in np.linspace(0, 1, 21)]
    assert np.all(np.diff(vals) > 0)


def test_estimate_argument_errors():
    with pytest.raises(InvalidArgumentError):
        ex.estimate_visibility(1.0, 0.5, PHIS[:4], 1000, 0)
    with pytest.raises(InvalidArgumentError):
        ex.estimate_visibility(1.0, 0.5, [0.1, 0.5, 1.0, 2.0, math.pi], 1000, 0)
    with pytest.raises(InvalidArgumentError):
        ex.estimate_visibility(1.0, 0.5, PHIS, 99, 0)
