"""Finite-shot emulation of the experiment and fringe-visibility estimates.

Sampling uses numpy's PCG64 bit generator (128-bit state). A multinomial
draw is built from sequential binomial splits, so a given (distribution,
shots, seed) triple always yields the same counts.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .circuit import ExperimentSetting, JointDistribution
from .errors import DegenerateConditioningError, InsufficientStatisticsError, InvalidArgumentError
from .noise import noisy_joint_distribution


@dataclass(frozen=True)
class ShotRecord:
    counts: tuple
    shots: int
    seed: int
    setting: Optional[ExperimentSetting] = None

    def __post_init__(self):
        if len(self.counts) != 4 or any(c < 0 for c in self.counts):
            raise InvalidArgumentError(f"bad counts {self.counts}")
        if sum(self.counts) != self.shots:
            raise InvalidArgumentError("counts do not add up to shots")


@dataclass(frozen=True)
class VisibilityEstimate:
    value: float
    std_error: float
    conditioned_on: int = 1


def make_rng(seed):
    if seed < 0:
        raise InvalidArgumentError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.PCG64(int(seed)))


def point_seed(seed, index):
    """Seed for grid point ``index``, derived without reference to run order."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def sample_shots(joint, shots, seed, setting=None):
    """Multinomial sample of ``shots`` (S, A) outcomes from ``joint``."""
    if shots < 1:
        raise InvalidArgumentError(f"shots must be >= 1, got {shots}")
    p = joint.p if isinstance(joint, JointDistribution) else JointDistribution(joint).p
    rng = make_rng(seed)
    counts = []
    remaining = int(shots)
    mass = 1.0
    for pk in p[:-1]:
        q = 0.0 if mass <= 0.0 else min(max(pk / mass, 0.0), 1.0)
        k = int(rng.binomial(remaining, q)) if remaining else 0
        counts.append(k)
        remaining -= k
        mass -= pk
    counts.append(remaining)
    return ShotRecord(tuple(counts), int(shots), int(seed), setting)


def empirical_distribution(record):
    return JointDistribution(np.asarray(record.counts, dtype=np.float64) / record.shots)


def conditional_frequencies(record, a_outcome):
    """Observed [f(S=0 | A=a), f(S=1 | A=a)] and the number of A=a events."""
    table = np.asarray(record.counts).reshape(2, 2)  # [S, A]
    column = table[:, a_outcome]
    n = int(column.sum())
    if n == 0:
        raise InsufficientStatisticsError(f"no events with A = {a_outcome}")
    return column / n, n


def analytic_visibility(alpha, epsilon):
    """Contrast of the A = 1 fringe, eps sin^2(alpha) / (2 eta + eps sin^2(alpha))."""
    eta = 0.25 * (1.0 - epsilon)
    wave = epsilon * math.sin(alpha) ** 2
    p1 = 2.0 * eta + wave
    if p1 <= 1e-12:
        raise DegenerateConditioningError("P(A=1) vanishes")
    return wave / p1


def estimate_visibility(alpha, epsilon, phi_grid, shots_per_point, seed):
    """Visibility of the A = 1 fringe from simulated counts.

    Every phase in ``phi_grid`` is sampled with its own derived seed; the
    estimate uses the fringe extrema at phi = 0 and phi = pi, with a
    delta-method standard error from the two binomial frequencies.
    """
    phis = [float(p) for p in phi_grid]
    if len(phis) < 5:
        raise InvalidArgumentError("phi_grid needs at least 5 points")
    try:
        i_max = next(i for i, p in enumerate(phis) if abs(p) < 1e-12)
        i_min = next(i for i, p in enumerate(phis) if abs(p - math.pi) < 1e-12)
    except StopIteration:
        raise InvalidArgumentError("phi_grid must include 0 and pi") from None
    if shots_per_point < 100:
        raise InvalidArgumentError("shots_per_point must be >= 100")

    freqs = []
    for i, phi in enumerate(phis):
        setting = ExperimentSetting(alpha, phi, epsilon)
        record = sample_shots(
            noisy_joint_distribution(setting), shots_per_point, point_seed(seed, i), setting
        )
        f, n = conditional_frequencies(record, 1)
        freqs.append((f[0], n))

    x, nx = freqs[i_max]
    y, ny = freqs[i_min]
    if x + y <= 0.0:
        raise InsufficientStatisticsError("fringe has no S = 0 events at the extrema")
    value = (x - y) / (x + y)
    dx = 2.0 * y / (x + y) ** 2
    dy = 2.0 * x / (x + y) ** 2
    var = dx * dx * x * (1.0 - x) / nx + dy * dy * y * (1.0 - y) / ny
    return VisibilityEstimate(float(min(max(value, 0.0), 1.0)), math.sqrt(var), 1)
