"""White-noise input states and their entanglement properties.

The noisy input is ``eta * I + epsilon * sigma`` with ``eta = (1 - epsilon)/4``
and ``sigma`` the projector on the ideal initial state. Separability of the
evolved two-qubit state is decided by the PPT test, Bell nonlocality by the
correlation-matrix bound on the CHSH value.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import qcore
from .circuit import (
    ExperimentSetting,
    JointDistribution,
    initial_state,
    interferometer_unitary,
    joint_distribution,
)
from .errors import InvalidArgumentError

BISECTION_TOL = 1e-9
BISECTION_MAX_ITER = 60
PPT_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class WernerState:
    epsilon: float
    eta: float
    sigma: np.ndarray
    rho: np.ndarray


def werner_state(alpha, epsilon):
    if not (0.0 <= epsilon <= 1.0):
        raise InvalidArgumentError(f"epsilon must lie in [0, 1], got {epsilon}")
    sigma = qcore.density(initial_state(alpha))
    eta = 0.25 * (1.0 - epsilon)
    rho = eta * np.eye(4) + epsilon * sigma
    sigma.setflags(write=False)
    rho.setflags(write=False)
    return WernerState(float(epsilon), eta, sigma, rho)


def evolved_state(setting):
    """The noisy state after the interferometer, ``U_I rho U_I^dagger``."""
    w = werner_state(setting.alpha, setting.epsilon)
    return qcore.evolve_density(interferometer_unitary(setting.phi), w.rho)


def noisy_joint_distribution(setting):
    """Closed form ``eta + epsilon * P(S, A)``."""
    pure = joint_distribution(setting).p
    return JointDistribution(setting.eta + setting.epsilon * pure)


def ppt_min_eigenvalue(setting):
    """Smallest eigenvalue of the evolved state's partial transpose over A.

    Non-negative exactly when the state is separable (two qubits).
    """
    return float(qcore.eigenvalues_hermitian(qcore.partial_transpose(evolved_state(setting), "A"))[0])


class SeparabilityThreshold(NamedTuple):
    epsilon: float
    never_entangled: bool


def separability_threshold(alpha, phi):
    """Smallest epsilon at which the evolved state stops being PPT.

    Bisection on [0, 1]. When the state stays PPT up to epsilon = 1 the
    result is ``SeparabilityThreshold(1.0, never_entangled=True)``.
    """

    def entangled(eps):
        return ppt_min_eigenvalue(ExperimentSetting(alpha, phi, eps)) < -PPT_ZERO_TOL

    if not entangled(1.0):
        return SeparabilityThreshold(1.0, True)
    lo, hi = 0.0, 1.0
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= BISECTION_TOL:
            break
        mid = 0.5 * (lo + hi)
        if entangled(mid):
            hi = mid
        else:
            lo = mid
    return SeparabilityThreshold(0.5 * (lo + hi), False)


def correlation_matrix(rho):
    """T_ij = Tr(rho sigma_i ⊗ sigma_j) over the x, y, z Pauli matrices."""
    t = np.empty((3, 3))
    for i, si in enumerate(qcore.PAULIS):
        for j, sj in enumerate(qcore.PAULIS):
            t[i, j] = np.real(np.trace(rho @ np.kron(si, sj)))
    return t


def chsh_max(setting):
    """Largest CHSH value attainable on the evolved state, 2 sqrt(m1 + m2)."""
    t = correlation_matrix(evolved_state(setting))
    m = qcore.real_symmetric_eigenvalues(t.T @ t)
    return 2.0 * math.sqrt(max(m[-1] + m[-2], 0.0))
