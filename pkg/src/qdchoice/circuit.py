"""The quantum delayed-choice interferometer and its pure-state statistics."""
import math
from dataclasses import dataclass

import numpy as np

from . import qcore
from .errors import DegenerateConditioningError, InvalidArgumentError

TWO_PI = 2.0 * math.pi
ALPHA_MAX = 0.5 * math.pi
CONDITIONING_TOL = 1e-12
PSD_TOL = 1e-10

OUTCOMES = ("00", "01", "10", "11")


@dataclass(frozen=True)
class ExperimentSetting:
    """Experimenter's knobs.

    ``alpha`` in [0, pi/2] is the ancilla superposition angle (0 = open,
    pi/2 = closed), ``phi`` the path phase (stored modulo 2 pi) and
    ``epsilon`` in [0, 1] the weight of the pure component in the input.
    """

    alpha: float
    phi: float
    epsilon: float = 1.0

    def __post_init__(self):
        alpha, phi, eps = float(self.alpha), float(self.phi), float(self.epsilon)
        if not (math.isfinite(alpha) and 0.0 <= alpha <= ALPHA_MAX):
            raise InvalidArgumentError(f"alpha must lie in [0, pi/2], got {alpha}")
        if not math.isfinite(phi):
            raise InvalidArgumentError(f"phi must be finite, got {phi}")
        if not (math.isfinite(eps) and 0.0 <= eps <= 1.0):
            raise InvalidArgumentError(f"epsilon must lie in [0, 1], got {eps}")
        phi = math.fmod(phi, TWO_PI)
        if phi < 0.0:
            phi += TWO_PI
        if phi >= TWO_PI:
            phi = 0.0
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "epsilon", eps)

    @property
    def eta(self):
        return 0.25 * (1.0 - self.epsilon)


class JointDistribution:
    """Probabilities over (S, A) outcomes ordered 00, 01, 10, 11."""

    __slots__ = ("p",)

    def __init__(self, p):
        p = np.array(p, dtype=np.float64).reshape(-1)
        if p.shape != (4,):
            raise InvalidArgumentError(f"joint distribution needs 4 entries, got {p.shape}")
        if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-10:
            raise InvalidArgumentError(f"not a probability vector: {p}")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        self.p = p

    def __repr__(self):
        return f"JointDistribution({self.p.tolist()})"

    def __eq__(self, other):
        return isinstance(other, JointDistribution) and np.array_equal(self.p, other.p)

    def __iter__(self):
        return iter(self.p)

    def as_matrix(self):
        """Return the 2x2 table indexed ``[S, A]``."""
        return self.p.reshape(2, 2)

    def ancilla_marginal(self):
        return self.as_matrix().sum(axis=0)

    def system_marginal(self):
        return self.as_matrix().sum(axis=1)


def initial_state(alpha):
    """|0>_S (cos alpha |0>_A + sin alpha |1>_A)."""
    if not (0.0 <= alpha <= ALPHA_MAX):
        raise InvalidArgumentError(f"alpha must lie in [0, pi/2], got {alpha}")
    ancilla = np.array([math.cos(alpha), math.sin(alpha)], dtype=np.complex128)
    return qcore.tensor_product(qcore.KET0, ancilla)


def interferometer_unitary(phi):
    """First beam splitter, then the phase, then the ancilla-controlled BS."""
    eye = qcore.make_gate("identity")
    bs1 = qcore.tensor_product(qcore.make_gate("hadamard"), eye)
    shift = qcore.tensor_product(qcore.make_gate("phase", phi), eye)
    return qcore.make_gate("controlled_hadamard") @ shift @ bs1


def particle_state(phi):
    return np.array([1.0, np.exp(1j * phi)], dtype=np.complex128) / math.sqrt(2.0)


def wave_state(phi):
    return np.exp(0.5j * phi) * np.array(
        [math.cos(0.5 * phi), -1j * math.sin(0.5 * phi)], dtype=np.complex128
    )


def final_state(setting):
    """cos alpha |p>_S |0>_A + sin alpha |w>_S |1>_A in closed form."""
    a = setting.alpha
    return math.cos(a) * qcore.tensor_product(
        particle_state(setting.phi), qcore.KET0
    ) + math.sin(a) * qcore.tensor_product(wave_state(setting.phi), qcore.KET1)


def fidelity(psi, chi):
    """|<psi|chi>|^2; blind to global phase."""
    return float(abs(np.vdot(psi, chi)) ** 2)


def joint_distribution(setting):
    """Pure-state statistics; ``setting.epsilon`` is ignored."""
    c2 = math.cos(setting.alpha) ** 2
    s2 = math.sin(setting.alpha) ** 2
    half_phi = 0.5 * setting.phi
    return JointDistribution(
        [0.5 * c2, s2 * math.cos(half_phi) ** 2, 0.5 * c2, s2 * math.sin(half_phi) ** 2]
    )


def measure_joint(rho):
    """Born-rule probabilities of the computational-basis projectors."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise InvalidArgumentError(f"rho must be 4x4, got {rho.shape}")
    if not qcore.is_hermitian(rho, PSD_TOL):
        raise InvalidArgumentError("rho is not hermitian")
    if abs(np.trace(rho) - 1.0) > PSD_TOL:
        raise InvalidArgumentError("rho does not have unit trace")
    if not qcore.is_psd(rho, PSD_TOL):
        raise InvalidArgumentError("rho is not positive semidefinite")
    p = np.real(np.diag(rho)).copy()
    p[p < 0.0] = 0.0
    return JointDistribution(p)


def conditional_system_distribution(joint, a_outcome):
    """[P(S=0 | A=a), P(S=1 | A=a)]."""
    if a_outcome not in (0, 1):
        raise InvalidArgumentError(f"ancilla outcome must be 0 or 1, got {a_outcome!r}")
    column = joint.as_matrix()[:, a_outcome]
    marginal = column.sum()
    if marginal <= CONDITIONING_TOL:
        raise DegenerateConditioningError(f"P(A={a_outcome}) = {marginal:g}")
    return column / marginal
