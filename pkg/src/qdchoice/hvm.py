"""Hidden-variable (wave/particle) model of the delayed-choice statistics.

A source-determined hidden variable lambda in {p, w} fixes whether a quantum
behaves as a particle or a wave. Five probabilities parametrise the model:

    a = P(lambda = p)
    b = P(A = 0 | lambda = p)        c = P(A = 0 | lambda = w)
    d = P(S = 0 | A = 0, lambda = w)  e = P(S = 0 | A = 1, lambda = p)

while the remaining conditionals are pinned by the observed statistics:
P(S | A = 0, lambda = p) = [1/2, 1/2] and P(S | A = 1, lambda = w) =
[beta, 1 - beta]. Reproducing the noisy joint distribution is then
equivalent to three polynomial equations (:func:`constraint_triple`).

Two independent routes show that no physically consistent assignment exists
for epsilon > 0: :func:`enumerate_branches` / :func:`classify` list every
exact solution and attach the reason it is unphysical, and
:func:`feasibility_scan` searches for a single parameter vector serving
several (alpha, phi) settings at once.
"""
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .circuit import ExperimentSetting, JointDistribution
from .errors import DegenerateSettingError, InvalidArgumentError, NotASolutionError
from .noise import noisy_joint_distribution

DEGENERATE_TOL = 1e-12
CLASSIFY_TOL = 1e-6
RESIDUAL_TOL = 1e-9
PARAM_NAMES = ("a", "b", "c", "d", "e")


class Label(str, enum.Enum):
    TRIVIAL_DEGENERATE = "TRIVIAL_DEGENERATE"
    WAVE_ACTS_AS_PARTICLE = "WAVE_ACTS_AS_PARTICLE"
    PARTICLE_ACTS_AS_WAVE = "PARTICLE_ACTS_AS_WAVE"
    PERFECT_CORRELATION = "PERFECT_CORRELATION"


_FLAG_LABELS = (
    (_kernels.WAVE_ACTS_AS_PARTICLE, Label.WAVE_ACTS_AS_PARTICLE),
    (_kernels.PARTICLE_ACTS_AS_WAVE, Label.PARTICLE_ACTS_AS_WAVE),
    (_kernels.PERFECT_CORRELATION, Label.PERFECT_CORRELATION),
    (_kernels.TRIVIAL_DEGENERATE, Label.TRIVIAL_DEGENERATE),
)


def labels_from_flags(flags):
    return frozenset(label for bit, label in _FLAG_LABELS if int(flags) & bit)


@dataclass(frozen=True)
class HvParameters:
    a: float
    b: float
    c: float
    d: float
    e: float

    def __post_init__(self):
        for name in PARAM_NAMES:
            v = float(getattr(self, name))
            if not (0.0 <= v <= 1.0):
                raise InvalidArgumentError(f"{name} must be a probability, got {v}")
            object.__setattr__(self, name, v)

    @classmethod
    def from_array(cls, x):
        return cls(*(float(v) for v in x))

    def as_array(self):
        return np.array([self.a, self.b, self.c, self.d, self.e])

    def as_dict(self):
        return {name: getattr(self, name) for name in PARAM_NAMES}


@dataclass(frozen=True)
class DerivedQuantities:
    eta: float
    p0: float
    p1: float
    _beta: Optional[float] = field(default=None, repr=False)

    @property
    def beta(self):
        if self._beta is None:
            raise DegenerateSettingError("beta is undefined when P(A=1) = 0")
        return self._beta


def derived_quantities(setting):
    """eta, ancilla marginals p0/p1 and beta = P(S=0 | A=1, lambda=w)."""
    eps = setting.epsilon
    eta = setting.eta
    s2 = math.sin(setting.alpha) ** 2
    p0 = 2.0 * eta + eps * math.cos(setting.alpha) ** 2
    p1 = 2.0 * eta + eps * s2
    beta = None
    if p1 > DEGENERATE_TOL:
        beta = (eta + eps * math.cos(0.5 * setting.phi) ** 2 * s2) / (1.0 - p0)
        beta = min(max(beta, 0.0), 1.0)
    return DerivedQuantities(eta, p0, p1, beta)


def _as_params(params):
    if isinstance(params, HvParameters):
        return params.as_array()
    x = np.asarray(params, dtype=np.float64)
    if x.shape != (5,):
        raise InvalidArgumentError(f"expected 5 parameters, got shape {x.shape}")
    return x


def model_distribution(params, setting):
    """Joint distribution the hidden-variable model assigns at ``setting``."""
    x = _as_params(params)
    beta = derived_quantities(setting).beta
    return JointDistribution(_kernels.model_many_np(x[None, :], beta)[0])


def residual(params, setting):
    """Max over outcomes of |P_model - P_epsilon|."""
    x = _as_params(params)
    beta = derived_quantities(setting).beta
    target = noisy_joint_distribution(setting).p
    return float(_kernels.residual_many_np(x[None, :], beta, target)[0])


def residual_many(params, setting):
    """Vectorised :func:`residual` over an ``(n, 5)`` array."""
    beta = derived_quantities(setting).beta
    return _kernels.residual_many(params, beta, noisy_joint_distribution(setting).p)


def constraint_triple(params, setting):
    """(c(1-a)(d-1/2), a(1-b)(e-beta), ab + c(1-a) - p0)."""
    a, b, c, d, e = _as_params(params)
    q = derived_quantities(setting)
    return np.array(
        [
            c * (1.0 - a) * (d - 0.5),
            a * (1.0 - b) * (e - q.beta),
            a * b + c * (1.0 - a) - q.p0,
        ]
    )


# --------------------------------------------------------------------------
# Exact solution manifolds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SolutionBranch:
    """One family of exact solutions of the constraint triple.

    ``family`` maps each parameter to a number, the string ``"free"`` or a
    formula in the other parameters. ``realizable`` is False for the
    degenerate branches that solve the two homogeneous equations but would
    force p0 = 0 or p1 = 0; they contain no solution at a valid setting.
    """

    name: str
    constraints: tuple
    family: dict
    labels: frozenset
    realizable: bool = True
    _sampler: Optional[Callable] = field(default=None, repr=False, compare=False)
    _member: Optional[Callable] = field(default=None, repr=False, compare=False)

    def contains(self, params, tol=RESIDUAL_TOL):
        """Boolean mask: which rows of ``params`` satisfy the branch relations."""
        x = np.atleast_2d(np.asarray(params, dtype=np.float64))
        if self._member is None:
            return np.zeros(x.shape[0], dtype=bool)
        return self._member(*(x[:, k] for k in range(5)), tol)

    def sample(self, n, rng):
        """Draw ``n`` members as an ``(n, 5)`` array."""
        if not self.realizable:
            raise NotASolutionError(f"branch {self.name} has no members at this setting")
        return self._sampler(n, rng)

    def as_dict(self):
        return {
            "name": self.name,
            "constraints": list(self.constraints),
            "family": {k: v for k, v in self.family.items()},
            "labels": sorted(label.value for label in self.labels),
            "realizable": self.realizable,
        }


def _stack(n, **cols):
    out = np.empty((n, 5))
    for k, name in enumerate(PARAM_NAMES):
        out[:, k] = cols[name]
    return out


def enumerate_branches(setting):
    """Every exact solution family of the model at one setting, labelled.

    The first equation vanishes through c = 0, a = 1 or d = 1/2; the second
    through a = 0, b = 1 or e = beta. Crossing the two choices and solving
    the normalisation equation gives the branches below (overlaps on their
    boundaries are allowed).
    """
    eps, alpha = setting.epsilon, setting.alpha
    if not (eps > 0.0 and 0.0 < alpha < 0.5 * math.pi):
        raise InvalidArgumentError("need epsilon > 0 and 0 < alpha < pi/2")
    q = derived_quantities(setting)
    p0, beta = q.p0, q.beta
    W, P = Label.WAVE_ACTS_AS_PARTICLE, Label.PARTICLE_ACTS_AS_WAVE

    def s_wave_a0(n, rng):
        return _stack(n, a=0.0, b=rng.random(n), c=p0, d=0.5, e=rng.random(n))

    def s_wave_b1(n, rng):
        a = p0 * rng.random(n)
        return _stack(n, a=a, b=1.0, c=(p0 - a) / (1.0 - a), d=0.5, e=rng.random(n))

    def s_perfect(n, rng):
        return _stack(n, a=p0, b=1.0, c=0.0, d=rng.random(n), e=rng.random(n))

    def s_particle_c0(n, rng):
        a = p0 + (1.0 - p0) * (1.0 - rng.random(n))  # (p0, 1]
        return _stack(n, a=a, b=p0 / a, c=0.0, d=rng.random(n), e=beta)

    def s_particle_a1(n, rng):
        return _stack(n, a=1.0, b=p0, c=rng.random(n), d=rng.random(n), e=beta)

    def s_mixed(n, rng):
        rows = []
        while sum(len(r) for r in rows) < n:
            a = rng.random(2 * n)
            b = rng.random(2 * n)
            c = (p0 - a * b) / (1.0 - a)
            ok = (c >= 0.0) & (c <= 1.0)
            rows.append(_stack(int(ok.sum()), a=a[ok], b=b[ok], c=c[ok], d=0.5, e=beta))
        return np.concatenate(rows)[:n]

    def near(u, v, tol):
        return np.abs(u - v) <= tol

    def m_wave_a0(a, b, c, d, e, tol):
        return near(a, 0, tol) & near(c, p0, tol) & near(d, 0.5, tol)

    def m_wave_b1(a, b, c, d, e, tol):
        return near(b, 1, tol) & near(d, 0.5, tol) & near(a + c * (1 - a), p0, tol) & (c > -tol)

    def m_perfect(a, b, c, d, e, tol):
        return near(b, 1, tol) & near(c, 0, tol) & near(a, p0, tol)

    def m_particle_c0(a, b, c, d, e, tol):
        return near(c, 0, tol) & near(a * b, p0, tol) & near(e, beta, tol)

    def m_particle_a1(a, b, c, d, e, tol):
        return near(a, 1, tol) & near(b, p0, tol) & near(e, beta, tol)

    def m_mixed(a, b, c, d, e, tol):
        return near(d, 0.5, tol) & near(e, beta, tol) & near(a * b + c * (1 - a), p0, tol)

    return [
        SolutionBranch(
            "degenerate_a0_c0", ("a = 0", "c = 0"),
            {"a": 0.0, "b": "free", "c": 0.0, "d": "free", "e": "free"},
            frozenset({Label.TRIVIAL_DEGENERATE}), realizable=False,
        ),
        SolutionBranch(
            "degenerate_a1_b1", ("a = 1", "b = 1"),
            {"a": 1.0, "b": 1.0, "c": "free", "d": "free", "e": "free"},
            frozenset({Label.TRIVIAL_DEGENERATE}), realizable=False,
        ),
        SolutionBranch(
            "wave_open_a0", ("a = 0", "c = p0", "d = 1/2"),
            {"a": 0.0, "b": "free", "c": p0, "d": 0.5, "e": "free"},
            frozenset({W}), _sampler=s_wave_a0, _member=m_wave_a0,
        ),
        SolutionBranch(
            "wave_open_b1", ("b = 1", "c > 0", "a + c(1-a) = p0", "d = 1/2"),
            {"a": "free in [0, p0)", "b": 1.0, "c": "(p0 - a)/(1 - a)", "d": 0.5, "e": "free"},
            frozenset({W}), _sampler=s_wave_b1, _member=m_wave_b1,
        ),
        SolutionBranch(
            "perfect_correlation", ("b = 1", "c = 0", "a = p0"),
            {"a": p0, "b": 1.0, "c": 0.0, "d": "free", "e": "free"},
            frozenset({Label.PERFECT_CORRELATION}), _sampler=s_perfect, _member=m_perfect,
        ),
        SolutionBranch(
            "particle_closed_c0", ("c = 0", "ab = p0", "b < 1", "e = beta"),
            {"a": "free in (p0, 1]", "b": "p0/a", "c": 0.0, "d": "free", "e": beta},
            frozenset({P}), _sampler=s_particle_c0, _member=m_particle_c0,
        ),
        SolutionBranch(
            "particle_closed_a1", ("a = 1", "b = p0", "e = beta"),
            {"a": 1.0, "b": p0, "c": "free", "d": "free", "e": beta},
            frozenset({P}), _sampler=s_particle_a1, _member=m_particle_a1,
        ),
        SolutionBranch(
            "wave_and_particle", ("d = 1/2", "e = beta", "ab + c(1-a) = p0"),
            {"a": "free", "b": "free", "c": "(p0 - ab)/(1 - a)", "d": 0.5, "e": beta},
            frozenset({W, P}), _sampler=s_mixed, _member=m_mixed,
        ),
    ]


def classify_many(params, setting, tol=CLASSIFY_TOL):
    """Rejection bit flags (see :mod:`qdchoice._kernels`) for each row.

    Without the entangled component (epsilon below ``tol``) no rejection
    argument has any force: beta no longer depends on phi, p0 no longer
    depends on alpha, and wave and particle statistics are both uniform.
    Every row then gets no flags.
    """
    params = np.asarray(params, dtype=np.float64)
    if setting.epsilon < tol:
        return np.zeros(params.shape[0], dtype=np.int64)
    q = derived_quantities(setting)
    return _kernels.classify_many(params, q.p0, q.beta, tol)


def classify(params, setting, tol=CLASSIFY_TOL):
    """Reasons the solution ``params`` is unphysical; empty if none apply.

    Raises :class:`NotASolutionError` unless ``residual(params) < tol``.
    """
    x = _as_params(params)
    r = residual(x, setting)
    if not r < tol:
        raise NotASolutionError(f"residual {r:.3g} is not below {tol:g}")
    return labels_from_flags(classify_many(x[None, :], setting, tol)[0])


# --------------------------------------------------------------------------
# Cross-setting feasibility search
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    witness: Optional[HvParameters]
    min_max_residual: float
    settings_used: tuple
    grid_density: int
    tol: float

    def as_dict(self):
        return {
            "feasible": self.feasible,
            "witness": None if self.witness is None else self.witness.as_dict(),
            "min_max_residual": self.min_max_residual,
            "settings": [
                {"alpha": s.alpha, "phi": s.phi, "epsilon": s.epsilon} for s in self.settings_used
            ],
            "grid_density": self.grid_density,
            "tol": self.tol,
        }


def _check_settings(settings):
    settings = tuple(settings)
    if not settings:
        raise InvalidArgumentError("no settings given")
    eps = {s.epsilon for s in settings}
    if len(eps) != 1:
        raise InvalidArgumentError(f"settings must share one epsilon, got {sorted(eps)}")
    if eps.pop() > 0.0:
        if len({s.alpha for s in settings}) < 2 or len({s.phi for s in settings}) < 3:
            raise InvalidArgumentError(
                "epsilon > 0 needs at least 2 distinct alpha and 3 distinct phi values"
            )
    for s in settings:
        if derived_quantities(s).p1 <= DEGENERATE_TOL:
            raise InvalidArgumentError(f"degenerate setting {s}")
    return settings


def _deviation_rows(x, betas, targets):
    """Model minus target, flattened over (setting, outcome)."""
    model = _kernels.model_many_np(np.broadcast_to(x, (betas.size, 5)), betas)
    return (model - targets).reshape(-1)


def _line_minimise(x, k, betas, targets):
    """Exact minimiser of the max residual along coordinate ``k`` on [0, 1].

    The model is affine in each single parameter, so along one coordinate
    the objective is max_j |u_j + v_j t|; its minimum sits at an endpoint or
    where two of the signed pieces cross.
    """
    lo = x.copy()
    lo[k] = 0.0
    hi = x.copy()
    hi[k] = 1.0
    u = _deviation_rows(lo, betas, targets)
    v = _deviation_rows(hi, betas, targets) - u
    uu = np.concatenate([u, -u])
    vv = np.concatenate([v, -v])
    with np.errstate(divide="ignore", invalid="ignore"):
        cross = (uu[None, :] - uu[:, None]) / (vv[:, None] - vv[None, :])
    cand = cross[np.isfinite(cross)]
    cand = np.concatenate([[0.0, 1.0, x[k]], cand[(cand >= 0.0) & (cand <= 1.0)]])
    vals = np.abs(u[None, :] + v[None, :] * cand[:, None]).max(axis=1)
    i = int(np.argmin(vals))
    return float(cand[i]), float(vals[i])


def feasibility_scan(settings, grid_density=21, refine_steps=30, tol=RESIDUAL_TOL):
    """Look for one (a, b, c, d, e) reproducing the statistics at every setting.

    The hidden variable is fixed at the source, so the same parameters must
    serve every (alpha, phi) the experimenter may choose later. The max
    residual over settings is minimised by an exhaustive product grid of
    ``grid_density`` points per axis, then ``refine_steps`` sweeps of exact
    coordinate-wise line minimisation from the best grid point.
    """
    settings = _check_settings(settings)
    if grid_density < 2:
        raise InvalidArgumentError("grid_density must be >= 2")
    betas = np.array([derived_quantities(s).beta for s in settings])
    targets = np.array([noisy_joint_distribution(s).p for s in settings])
    grid = np.linspace(0.0, 1.0, grid_density)
    best, idx = _kernels.scan_grid(grid, betas, targets)
    x = grid[idx].astype(np.float64)

    for _ in range(refine_steps):
        if best < tol:
            break
        improved = False
        for k in range(5):
            t, val = _line_minimise(x, k, betas, targets)
            if val < best:
                x[k] = t
                best = val
                improved = True
        if not improved:
            break

    x = np.clip(x, 0.0, 1.0)
    best = float(np.abs(_deviation_rows(x, betas, targets)).max())
    feasible = best < tol
    return FeasibilityVerdict(
        feasible=feasible,
        witness=HvParameters.from_array(x) if feasible else None,
        min_max_residual=best,
        settings_used=settings,
        grid_density=int(grid_density),
        tol=float(tol),
    )
