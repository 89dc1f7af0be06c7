"""Two spin-1/2 particles: pure states, x-z plane spin observables, Born rule.

Basis ordering for a :class:`StateVector` is ``|++>, |+->, |-+>, |-->`` with
the left factor belonging to particle L and the right factor to particle R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple

import numpy as np

NORM_FLOOR = 1e-12
EPS_COND = 1e-9

_SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


class ZeroVector(ValueError):
    """Raised when amplitudes are too small to normalise."""


class UndefinedConditional(ValueError):
    """Raised when conditioning on an event of (numerically) zero probability."""


class Side(Enum):
    L = "L"
    R = "R"

    @property
    def other(self) -> Side:
        return Side.R if self is Side.L else Side.L


class Outcome(Enum):
    PLUS = "+"
    MINUS = "-"

    @property
    def sign(self) -> int:
        return 1 if self is Outcome.PLUS else -1

    @property
    def index(self) -> int:
        return 0 if self is Outcome.PLUS else 1

    def __str__(self) -> str:
        return self.value


OUTCOME_PAIRS = tuple((a, b) for a in Outcome for b in Outcome)


def _as_amplitude(x) -> complex:
    z = complex(x)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"amplitude {x!r} is not finite")
    return z


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # first component with non-negligible modulus is made real and >= 0
    for comp in v:
        if abs(comp) > 1e-15:
            return v * (abs(comp) / comp)
    return v


@dataclass(frozen=True)
class SpinObservable:
    """``cos(phi) sigma_z + sin(phi) sigma_x``; eigenvalues are +1 and -1."""

    phi: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.phi):
            raise ValueError("phi must be finite")

    @classmethod
    def z(cls) -> SpinObservable:
        return cls(0.0)

    @classmethod
    def x(cls) -> SpinObservable:
        return cls(math.pi / 2)

    @property
    def matrix(self) -> np.ndarray:
        return math.cos(self.phi) * _SIGMA_Z + math.sin(self.phi) * _SIGMA_X

    def eigenvector(self, outcome: Outcome) -> np.ndarray:
        half = self.phi / 2
        if outcome is Outcome.PLUS:
            v = np.array([math.cos(half), math.sin(half)], dtype=complex)
        else:
            v = np.array([-math.sin(half), math.cos(half)], dtype=complex)
        return _fix_phase(v)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalised amplitudes over the z-z product basis.

    Build through :func:`make_state`; the array is stored read-only.
    """

    amps: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        a = np.array(self.amps, dtype=complex).reshape(4)
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    def __repr__(self) -> str:
        body = ", ".join(f"{z.real:.6g}{z.imag:+.6g}j" for z in self.amps)
        return f"StateVector({body})"

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def as_matrix(self) -> np.ndarray:
        """Amplitudes as a 2x2 array indexed ``[left, right]``."""
        return self.amps.reshape(2, 2)

    def allclose(self, other: StateVector, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.amps, other.amps, atol=atol, rtol=0))


def make_state(amps: Iterable) -> StateVector:
    """Normalised copy of four amplitudes (order preserved)."""
    a = np.array([_as_amplitude(x) for x in amps], dtype=complex)
    if a.shape != (4,):
        raise ValueError(f"expected 4 amplitudes, got {a.shape[0]}")
    norm = np.linalg.norm(a)
    if norm <= NORM_FLOOR:
        raise ZeroVector(f"amplitude norm {norm:.3g} is below {NORM_FLOOR}")
    return StateVector(a / norm)


def plus_eigenvector(obs: SpinObservable) -> np.ndarray:
    return obs.eigenvector(Outcome.PLUS)


def minus_eigenvector(obs: SpinObservable) -> np.ndarray:
    return obs.eigenvector(Outcome.MINUS)


def joint_probability(
    state: StateVector,
    obs_l: SpinObservable,
    obs_r: SpinObservable,
    o_l: Outcome,
    o_r: Outcome,
) -> float:
    e = np.kron(obs_l.eigenvector(o_l), obs_r.eigenvector(o_r))
    p = abs(np.vdot(e, state.amps)) ** 2
    return min(max(float(p), 0.0), 1.0)


def marginal_probability(
    state: StateVector, side: Side, obs: SpinObservable, outcome: Outcome
) -> float:
    e = obs.eigenvector(outcome)
    m = state.as_matrix()
    # contract the measured factor, the other one is summed over in the norm
    rest = e.conj() @ m if side is Side.L else m @ e.conj()
    return min(float(np.vdot(rest, rest).real), 1.0)


class Event(NamedTuple):
    side: Side
    obs: SpinObservable
    outcome: Outcome


def conditional_probability(state: StateVector, cond: Event, target: Event) -> float:
    """``P(target | cond)`` for events on opposite particles."""
    c_side, c_obs, c_out = cond
    t_side, t_obs, t_out = target
    if c_side is t_side:
        raise ValueError("condition and target must be on opposite sides")
    p_cond = marginal_probability(state, c_side, c_obs, c_out)
    if p_cond <= EPS_COND:
        raise UndefinedConditional(
            f"P({c_side.value}={c_out}) = {p_cond:.3g} is not above {EPS_COND}"
        )
    if c_side is Side.L:
        p_joint = joint_probability(state, c_obs, t_obs, c_out, t_out)
    else:
        p_joint = joint_probability(state, t_obs, c_obs, t_out, c_out)
    return min(p_joint / p_cond, 1.0)


@dataclass(frozen=True)
class JointDistribution:
    p: dict
    settings: tuple[SpinObservable, SpinObservable]

    def __getitem__(self, key: tuple[Outcome, Outcome]) -> float:
        return self.p[key]

    def as_array(self) -> np.ndarray:
        """Cells in the fixed order ``(++, +-, -+, --)``."""
        return np.array([self.p[k] for k in OUTCOME_PAIRS])

    def total(self) -> float:
        return float(sum(self.p.values()))


def joint_distribution(
    state: StateVector, obs_l: SpinObservable, obs_r: SpinObservable
) -> JointDistribution:
    cells = {
        (a, b): joint_probability(state, obs_l, obs_r, a, b) for a, b in OUTCOME_PAIRS
    }
    return JointDistribution(cells, (obs_l, obs_r))


def projector(side: Side, obs: SpinObservable, outcome: Outcome) -> np.ndarray:
    """4x4 projector onto one outcome of one particle."""
    e = obs.eigenvector(outcome)
    local = np.outer(e, e.conj())
    eye = np.eye(2, dtype=complex)
    return np.kron(local, eye) if side is Side.L else np.kron(eye, local)


def post_measurement_state(
    state: StateVector, side: Side, obs: SpinObservable, outcome: Outcome
) -> StateVector:
    p = marginal_probability(state, side, obs, outcome)
    if p <= EPS_COND:
        raise UndefinedConditional(
            f"outcome {side.value}={outcome} has probability {p:.3g}"
        )
    projected = projector(side, obs, outcome) @ state.amps
    return StateVector(projected / np.linalg.norm(projected))
