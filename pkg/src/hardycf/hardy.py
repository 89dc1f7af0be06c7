"""The theta-parameterised Hardy state and its measurement/outcome labels.

Settings ``L1, L2`` measure sigma_z and sigma_x on the left particle, ``R1, R2``
measure sigma_z and ``sigma_theta = cos(2 theta) sigma_z + sin(2 theta) sigma_x``
on the right. The eight outcome letters ``a``..``h`` each name one
(setting, outcome) pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .qcore import Outcome, Side, SpinObservable, StateVector, make_state

HALF_PI = math.pi / 2


class DomainError(ValueError):
    """theta outside the open interval (-pi/2, pi/2), or not a finite number."""


def check_theta(theta: float) -> float:
    try:
        t = float(theta)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"theta={theta!r} is not a number") from exc
    if not math.isfinite(t) or abs(t) >= HALF_PI:
        raise DomainError(f"theta={theta!r} is outside (-pi/2, pi/2)")
    return t


class SettingLabel(Enum):
    L1 = "L1"
    L2 = "L2"
    R1 = "R1"
    R2 = "R2"

    @property
    def side(self) -> Side:
        return Side.L if self.value[0] == "L" else Side.R

    @property
    def partner(self) -> SettingLabel:
        """The other setting available on the same side."""
        return _PARTNER[self]

    def __str__(self) -> str:
        return self.value


_PARTNER = {
    SettingLabel.L1: SettingLabel.L2,
    SettingLabel.L2: SettingLabel.L1,
    SettingLabel.R1: SettingLabel.R2,
    SettingLabel.R2: SettingLabel.R1,
}

L_SETTINGS = (SettingLabel.L1, SettingLabel.L2)
R_SETTINGS = (SettingLabel.R1, SettingLabel.R2)


class OutcomeLabel(Enum):
    a = (SettingLabel.L1, Outcome.MINUS)
    b = (SettingLabel.L1, Outcome.PLUS)
    c = (SettingLabel.L2, Outcome.PLUS)
    d = (SettingLabel.L2, Outcome.MINUS)
    e = (SettingLabel.R1, Outcome.MINUS)
    f = (SettingLabel.R1, Outcome.PLUS)
    g = (SettingLabel.R2, Outcome.PLUS)
    h = (SettingLabel.R2, Outcome.MINUS)

    @property
    def setting(self) -> SettingLabel:
        return self.value[0]

    @property
    def outcome(self) -> Outcome:
        return self.value[1]

    @property
    def pair(self) -> tuple[SettingLabel, Outcome]:
        return self.value

    @property
    def side(self) -> Side:
        return self.setting.side

    @classmethod
    def from_pair(cls, setting: SettingLabel, outcome: Outcome) -> OutcomeLabel:
        return _BY_PAIR[(setting, outcome)]

    def __str__(self) -> str:
        return self.name


_BY_PAIR = {lab.value: lab for lab in OutcomeLabel}


def normalisation(theta: float) -> float:
    t = check_theta(theta)
    return math.cos(t) / math.sqrt(2 * (1 + math.sin(t) ** 2))


def raw_amplitudes(theta: float) -> np.ndarray:
    """Unnormalised bracket of the Hardy state, before the factor N."""
    t = check_theta(theta)
    c, s = math.cos(t), math.sin(t)
    return np.array([c, s, (1 + s * s) / c, -s], dtype=complex)


def hardy_state(theta: float) -> StateVector:
    return make_state(normalisation(theta) * raw_amplitudes(theta))


def setting_observable(label: SettingLabel, theta: float) -> tuple[Side, SpinObservable]:
    t = check_theta(theta)
    phi = {
        SettingLabel.L1: 0.0,
        SettingLabel.L2: HALF_PI,
        SettingLabel.R1: 0.0,
        SettingLabel.R2: 2 * t,
    }[label]
    return label.side, SpinObservable(phi)


@dataclass(frozen=True)
class DecompositionReport:
    theta: float
    residual_lz_rtheta: float
    residual_rtheta_lx: float
    residual_lx_rz: float

    @property
    def max_residual(self) -> float:
        return max(self.residual_lz_rtheta, self.residual_rtheta_lx, self.residual_lx_rz)


_UP = np.array([1, 0], dtype=complex)
_DOWN = np.array([0, 1], dtype=complex)


def verify_decompositions(theta: float) -> DecompositionReport:
    """Expand the three product-form rewritings into z-z amplitudes and compare.

    Residuals are max-norm differences against :func:`hardy_state`.
    """
    t = check_theta(theta)
    c, s = math.cos(t), math.sin(t)
    n = normalisation(t)
    kron = np.kron
    up, down = _UP, _DOWN
    r_theta_plus = c * up + s * down
    x_plus = up + down

    # left sigma_z plus correlated with right sigma_theta plus
    lz_rtheta = n * (kron(up, r_theta_plus) + kron(down, (1 + s * s) / c * up - s * down))
    # right sigma_theta plus correlated with left sigma_x plus
    rtheta_lx = n * (kron(x_plus, r_theta_plus) + 2 * math.tan(t) * kron(down, s * up - c * down))
    # left sigma_x plus correlated with right sigma_z plus
    lx_rz = n * (kron(x_plus, up / c) + kron(up - down, -s * s / c * up + s * down))

    ref = hardy_state(t).amps

    def res(v: np.ndarray) -> float:
        return float(np.max(np.abs(v - ref)))

    return DecompositionReport(t, res(lz_rtheta), res(rtheta_lx), res(lx_rz))
