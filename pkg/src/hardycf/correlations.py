"""Perfect-correlation chain, its quantum clash, and hidden-value enumeration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .hardy import (
    DomainError,
    HALF_PI,
    L_SETTINGS,
    R_SETTINGS,
    SettingLabel,
    check_theta,
    hardy_state,
    setting_observable,
)
from .qcore import (
    EPS_COND,
    Event,
    Outcome,
    Side,
    StateVector,
    conditional_probability,
    joint_distribution,
    joint_probability,
)

PLUS, MINUS = Outcome.PLUS, Outcome.MINUS

Pair = tuple  # (SettingLabel, Outcome)

CHAIN = (
    ((SettingLabel.L1, PLUS), (SettingLabel.R2, PLUS)),
    ((SettingLabel.R2, PLUS), (SettingLabel.L2, PLUS)),
    ((SettingLabel.L2, PLUS), (SettingLabel.R1, PLUS)),
)
CHAIN_CONCLUSION = ((SettingLabel.L1, PLUS), (SettingLabel.R1, PLUS))
HARDY_EVENT = ((SettingLabel.L1, PLUS), (SettingLabel.R1, MINUS))

SETTING_ORDER = (SettingLabel.L1, SettingLabel.L2, SettingLabel.R1, SettingLabel.R2)


def event(pair: Pair, theta: float) -> Event:
    setting, outcome = pair
    side, obs = setting_observable(setting, theta)
    return Event(side, obs, outcome)


def pair_conditional(state: StateVector, theta: float, cond: Pair, target: Pair) -> float:
    """``P(target | cond)`` with both events named by setting labels."""
    return conditional_probability(state, event(cond, theta), event(target, theta))


@dataclass(frozen=True)
class ChainLink:
    condition: Pair
    target: Pair
    probability: float

    def __post_init__(self) -> None:
        if self.condition[0].side is self.target[0].side:
            raise ValueError("a chain link must cross sides")


@dataclass(frozen=True)
class ChainReport:
    theta: float
    links: tuple[ChainLink, ...]
    chain_conclusion: Pair
    quantum_conditional: float

    @property
    def discrepancy(self) -> float:
        return 1.0 - self.quantum_conditional

    def links_perfect(self, eps: float = 1e-9) -> bool:
        return all(abs(link.probability - 1.0) <= eps for link in self.links)


def chain_report(theta: float) -> ChainReport:
    t = check_theta(theta)
    state = hardy_state(t)
    links = tuple(
        ChainLink(cond, tgt, pair_conditional(state, t, cond, tgt)) for cond, tgt in CHAIN
    )
    q = pair_conditional(state, t, *CHAIN_CONCLUSION)
    return ChainReport(t, links, CHAIN_CONCLUSION[1], q)


@dataclass(frozen=True)
class HiddenAssignment:
    """A total map from the four settings to outcomes."""

    values: tuple[tuple[SettingLabel, Outcome], ...]

    def __post_init__(self) -> None:
        if tuple(s for s, _ in self.values) != SETTING_ORDER:
            raise ValueError("assignment must cover L1, L2, R1, R2 in order")

    @classmethod
    def of(cls, mapping: dict) -> HiddenAssignment:
        return cls(tuple((s, mapping[s]) for s in SETTING_ORDER))

    def __getitem__(self, setting: SettingLabel) -> Outcome:
        return dict(self.values)[setting]

    def as_dict(self) -> dict:
        return {s.value: o.value for s, o in self.values}


def _enum_domain(theta: float) -> float:
    t = check_theta(theta)
    if not 0 < t < HALF_PI:
        raise DomainError(f"theta={theta!r} is outside (0, pi/2)")
    return t


def _support(state: StateVector, theta: float, eps: float) -> dict:
    """Nonzero cells of every (L setting, R setting) table."""
    allowed = {}
    for ls, rs in itertools.product(L_SETTINGS, R_SETTINGS):
        (_, obs_l), (_, obs_r) = setting_observable(ls, theta), setting_observable(rs, theta)
        dist = joint_distribution(state, obs_l, obs_r)
        allowed[ls, rs] = {cell for cell, p in dist.p.items() if p > eps}
    return allowed


def admissible_assignments(theta: float, eps: float = EPS_COND) -> list[HiddenAssignment]:
    """Non-contextual value assignments compatible with the quantum support.

    Built by depth-first search over L1, L2, R1, R2 with ``+`` tried before
    ``-``, pruning as soon as a completed (L, R) pair falls on a zero cell; the
    result is therefore in lexicographic order.
    """
    t = _enum_domain(theta)
    allowed = _support(hardy_state(t), t, eps)
    found: list[HiddenAssignment] = []

    def extend(partial: dict) -> None:
        if len(partial) == len(SETTING_ORDER):
            found.append(HiddenAssignment.of(partial))
            return
        setting = SETTING_ORDER[len(partial)]
        for outcome in (PLUS, MINUS):
            trial = {**partial, setting: outcome}
            if setting.side is Side.R:
                ok = all(
                    (trial[ls], outcome) in allowed[ls, setting] for ls in L_SETTINGS
                )
                if not ok:
                    continue
            extend(trial)

    extend({})
    return found


@dataclass(frozen=True)
class HardyContradictionReport:
    theta: float
    admissible: tuple[HiddenAssignment, ...]
    qm_event_probability: float
    hv_event_possible: bool


def hardy_event_probability(theta: float) -> float:
    """Born probability of ``L1=+`` together with ``R1=-``."""
    t = check_theta(theta)
    (_, obs_l), (_, obs_r) = (
        setting_observable(SettingLabel.L1, t),
        setting_observable(SettingLabel.R1, t),
    )
    return joint_probability(hardy_state(t), obs_l, obs_r, PLUS, MINUS)


def hardy_contradiction(theta: float, eps: float = EPS_COND) -> HardyContradictionReport:
    t = _enum_domain(theta)
    admissible = tuple(admissible_assignments(t, eps))
    (l_set, l_out), (r_set, r_out) = HARDY_EVENT
    possible = any(a[l_set] is l_out and a[r_set] is r_out for a in admissible)
    return HardyContradictionReport(t, admissible, hardy_event_probability(t), possible)
