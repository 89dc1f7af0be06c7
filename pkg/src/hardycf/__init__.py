"""Hardy-state correlations, hidden-value enumeration and a checker for
counterfactual locality derivations."""

from .cfl.checker import Reason, Semantics, Status, Verdict, check_derivation
from .cfl.library import builtin_scripts
from .cfl.syntax import ParseError, StepRefError, format_formula, parse_derivation, parse_formula
from .correlations import chain_report, hardy_contradiction
from .hardy import DomainError, OutcomeLabel, SettingLabel, hardy_state, verify_decompositions
from .mc import frequency_report, sample_joint
from .qcore import Outcome, Side, SpinObservable, StateVector, conditional_probability, joint_probability

__version__ = "0.1.0"

__all__ = [
    "DomainError", "Outcome", "OutcomeLabel", "ParseError", "Reason", "Semantics", "SettingLabel",
    "Side", "SpinObservable", "StateVector", "Status", "StepRefError", "Verdict", "builtin_scripts",
    "chain_report", "check_derivation", "conditional_probability", "format_formula", "frequency_report",
    "hardy_contradiction", "hardy_state", "joint_probability", "parse_derivation", "parse_formula",
    "sample_joint", "verify_decompositions",
]
