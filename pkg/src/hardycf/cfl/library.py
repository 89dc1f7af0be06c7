"""Built-in derivations and a seeded generator of random well-formed ones."""

from __future__ import annotations

import math
import random

from ..hardy import L_SETTINGS, R_SETTINGS, OutcomeLabel
from ..qcore import Side
from .checker import certified_links
from .syntax import (
    BoxArrow,
    Derivation,
    Formula,
    Implies,
    OutcomeAtom,
    Rule,
    SettingAtom,
    Step,
    conj,
    parse_derivation,
)

DEFAULT_THETA = math.pi / 3

# L2 holds c only because R2 gave g; swapping R2 for R1 then keeps c anyway.
_STAPP_A = """\
# c at L2 is inferred from the measured g at R2
theta = {theta!r}
step 1: L2 & R2 & g by PREMISE
step 2: L2 & R2 & g & c by QM(1)
step 3: R1 []-> (L2 & c) by LOC1(2)
step 4: R1 []-> (L2 & c & R1 & f) by QM(3)
"""

# c at L2 is measured; f at R1 is inferred from it, then c is dropped and
# the remaining right-side relation is carried over to L1.
_STAPP_B = """\
# c at L2 is measured directly
theta = {theta!r}
step 1: R2 & L2 & c by PREMISE
step 2: R1 []-> (L2 & c) by LOC1(1)
step 3: R1 []-> (L2 & c & R1 & f) by QM(2)
step 4: R1 []-> (L2 & R1 & f) by LOGIC(3)
step 5: L2 => ((R2 & g) => (R1 []-> (R1 & f))) by LOGIC(4)
step 6: L1 => ((R2 & g) => (R1 []-> (R1 & f))) by LOC2(5)
"""

SCRIPT_TEXTS = {"stapp-A": _STAPP_A, "stapp-B": _STAPP_B}


def builtin_text(name: str, theta: float = DEFAULT_THETA) -> str:
    return SCRIPT_TEXTS[name].format(theta=float(theta))


def builtin_scripts(theta: float = DEFAULT_THETA) -> dict[str, Derivation]:
    return {name: parse_derivation(builtin_text(name, theta)) for name in SCRIPT_TEXTS}


# -- random derivations -----------------------------------------------------

_L_OUT = [o for o in OutcomeLabel if o.side is Side.L]
_R_OUT = [o for o in OutcomeLabel if o.side is Side.R]


def _atoms(*labels) -> Formula:
    return conj(*(SettingAtom(x) if x in (*L_SETTINGS, *R_SETTINGS) else OutcomeAtom(x) for x in labels))


def _outcomes_of(setting):
    return [o for o in OutcomeLabel if o.setting is setting]


def random_derivation(rng: random.Random, theta: float | None = None, max_steps: int = 7) -> Derivation:
    """A syntactically well-formed derivation built from plausible rule moves.

    Steps are generated to look like applications of the calculus; some are
    valid under both semantics, some only under realism, some under neither.
    """
    if theta is None:
        theta = rng.choice([math.pi / 6, math.pi / 4, math.pi / 3, 1.2])
    ls, rs = rng.choice(L_SETTINGS), rng.choice(R_SETTINGS)
    measured = rng.choice(["L", "R", "both"])
    premise = [ls, rs]
    if measured in ("L", "both"):
        premise.append(rng.choice(_outcomes_of(ls)))
    if measured in ("R", "both"):
        premise.append(rng.choice(_outcomes_of(rs)))
    links = set(certified_links(theta))
    steps = [Step(1, _atoms(*premise), Rule.PREMISE)]
    facts = {1: list(premise)}  # step -> actual-world atoms, for plain fact steps
    boxed: dict[int, tuple] = {}  # step -> (setting, atoms) for single-world box steps
    impls: dict[int, tuple] = {}  # step -> (left setting, right-only consequent formula)

    for n in range(2, rng.randint(2, max_steps) + 1):
        move = rng.choice(["qm", "qm", "loc1", "weaken", "intro", "loc2", "junk"])
        formula, rule, refs = None, None, ()
        if move == "qm" and (facts or boxed):
            pool = [("f", k) for k in facts] + [("b", k) for k in boxed]
            kind, k = rng.choice(pool)
            atoms = facts[k] if kind == "f" else list(boxed[k][1])
            present = {a for a in atoms if a in (*L_SETTINGS, *R_SETTINGS)}
            if kind == "b":
                present.add(boxed[k][0])
            cands = [o for s in present for o in _outcomes_of(s) if o not in atoms
                     and not any(x in atoms for x in _outcomes_of(s))]
            good = [o for o in cands if any((src.pair, o.pair) in links for src in atoms
                                            if isinstance(src, OutcomeLabel))]
            if good or rng.random() < 0.7:
                cands = good
            if cands:
                new = atoms + [rng.choice(cands)]
                rule, refs = Rule.QM, (k,)
                if kind == "f":
                    formula = _atoms(*new)
                    facts[n] = new
                else:
                    formula = BoxArrow(boxed[k][0], _atoms(*new))
                    boxed[n] = (boxed[k][0], tuple(new))
        elif move == "loc1" and facts:
            k = rng.choice(list(facts))
            atoms = facts[k]
            r_set = next((a for a in atoms if a in R_SETTINGS), None)
            l_keep = [a for a in atoms if a in L_SETTINGS or a in _L_OUT]
            if r_set is not None and any(a in _L_OUT for a in l_keep):
                new_r = r_set.partner
                formula = BoxArrow(new_r, _atoms(*l_keep))
                rule, refs = Rule.LOC1, (k,)
                boxed[n] = (new_r, tuple(l_keep))
        elif move == "weaken" and (facts or boxed):
            pool = [("f", k) for k in facts] + [("b", k) for k in boxed]
            kind, k = rng.choice(pool)
            atoms = facts[k] if kind == "f" else list(boxed[k][1])
            outs = [a for a in atoms if isinstance(a, OutcomeLabel)]
            if outs:
                drop = rng.choice(outs)
                kept = [a for a in atoms if a is not drop]
                if kept:
                    rule, refs = Rule.LOGIC, (k,)
                    if kind == "f":
                        formula, facts[n] = _atoms(*kept), kept
                    else:
                        formula = BoxArrow(boxed[k][0], _atoms(*kept))
                        boxed[n] = (boxed[k][0], tuple(kept))
        elif move == "intro" and boxed:
            k = rng.choice(list(boxed))
            r_set, atoms = boxed[k]
            r_only = [a for a in atoms if a in R_SETTINGS or a in _R_OUT]
            if any(a in _R_OUT for a in r_only):
                l_set = next((a for a in atoms if a in L_SETTINGS), rng.choice(L_SETTINGS))
                body = BoxArrow(r_set, _atoms(r_set, *[a for a in r_only if a is not r_set]))
                formula = Implies(SettingAtom(l_set), body)
                rule, refs = Rule.LOGIC, (k,)
                impls[n] = (l_set, body)
        elif move == "loc2" and impls:
            k = rng.choice(list(impls))
            l_set, body = impls[k]
            formula = Implies(SettingAtom(l_set.partner), body)
            rule, refs = Rule.LOC2, (k,)
            impls[n] = (l_set.partner, body)
        elif move == "junk":
            a = rng.choice([*L_SETTINGS, *R_SETTINGS])
            formula = _atoms(a, rng.choice(_outcomes_of(a)))
            rule = rng.choice([Rule.QM, Rule.LOC1, Rule.LOGIC])
            refs = (rng.randint(1, n - 1),)
        if formula is None:
            continue_with = rng.choice(list(facts)) if facts else 1
            formula, rule, refs = steps[continue_with - 1].formula, Rule.LOGIC, (continue_with,)
        steps.append(Step(n, formula, rule, refs))
    return Derivation(theta, tuple(steps))
