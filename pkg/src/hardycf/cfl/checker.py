"""Step-by-step checking of counterfactual-locality derivations.

Every established step is held as a *claim*: a list of hypothesis facts
(curried antecedents of ``=>``) and a consequent fact. A fact maps a world to
the atoms true there; the actual world is ``()`` and ``R1 []-> ...`` opens the
world ``(R1,)`` in which R1 replaces whatever the right side measured.

Each outcome atom of a consequent carries an evidence set: the
(setting, outcome) pairs its truth was obtained from. A measured outcome has
itself as evidence. The realist semantics ignores evidence when applying the
locality rules; the operational semantics refuses any step that would detach
an inferred value from the evidence it rests on.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from ..correlations import pair_conditional
from ..hardy import L_SETTINGS, R_SETTINGS, OutcomeLabel, SettingLabel, check_theta, hardy_state
from ..qcore import Outcome, Side, UndefinedConditional
from .syntax import And, BoxArrow, Derivation, Formula, Implies, OutcomeAtom, Rule, SettingAtom, Step

CERTAINTY_TOL = 1e-9

Pair = tuple  # (SettingLabel, Outcome)
World = tuple  # tuple of SettingLabel replacements, () is the actual world


class Semantics(Enum):
    REALIST = "realist"
    OPERATIONAL = "operational"


class Status(Enum):
    ACCEPTED = "Accepted"
    REJECTED = "Rejected"


class Reason(str, Enum):
    LOC1_EVIDENCE_DEPENDS_ON_REPLACED_SETTING = "LOC1_EVIDENCE_DEPENDS_ON_REPLACED_SETTING"
    LOC2_USES_LEFT_OUTCOME = "LOC2_USES_LEFT_OUTCOME"
    QM_NOT_CERTIFIED = "QM_NOT_CERTIFIED"
    LOGIC_INVALID = "LOGIC_INVALID"
    WEAKENING_DROPS_EVIDENCE = "WEAKENING_DROPS_EVIDENCE"


class Provenance(Enum):
    MEASURED = "measured"
    INFERRED = "inferred"


def provenance(atom: OutcomeLabel, evidence: frozenset) -> Provenance:
    return Provenance.MEASURED if evidence == {atom.pair} else Provenance.INFERRED


@dataclass(frozen=True)
class Contradiction:
    condition: Pair
    target: Pair
    quantum_probability: float
    claimed_probability: float = 1.0


@dataclass(frozen=True)
class StepRecord:
    index: int
    rule: Rule
    evidence: dict  # (world, OutcomeLabel) -> frozenset of pairs


@dataclass(frozen=True)
class Verdict:
    status: Status
    failing_step: int | None = None
    reason: Reason | None = None
    detail: str = ""
    contradiction: Contradiction | None = None
    trace: tuple[StepRecord, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if self.status is Status.REJECTED and self.failing_step is None:
            raise ValueError("a rejection names its failing step")

    @property
    def accepted(self) -> bool:
        return self.status is Status.ACCEPTED


class _Reject(Exception):
    def __init__(self, reason: Reason, detail: str):
        super().__init__(detail)
        self.reason = reason
        self.detail = detail


class _NoMatch(Exception):
    """The step does not have the shape this rule instance needs."""


def _invalid(detail: str) -> _Reject:
    return _Reject(Reason.LOGIC_INVALID, detail)


# -- claims -----------------------------------------------------------------


@dataclass
class _Claim:
    hyps: list  # list of facts
    fact: dict  # world -> frozenset of atoms
    evidence: dict  # (world, OutcomeLabel) -> frozenset of pairs


def _replacements(world: World) -> dict:
    out = {}
    for s in world:
        out[s.side] = s
    return out


def _collect(f: Formula, world: World, acc: dict) -> None:
    if isinstance(f, And):
        _collect(f.left, world, acc)
        _collect(f.right, world, acc)
    elif isinstance(f, BoxArrow):
        inner = world + (f.setting,)
        acc.setdefault(inner, set())
        _collect(f.body, inner, acc)
    elif isinstance(f, SettingAtom):
        repl = _replacements(world).get(f.label.side)
        acc.setdefault(world, set()).add(repl or f.label)
    elif isinstance(f, OutcomeAtom):
        repl = _replacements(world).get(f.label.side)
        if repl is not None and repl is not f.label.setting:
            raise _invalid(f"outcome {f.label} of {f.label.setting} inside a world where {repl} replaced it")
        acc.setdefault(world, set()).add(f.label)
    else:
        raise _invalid("'=>' may not appear inside a conjunction or counterfactual")


def _fact(f: Formula) -> dict:
    acc: dict = {}
    _collect(f, (), acc)
    fact = {}
    for world, atoms in acc.items():
        atoms = set(atoms) | set(_replacements(world).values())
        _check_world(world, atoms)
        fact[world] = frozenset(atoms)
    return fact


def _check_world(world: World, atoms: set) -> None:
    settings = [a for a in atoms if isinstance(a, SettingLabel)]
    outcomes = [a for a in atoms if isinstance(a, OutcomeLabel)]
    for side in Side:
        if sum(s.side is side for s in settings) > 1:
            raise _invalid(f"two {side.value} settings in one world {_world_name(world)}")
    for o in outcomes:
        if o.setting not in settings:
            raise _invalid(f"outcome {o} without its setting {o.setting} in world {_world_name(world)}")
    per_setting = [o.setting for o in outcomes]
    if len(per_setting) != len(set(per_setting)):
        raise _invalid(f"two outcomes for one setting in world {_world_name(world)}")


def _world_name(world: World) -> str:
    return "actual" if not world else "[" + ",".join(s.value for s in world) + "]"


def _split(f: Formula) -> tuple[list, dict]:
    hyps = []
    while isinstance(f, Implies):
        hyps.append(_fact(f.left))
        f = f.right
    return hyps, _fact(f)


def _letters(fact: dict) -> set:
    return {a for atoms in fact.values() for a in atoms if isinstance(a, OutcomeLabel)}


def _outcome_keys(fact: dict) -> list:
    return [(w, a) for w, atoms in fact.items() for a in atoms if isinstance(a, OutcomeLabel)]


def _hyp_evidence(hyp: dict, source: _Claim) -> frozenset:
    """Evidence a consequent inherits when the hypothesis ``hyp`` is discharged by ``source``."""
    out: set = set()
    for w, a in _outcome_keys(hyp):
        out.add(a.pair)
        out |= source.evidence.get((w, a), frozenset())
    return frozenset(out)


def _covers(big: dict, small: dict) -> bool:
    return all(w in big and atoms <= big[w] for w, atoms in small.items())


# -- QM certification -------------------------------------------------------


def certify_qm_implication(theta: float, frm: Pair, to: Pair) -> bool:
    """True iff the Hardy state makes ``to`` certain once ``frm`` is observed."""
    if frm[0].side is to[0].side:
        raise ValueError("QM implications relate opposite sides")
    t = check_theta(theta)
    return pair_conditional(hardy_state(t), t, frm, to) >= 1 - CERTAINTY_TOL


def _all_pairs() -> list:
    return [(s, o) for s in (*L_SETTINGS, *R_SETTINGS) for o in Outcome]


def certified_links(theta: float, plus_sources_only: bool = False) -> list:
    """Every cross-side (pair -> pair) certainty at ``theta``."""
    out = []
    for frm, to in itertools.product(_all_pairs(), repeat=2):
        if frm[0].side is to[0].side:
            continue
        if plus_sources_only and frm[1] is not Outcome.PLUS:
            continue
        try:
            if certify_qm_implication(theta, frm, to):
                out.append((frm, to))
        except UndefinedConditional:
            pass
    return out


# -- the checker ------------------------------------------------------------


class _Checker:
    def __init__(self, derivation: Derivation, semantics: Semantics):
        self.d = derivation
        self.theta = derivation.theta
        self.operational = semantics is Semantics.OPERATIONAL
        self.claims: dict[int, _Claim] = {}
        self.premise_settings: dict = {}

    # rules ---------------------------------------------------------------

    def premise(self, step: Step, hyps: list, fact: dict) -> dict:
        if hyps or set(fact) != {()}:
            raise _invalid("a premise is a plain conjunction of settings and outcomes")
        atoms = fact[()]
        outcomes = [a for a in atoms if isinstance(a, OutcomeLabel)]
        for side in Side:
            if sum(o.side is side for o in outcomes) > 1:
                raise _invalid(f"a premise measures at most one outcome on side {side.value}")
        for s in atoms:
            if isinstance(s, SettingLabel):
                prev = self.premise_settings.setdefault(s.side, s)
                if prev is not s:
                    raise _invalid(f"premise measures {s} but {prev} was already measured")
        return {((), o): frozenset({o.pair}) for o in outcomes}

    def qm(self, step: Step, hyps: list, fact: dict) -> dict:
        ref = self.claims[step.refs[0]]
        if hyps != ref.hyps or set(fact) != set(ref.fact):
            raise _invalid("QM adds one correlated outcome and keeps everything else")
        changed = [w for w in fact if fact[w] != ref.fact[w]]
        if len(changed) != 1:
            raise _invalid("QM adds exactly one outcome atom")
        w = changed[0]
        added = fact[w] - ref.fact[w]
        if not ref.fact[w] <= fact[w] or len(added) != 1:
            raise _invalid("QM adds exactly one outcome atom")
        (target,) = added
        if not isinstance(target, OutcomeLabel):
            raise _invalid("QM concludes an outcome, not a setting")
        sources = sorted(
            (a for a in ref.fact[w] if isinstance(a, OutcomeLabel) and a.side is not target.side),
            key=lambda a: a.name,
        )
        if not sources:
            raise _invalid(f"no outcome on the other side to correlate {target} with")
        evidence = dict(ref.evidence)
        for src in sources:
            try:
                ok = certify_qm_implication(self.theta, src.pair, target.pair)
            except UndefinedConditional:
                ok = False
            if ok:
                evidence[(w, target)] = ref.evidence.get((w, src), frozenset()) | {src.pair}
                return evidence
        raise _Reject(
            Reason.QM_NOT_CERTIFIED,
            f"{' / '.join(s.name for s in sources)} does not make {target} certain at theta={self.theta}",
        )

    def loc1(self, step: Step, hyps: list, fact: dict) -> dict:
        ref = self.claims[step.refs[0]]
        if hyps != ref.hyps:
            raise _invalid("LOC1 keeps the hypotheses unchanged")
        actual = ref.fact.get((), frozenset())
        r_old = next((a for a in actual if isinstance(a, SettingLabel) and a.side is Side.R), None)
        l_set = next((a for a in actual if isinstance(a, SettingLabel) and a.side is Side.L), None)
        if r_old is None or l_set is None:
            raise _invalid("LOC1 needs an established R setting and L setting")
        r_new = r_old.partner
        box = (r_new,)
        if box not in fact:
            raise _invalid(f"LOC1 concludes {r_new} []-> (...) replacing {r_old}")
        rest = {w: a for w, a in fact.items() if w != box}
        if rest and rest != {w: ref.fact[w] for w in rest if w in ref.fact}:
            raise _invalid("LOC1 may only add the counterfactual world")
        kept = fact[box] - {r_new}
        l_atoms = {a for a in actual if a.side is Side.L}
        if not kept <= l_atoms | ref.fact.get(box, frozenset()):
            raise _invalid(f"inside {r_new} []-> only left-side atoms of the premise survive")
        preserved = [a for a in kept if isinstance(a, OutcomeLabel)]
        if l_set not in kept or not preserved:
            raise _invalid("LOC1 preserves a left setting together with its outcome")
        evidence = {k: v for k, v in ref.evidence.items() if k[0] in rest}
        for o in sorted(preserved, key=lambda a: a.name):
            ev = ref.evidence.get(((), o), frozenset()) | ref.evidence.get((box, o), frozenset())
            if self.operational and any(p[0] is r_old for p in ev):
                raise _Reject(
                    Reason.LOC1_EVIDENCE_DEPENDS_ON_REPLACED_SETTING,
                    f"{o} was inferred from {_fmt_pairs(ev)}; {r_old} cannot be replaced by {r_new}",
                )
            evidence[(box, o)] = ev
        return evidence

    def loc2(self, step: Step, hyps: list, fact: dict) -> dict:
        ref = self.claims[step.refs[0]]
        if not ref.hyps or not hyps:
            raise _invalid("LOC2 generalises a claim of the form Lv => X")
        first = ref.hyps[0]
        if set(first) != {()} or len(first[()]) != 1:
            raise _invalid("LOC2 needs a bare left setting as the outer hypothesis")
        (l_old,) = first[()]
        if not isinstance(l_old, SettingLabel) or l_old.side is not Side.L:
            raise _invalid("LOC2 needs a bare left setting as the outer hypothesis")
        for part in [*ref.hyps[1:], ref.fact]:
            for w, atoms in part.items():
                if any(s.side is Side.L for s in w) or any(a.side is Side.L for a in atoms):
                    raise _invalid("the generalised relation may mention only right-side events")
        if hyps[1:] != ref.hyps[1:] or fact != ref.fact or hyps[0] != {(): frozenset({l_old.partner})}:
            raise _invalid(f"LOC2 replaces {l_old} by {l_old.partner} and changes nothing else")
        if self.operational:
            for key in sorted(ref.evidence, key=_key_order):
                used = [p for p in ref.evidence[key] if p[0] is l_old]
                if used:
                    raise _Reject(
                        Reason.LOC2_USES_LEFT_OUTCOME,
                        f"{key[1]} rests on the outcome {_fmt_pairs(used)} of {l_old}",
                    )
        return dict(ref.evidence)

    # LOGIC sub-rules, tried in this order ----------------------------------

    def _weaken(self, sources: list, hyps: list, fact: dict) -> dict:
        """Conclusion ``fact`` keeps a subset of the atoms of ``sources``."""
        for w, atoms in fact.items():
            pool = set().union(*(s.fact.get(w, frozenset()) for s in sources))
            if not atoms <= pool:
                raise _NoMatch()
        evidence = {}
        for key in _outcome_keys(fact):
            evidence[key] = frozenset().union(*(s.evidence.get(key, frozenset()) for s in sources))
        dropped = set().union(*(_letters(s.fact) for s in sources)) - _letters(fact)
        dropped -= set().union(set(), *(_letters(h) for h in hyps))
        if self.operational:
            dropped_pairs = {o.pair for o in dropped}
            for key in sorted(evidence, key=_key_order):
                lost = evidence[key] & dropped_pairs
                if lost and provenance(key[1], evidence[key]) is Provenance.INFERRED:
                    raise _Reject(
                        Reason.WEAKENING_DROPS_EVIDENCE,
                        f"{key[1]} rests on {_fmt_pairs(lost)}, which this step drops",
                    )
        return evidence

    def logic_conj(self, refs: list, hyps: list, fact: dict) -> dict:
        if any(r.hyps != hyps for r in refs):
            raise _NoMatch()
        return self._weaken(refs, hyps, fact)

    def logic_intro(self, refs: list, hyps: list, fact: dict) -> dict:
        if len(refs) != 1:
            raise _NoMatch()
        (ref,) = refs
        n = len(hyps) - len(ref.hyps)
        if n <= 0 or hyps[n:] != ref.hyps:
            raise _NoMatch()
        return self._weaken([ref], hyps, fact)

    def logic_regroup(self, refs: list, hyps: list, fact: dict) -> dict:
        if len(refs) != 1 or not hyps or not refs[0].hyps:
            raise _NoMatch()
        (ref,) = refs
        if fact != ref.fact or hyps == ref.hyps:
            raise _NoMatch()

        def flat(hs):
            out: dict = {}
            for h in hs:
                for w, atoms in h.items():
                    out[w] = out.get(w, frozenset()) | atoms
            return out

        if flat(hyps) != flat(ref.hyps):
            raise _NoMatch()
        return dict(ref.evidence)

    def logic_chain(self, refs: list, hyps: list, fact: dict) -> dict:
        if len(refs) != 2:
            raise _NoMatch()
        for first, second in (refs, refs[::-1]):
            if len(second.hyps) != 1 or not _covers(first.fact, second.hyps[0]):
                continue
            if hyps != first.hyps or fact != second.fact:
                continue
            inherited = _hyp_evidence(second.hyps[0], first)
            return {k: v | inherited for k, v in second.evidence.items()}
        raise _NoMatch()

    def logic_detach(self, refs: list, hyps: list, fact: dict) -> dict:
        if len(refs) != 2:
            raise _NoMatch()
        for impl, base in (refs, refs[::-1]):
            if not impl.hyps or base.hyps or not _covers(base.fact, impl.hyps[0]):
                continue
            if hyps != impl.hyps[1:] or fact != impl.fact:
                continue
            inherited = _hyp_evidence(impl.hyps[0], base)
            return {k: v | inherited for k, v in impl.evidence.items()}
        raise _NoMatch()

    def logic(self, step: Step, hyps: list, fact: dict) -> dict:
        refs = [self.claims[r] for r in step.refs]
        first_reject = None
        for sub in (self.logic_conj, self.logic_intro, self.logic_regroup, self.logic_chain, self.logic_detach):
            try:
                return sub(refs, hyps, fact)
            except _NoMatch:
                continue
            except _Reject as rej:
                first_reject = first_reject or rej
        if first_reject is not None:
            raise first_reject
        raise _invalid("not a conjunction, weakening, implication introduction, regrouping, chaining or detachment")

    # driver --------------------------------------------------------------

    def run(self) -> Verdict:
        rules = {
            Rule.PREMISE: self.premise,
            Rule.QM: self.qm,
            Rule.LOC1: self.loc1,
            Rule.LOC2: self.loc2,
            Rule.LOGIC: self.logic,
        }
        trace = []
        for step in self.d.steps:
            try:
                hyps, fact = _split(step.formula)
                evidence = rules[step.rule](step, hyps, fact)
                _check_evidence(evidence)
            except _Reject as rej:
                return Verdict(Status.REJECTED, step.index, rej.reason, rej.detail, trace=tuple(trace))
            self.claims[step.index] = _Claim(hyps, fact, evidence)
            trace.append(StepRecord(step.index, step.rule, evidence))
        final = self.claims[self.d.steps[-1].index]
        return Verdict(
            Status.ACCEPTED,
            contradiction=self.contradiction(final),
            trace=tuple(trace),
        )

    def contradiction(self, final: _Claim) -> Contradiction | None:
        claims = _closure(_value_links(final))
        if not self.operational:
            # values taken as context free may be chained with one certified correlation
            q = certified_links(self.theta)
            before = {(x, z) for x, p in q for p2, z in claims if p == p2}
            after = {(x, z) for x, p in claims for p2, z in q if p == p2}
            claims |= before | after
        state = hardy_state(self.theta)
        worst = None
        for frm, to in sorted(claims, key=lambda c: (_pair_key(c[0]), _pair_key(c[1]))):
            if frm[0].side is to[0].side:
                continue
            try:
                p = pair_conditional(state, self.theta, frm, to)
            except UndefinedConditional:
                continue
            if p < 1 - CERTAINTY_TOL and (worst is None or p < worst.quantum_probability):
                worst = Contradiction(frm, to, p)
        return worst


def _value_links(claim: _Claim) -> set:
    """(pair -> pair) certainties the claim asserts when read value by value."""
    links = set()
    for (w, y), ev in claim.evidence.items():
        links |= {(p, y.pair) for p in ev if p != y.pair}
    targets = [y.pair for _, y in _outcome_keys(claim.fact)]
    for h in claim.hyps:
        for _, a in _outcome_keys(h):
            links |= {(a.pair, t) for t in targets if t != a.pair}
    return links


def _closure(links: set) -> set:
    out = set(links)
    while True:
        new = {(a, d) for a, b in out for c, d in out if b == c and a != d} - out
        if not new:
            return out
        out |= new


def _check_evidence(evidence: dict) -> None:
    for key, ev in evidence.items():
        settings = [p[0] for p in ev]
        if len(settings) != len(set(settings)):
            raise _invalid(f"evidence for {key[1]} assigns two outcomes to one setting")


def _pair_key(p: Pair) -> tuple:
    return (p[0].value, p[1].index)


def _key_order(key: tuple) -> tuple:
    w, a = key
    return (tuple(s.value for s in w), a.name)


def _fmt_pairs(pairs: Iterable) -> str:
    return "{" + ", ".join(f"{s.value}={o.value}" for s, o in sorted(pairs, key=_pair_key)) + "}"


def check_derivation(d: Derivation, semantics: Semantics | str = Semantics.OPERATIONAL) -> Verdict:
    return _Checker(d, Semantics(semantics)).run()
