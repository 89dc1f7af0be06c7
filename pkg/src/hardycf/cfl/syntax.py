"""Formulas and derivation scripts of the counterfactual locality calculus.

Concrete syntax::

    formula := impl
    impl    := conj ["=>" impl]
    conj    := unit {"&" unit}
    unit    := SETTING | OUTCOME | SETTING "[]->" unit | "(" formula ")"

``&`` associates to the left, ``=>`` to the right. A derivation file is a
``theta = <radians>`` header followed by lines
``step <n>: <formula> by <RULE>[(<ref>, ...)]``; ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Union

from ..hardy import DomainError, OutcomeLabel, SettingLabel, check_theta


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class StepRefError(IndexError):
    """A step refers to itself or to a later step."""

    def __init__(self, message: str, line: int = 1):
        super().__init__(f"{line}: {message}")
        self.line = line


@dataclass(frozen=True)
class SettingAtom:
    label: SettingLabel


@dataclass(frozen=True)
class OutcomeAtom:
    label: OutcomeLabel


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class BoxArrow:
    """``setting []-> body``: had ``setting`` been chosen on its side instead."""

    setting: SettingLabel
    body: Formula


Formula = Union[SettingAtom, OutcomeAtom, And, Implies, BoxArrow]
ATOMS = (SettingAtom, OutcomeAtom)


def conj(*parts: Formula) -> Formula:
    """Left-nested conjunction of one or more formulas."""
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def depth(f: Formula) -> int:
    if isinstance(f, ATOMS):
        return 0
    if isinstance(f, BoxArrow):
        return 1 + depth(f.body)
    return 1 + max(depth(f.left), depth(f.right))


# -- printing ---------------------------------------------------------------


def _unit(f: Formula) -> str:
    s = format_formula(f)
    return s if isinstance(f, ATOMS) else f"({s})"


def format_formula(f: Formula) -> str:
    """Canonical text: every compound operand is parenthesised except the
    left spine of a conjunction chain."""
    if isinstance(f, SettingAtom):
        return f.label.value
    if isinstance(f, OutcomeAtom):
        return f.label.name
    if isinstance(f, And):
        spine = []
        node = f
        while isinstance(node, And):
            spine.append(node.right)
            node = node.left
        spine.append(node)
        return " & ".join(_unit(p) for p in reversed(spine))
    if isinstance(f, Implies):
        return f"{_unit(f.left)} => {_unit(f.right)}"
    if isinstance(f, BoxArrow):
        return f"{f.setting.value} []-> {_unit(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


# -- tokenizing and parsing -------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<box>\[\]->)|(?P<impl>=>)|(?P<amp>&)|(?P<lp>\()|(?P<rp>\))"
    r"|(?P<setting>[LR][12](?![A-Za-z0-9_]))|(?P<outcome>[a-h](?![A-Za-z0-9_])))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    col: int  # 0-based offset into the source


def _tokenize(text: str, line: int, col0: int) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.lastgroup is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos + 1)
        toks.append(_Tok(m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _FormulaParser:
    def __init__(self, text: str, line: int = 1, col0: int = 0):
        self.line, self.col0 = line, col0
        self.toks = _tokenize(text, line, col0)
        self.i = 0

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(msg, self.line, self.col0 + tok.col + 1)

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self, kind: str) -> _Tok:
        tok = self.peek()
        if tok.kind != kind:
            what = tok.text or "end of formula"
            raise self.error(f"expected {kind}, found {what!r}")
        self.i += 1
        return tok

    def parse(self) -> Formula:
        if self.peek().kind == "eof":
            raise self.error("empty formula")
        f = self.impl()
        if self.peek().kind != "eof":
            raise self.error(f"unexpected {self.peek().text!r}")
        return f

    def impl(self) -> Formula:
        left = self.conj()
        if self.peek().kind == "impl":
            self.i += 1
            return Implies(left, self.impl())
        return left

    def conj(self) -> Formula:
        out = self.unit()
        while self.peek().kind == "amp":
            self.i += 1
            out = And(out, self.unit())
        return out

    def unit(self) -> Formula:
        tok = self.peek()
        if tok.kind == "setting":
            self.i += 1
            label = SettingLabel(tok.text)
            if self.peek().kind == "box":
                self.i += 1
                return BoxArrow(label, self.unit())
            return SettingAtom(label)
        if tok.kind == "outcome":
            self.i += 1
            return OutcomeAtom(OutcomeLabel[tok.text])
        if tok.kind == "lp":
            self.i += 1
            f = self.impl()
            self.take("rp")
            return f
        raise self.error(f"expected a setting, outcome or '(', found {tok.text or 'end of formula'!r}")


def parse_formula(text: str, *, line: int = 1, column: int = 1) -> Formula:
    return _FormulaParser(text, line, column - 1).parse()


# -- derivations ------------------------------------------------------------


class Rule(Enum):
    PREMISE = "PREMISE"
    QM = "QM"
    LOC1 = "LOC1"
    LOC2 = "LOC2"
    LOGIC = "LOGIC"


_SINGLE_REF = {Rule.QM, Rule.LOC1, Rule.LOC2}


@dataclass(frozen=True)
class Step:
    index: int
    formula: Formula
    rule: Rule
    refs: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if any(r >= self.index or r < 1 for r in self.refs):
            raise StepRefError(f"step {self.index} refers to {self.refs}; refs must be earlier steps")


@dataclass(frozen=True)
class Derivation:
    theta: float
    steps: tuple[Step, ...]

    def __post_init__(self) -> None:
        check_theta(self.theta)
        for k, step in enumerate(self.steps, start=1):
            if step.index != k:
                raise ValueError(f"step indices must run 1..n, got {step.index} at position {k}")

    def with_theta(self, theta: float) -> Derivation:
        return Derivation(theta, self.steps)


_HEADER = re.compile(r"^\s*theta\s*=\s*(?P<num>\S+)\s*$")
_STEP = re.compile(
    r"^\s*step\s+(?P<n>\d+)\s*:(?P<formula>.*)\bby\s+(?P<rule>[A-Za-z0-9]+)"
    r"\s*(?:\((?P<refs>[^)]*)\))?\s*$"
)


def _strip_comment(line: str) -> str:
    k = line.find("#")
    return line if k < 0 else line[:k]


def parse_derivation(text: str) -> Derivation:
    theta = None
    steps: list[Step] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        if theta is None:
            m = _HEADER.match(line)
            if not m:
                raise ParseError("expected header 'theta = <radians>'", lineno, 1)
            try:
                theta = float(m.group("num"))
                check_theta(theta)
            except (ValueError, DomainError) as exc:
                msg = str(exc) if isinstance(exc, DomainError) else f"bad number {m.group('num')!r}"
                raise ParseError(msg, lineno, m.start("num") + 1) from None
            continue
        m = _STEP.match(line)
        if not m:
            raise ParseError("expected 'step <n>: <formula> by <RULE>[(refs)]'", lineno, 1)
        index = int(m.group("n"))
        if index != len(steps) + 1:
            raise ParseError(f"expected step {len(steps) + 1}, found step {index}", lineno, m.start("n") + 1)
        try:
            rule = Rule(m.group("rule"))
        except ValueError:
            raise ParseError(f"unknown rule {m.group('rule')!r}", lineno, m.start("rule") + 1) from None
        refs: tuple[int, ...] = ()
        if m.group("refs") is not None:
            parts = [p.strip() for p in m.group("refs").split(",")]
            if not all(p.isdigit() for p in parts):
                raise ParseError(f"bad reference list {m.group('refs')!r}", lineno, m.start("refs") + 1)
            refs = tuple(int(p) for p in parts)
        if rule is Rule.PREMISE and refs:
            raise ParseError("PREMISE takes no references", lineno, m.start("rule") + 1)
        if rule in _SINGLE_REF and len(refs) != 1:
            raise ParseError(f"{rule.value} takes exactly one reference", lineno, m.start("rule") + 1)
        if rule is Rule.LOGIC and not refs:
            raise ParseError("LOGIC needs at least one reference", lineno, m.start("rule") + 1)
        bad = [r for r in refs if not 1 <= r < index]
        if bad:
            raise StepRefError(f"step {index} refers to step {bad[0]}; refs must be earlier steps", lineno)
        formula = parse_formula(m.group("formula"), line=lineno, column=m.start("formula") + 1)
        steps.append(Step(index, formula, rule, refs))
    if theta is None:
        raise ParseError("missing 'theta = <radians>' header", 1, 1)
    if not steps:
        raise ParseError("derivation has no steps", len(text.splitlines()) or 1, 1)
    return Derivation(theta, tuple(steps))


def format_step(step: Step) -> str:
    refs = f"({','.join(str(r) for r in step.refs)})" if step.refs else ""
    return f"step {step.index}: {format_formula(step.formula)} by {step.rule.value}{refs}"


def format_derivation(d: Derivation) -> str:
    lines = [f"theta = {d.theta!r}"]
    lines += [format_step(s) for s in d.steps]
    return "\n".join(lines) + "\n"

