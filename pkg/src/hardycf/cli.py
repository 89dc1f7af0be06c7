"""Command line front end.

Exit codes: 0 success or accepted derivation, 1 verification failure or
rejected derivation, 2 bad input (number, domain, parse), 3 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import correlations, hardy, mc
from .cfl.checker import Semantics, check_derivation
from .cfl.library import SCRIPT_TEXTS, builtin_text
from .cfl.syntax import ParseError, StepRefError, parse_derivation
from .hardy import DomainError, SettingLabel
from .qcore import OUTCOME_PAIRS, UndefinedConditional, joint_distribution

SCHEMA = "hardycf/1"

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_USAGE = 0, 1, 2, 3

CLI_SETTINGS = {
    "Lz": SettingLabel.L1,
    "Lx": SettingLabel.L2,
    "Rz": SettingLabel.R1,
    "Rtheta": SettingLabel.R2,
}
_CLI_NAME = {v: k for k, v in CLI_SETTINGS.items()}

CSV_HEADERS = {
    "probs": ["theta", "setting_L", "setting_R", "outcome_L", "outcome_R", "probability"],
    "chain": ["theta", "quantity", "condition", "target", "value"],
    "correlations": ["theta", "quantity", "condition", "target", "value"],
    "hv-enum": ["theta", "L1", "L2", "R1", "R2", "qm_event_probability", "hv_event_possible"],
    "check": ["path", "semantics", "theta", "status", "failing_step", "reason",
              "claimed_probability", "quantum_probability"],
    "sample": ["theta", "setting_L", "setting_R", "seed", "n", "outcome_L", "outcome_R",
               "count", "frequency", "probability", "z"],
    "sweep": ["theta", "quantum_conditional", "discrepancy", "qm_event_probability"],
}


class InputError(Exception):
    """Bad number, domain violation or unreadable input: exit 2."""


class UsageError(Exception):
    """Malformed invocation: exit 3."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- serialisation ----------------------------------------------------------


def _json_value(v) -> str:
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, float):
        if math.isinf(v):
            return json.dumps("inf" if v > 0 else "-inf")
        if math.isnan(v):
            return json.dumps("nan")
        return format(v, ".17g")
    if isinstance(v, (int, str)):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialise {type(v).__name__}")


def render_json(command: str, payload: dict) -> str:
    return _json_value({"schema": SCHEMA, "command": command, **payload}) + "\n"


def _csv_cell(v) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".12g")
    if v is None:
        return ""
    return str(v)


def render_csv(command: str, rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADERS[command])
    for row in rows:
        w.writerow([_csv_cell(x) for x in row])
    return buf.getvalue()


# -- argument helpers -------------------------------------------------------


def _number(text: str, name: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise InputError(f"--{name}: {text!r} is not a number") from None
    if not math.isfinite(x):
        raise InputError(f"--{name}: {text!r} is not finite")
    return x


def _theta(text: str) -> float:
    t = _number(text, "theta")
    try:
        return hardy.check_theta(t)
    except DomainError as exc:
        raise InputError(f"DomainError: {exc}") from None


def _settings(text: str) -> tuple[SettingLabel, SettingLabel]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or any(p not in CLI_SETTINGS for p in parts):
        raise UsageError(f"--settings expects 'L,R' from {sorted(CLI_SETTINGS)}, got {text!r}")
    left, right = (CLI_SETTINGS[p] for p in parts)
    if left.side.value != "L" or right.side.value != "R":
        raise UsageError("--settings lists the left setting first, then the right one")
    return left, right


def _pair_text(pair) -> str:
    return f"{pair[0].value}{pair[1].value}"


def _cell_key(cell) -> str:
    return cell[0].value + cell[1].value


# -- commands ---------------------------------------------------------------


def cmd_probs(args) -> tuple[str, int]:
    theta = _theta(args.theta)
    left, right = _settings(args.settings)
    (_, obs_l), (_, obs_r) = hardy.setting_observable(left, theta), hardy.setting_observable(right, theta)
    dist = joint_distribution(hardy.hardy_state(theta), obs_l, obs_r)
    names = (_CLI_NAME[left], _CLI_NAME[right])
    if args.format == "csv":
        rows = [[theta, *names, a.value, b.value, dist[a, b]] for a, b in OUTCOME_PAIRS]
        return render_csv("probs", rows), EXIT_OK
    payload = {
        "theta": theta,
        "settings": {"L": names[0], "R": names[1]},
        "cells": {_cell_key(k): dist[k] for k in OUTCOME_PAIRS},
    }
    return render_json("probs", payload), EXIT_OK


def _chain(theta: float):
    try:
        return correlations.chain_report(theta)
    except UndefinedConditional as exc:
        raise InputError(f"UndefinedConditional: {exc}") from None


def _chain_rows(theta, report) -> list[list]:
    rows = [[theta, "link", _pair_text(l.condition), _pair_text(l.target), l.probability] for l in report.links]
    cond, tgt = correlations.CHAIN_CONCLUSION
    rows.append([theta, "quantum_conditional", _pair_text(cond), _pair_text(tgt), report.quantum_conditional])
    rows.append([theta, "discrepancy", "", "", report.discrepancy])
    return rows


def _chain_payload(report) -> dict:
    return {
        "links": [
            {"condition": _pair_text(l.condition), "target": _pair_text(l.target), "probability": l.probability}
            for l in report.links
        ],
        "chain_conclusion": _pair_text(report.chain_conclusion),
        "quantum_conditional": report.quantum_conditional,
        "discrepancy": report.discrepancy,
    }


def cmd_chain(args) -> tuple[str, int]:
    theta = _theta(args.theta)
    eps = _number(args.eps, "eps")
    report = _chain(theta)
    code = EXIT_OK if report.links_perfect(eps) else EXIT_FAIL
    if args.format == "csv":
        return render_csv("chain", _chain_rows(theta, report)), code
    return render_json("chain", {"theta": theta, "eps": eps, **_chain_payload(report)}), code


def cmd_correlations(args) -> tuple[str, int]:
    theta = _theta(args.theta)
    eps = _number(args.eps, "eps")
    report = _chain(theta)
    dec = hardy.verify_decompositions(theta)
    residuals = {"lz_rtheta": dec.residual_lz_rtheta, "rtheta_lx": dec.residual_rtheta_lx, "lx_rz": dec.residual_lx_rz}
    ok = report.links_perfect(eps) and dec.max_residual < 1e-11
    code = EXIT_OK if ok else EXIT_FAIL
    if args.format == "csv":
        rows = _chain_rows(theta, report)
        rows += [[theta, f"residual_{k}", "", "", v] for k, v in residuals.items()]
        return render_csv("correlations", rows), code
    payload = {"theta": theta, "eps": eps, **_chain_payload(report), "residuals": residuals}
    return render_json("correlations", payload), code


def cmd_hv_enum(args) -> tuple[str, int]:
    theta = _theta(args.theta)
    eps = _number(args.eps, "eps")
    try:
        report = correlations.hardy_contradiction(theta, eps)
    except DomainError as exc:
        raise InputError(f"DomainError: {exc}") from None
    if args.format == "csv":
        rows = [
            [theta, *(o.value for _, o in a.values), report.qm_event_probability, str(report.hv_event_possible).lower()]
            for a in report.admissible
        ]
        return render_csv("hv-enum", rows), EXIT_OK
    payload = {
        "theta": theta,
        "eps": eps,
        "admissible": [a.as_dict() for a in report.admissible],
        "admissible_count": len(report.admissible),
        "qm_event_probability": report.qm_event_probability,
        "hv_event_possible": report.hv_event_possible,
    }
    return render_json("hv-enum", payload), EXIT_OK


def _read_derivation(path: str) -> str:
    p = Path(path)
    if p.exists():
        return p.read_text(encoding="utf-8")
    name = p.stem if p.suffix == ".cfl" else path
    if name in SCRIPT_TEXTS:
        return builtin_text(name)
    raise InputError(f"{path}: no such file or builtin script")


def cmd_check(args) -> tuple[str, int]:
    text = _read_derivation(args.path)
    try:
        derivation = parse_derivation(text)
    except ParseError as exc:
        raise InputError(f"{args.path}:{exc.line}:{exc.column}: {exc.message}") from None
    except StepRefError as exc:
        raise InputError(f"{args.path}:{exc}") from None
    if args.theta is not None:
        derivation = derivation.with_theta(_theta(args.theta))
    verdict = check_derivation(derivation, Semantics(args.semantics))
    code = EXIT_OK if verdict.accepted else EXIT_FAIL
    con = verdict.contradiction
    if args.format == "csv":
        row = [
            args.path, args.semantics, derivation.theta, verdict.status.value, verdict.failing_step,
            verdict.reason.value if verdict.reason else None,
            con.claimed_probability if con else None,
            con.quantum_probability if con else None,
        ]
        return render_csv("check", [row]), code
    payload = {
        "path": args.path,
        "semantics": args.semantics,
        "theta": derivation.theta,
        "status": verdict.status.value,
        "failing_step": verdict.failing_step,
        "reason": verdict.reason.value if verdict.reason else None,
        "detail": verdict.detail,
        "contradiction": None if con is None else {
            "condition": _pair_text(con.condition),
            "target": _pair_text(con.target),
            "claimed_probability": con.claimed_probability,
            "quantum_probability": con.quantum_probability,
        },
    }
    return render_json("check", payload), code


def cmd_sample(args) -> tuple[str, int]:
    theta = _theta(args.theta)
    left, right = _settings(args.settings)
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    (_, obs_l), (_, obs_r) = hardy.setting_observable(left, theta), hardy.setting_observable(right, theta)
    state = hardy.hardy_state(theta)
    counts = mc.sample_joint(state, obs_l, obs_r, args.n, args.seed)
    report = mc.frequency_report(counts, joint_distribution(state, obs_l, obs_r))
    names = (_CLI_NAME[left], _CLI_NAME[right])
    if args.format == "csv":
        rows = [
            [theta, *names, args.seed, args.n, r.cell[0].value, r.cell[1].value, r.count, r.frequency, r.probability, r.z]
            for r in report
        ]
        return render_csv("sample", rows), EXIT_OK
    payload = {
        "theta": theta,
        "settings": {"L": names[0], "R": names[1]},
        "n": args.n,
        "seed": args.seed,
        "rng": "splitmix64",
        "cells": {
            _cell_key(r.cell): {"count": r.count, "frequency": r.frequency, "probability": r.probability, "z": r.z}
            for r in report
        },
    }
    return render_json("sample", payload), EXIT_OK


def cmd_sweep(args) -> tuple[str, int]:
    lo, hi = _theta(args.theta_min), _theta(args.theta_max)
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    rows = []
    for t in np.linspace(lo, hi, args.steps):
        t = float(t)
        report = _chain(t)
        rows.append([t, report.quantum_conditional, report.discrepancy, correlations.hardy_event_probability(t)])
    if args.format == "csv":
        return render_csv("sweep", rows), EXIT_OK
    keys = CSV_HEADERS["sweep"]
    payload = {"theta_min": lo, "theta_max": hi, "steps": args.steps, "rows": [dict(zip(keys, r)) for r in rows]}
    return render_json("sweep", payload), EXIT_OK


# -- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hardycf", description="Hardy-state correlations and counterfactual locality checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.set_defaults(func=func)
        return p

    p = add("probs", cmd_probs, "joint outcome table for one setting pair")
    p.add_argument("--theta", required=True)
    p.add_argument("--settings", required=True, help="e.g. Lz,Rtheta")

    for name, func, text in (
        ("chain", cmd_chain, "perfect-correlation chain and the quantum conditional"),
        ("correlations", cmd_correlations, "chain report plus decomposition residuals"),
    ):
        p = add(name, func, text)
        p.add_argument("--theta", required=True)
        p.add_argument("--eps", default="1e-9")

    p = add("hv-enum", cmd_hv_enum, "enumerate non-contextual hidden value assignments")
    p.add_argument("--theta", required=True)
    p.add_argument("--eps", default="1e-9")

    p = add("check", cmd_check, "check a derivation file")
    p.add_argument("path", help="derivation file, or the name of a builtin script")
    p.add_argument("--semantics", choices=[s.value for s in Semantics], default="operational")
    p.add_argument("--theta", default=None, help="override the header theta")

    p = add("sample", cmd_sample, "Monte Carlo sample of joint outcomes")
    p.add_argument("--theta", required=True)
    p.add_argument("--settings", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = add("sweep", cmd_sweep, "tabulate the quantum clash over a theta grid")
    p.add_argument("--theta-min", required=True)
    p.add_argument("--theta-max", required=True)
    p.add_argument("--steps", type=int, required=True)
    return parser


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        text, code = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
