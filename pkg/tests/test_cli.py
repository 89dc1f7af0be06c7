import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from hardycf.cli import CSV_HEADERS, SCHEMA, run

DERIV = Path(__file__).resolve().parent.parent / "derivations"
PI4, PI3 = "0.7853981633974483", "1.0471975511965976"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv)
    return code, (json.loads(out) if out else None), err


def test_probs_pi_over_4():
    code, doc, _ = call_json("probs", "--theta", PI4, "--settings", "Lz,Rz")
    assert code == 0
    assert doc["schema"] == SCHEMA and doc["command"] == "probs"
    cells = doc["cells"]
    assert cells["++"] == pytest.approx(1 / 12)
    assert cells["+-"] == pytest.approx(1 / 12)
    assert cells["-+"] == pytest.approx(0.75)
    assert cells["--"] == pytest.approx(1 / 12)


def test_probs_theta_zero_csv():
    code, out, _ = call("probs", "--theta", "0", "--settings", "Lz,Rz", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == CSV_HEADERS["probs"]
    assert [float(r[-1]) for r in rows[1:]] == [0.5, 0, 0.5, 0]


def test_json_floats_have_17_digits():
    _, out, _ = call("chain", "--theta", PI3)
    assert "0.25000000000000011" in out


@pytest.mark.parametrize(
    "argv, code",
    [
        (["probs", "--theta", "2.0", "--settings", "Lz,Rz"], 2),
        (["probs", "--theta", "abc", "--settings", "Lz,Rz"], 2),
        (["probs", "--theta", "nan", "--settings", "Lz,Rz"], 2),
        (["probs", "--theta", "0.3", "--settings", "Lz"], 3),
        (["probs", "--theta", "0.3", "--settings", "Rz,Lz"], 3),
        (["probs", "--theta", "0.3"], 3),
        (["frobnicate"], 3),
        ([], 3),
        (["chain", "--theta", "0.3", "--format", "xml"], 3),
        (["hv-enum", "--theta", "1.6"], 2),
        (["hv-enum", "--theta", "0"], 2),
        (["hv-enum", "--theta", "-0.4"], 2),
        (["sample", "--theta", "0.3", "--settings", "Lz,Rz", "--n", "0"], 3),
        (["sample", "--theta", "0.3", "--settings", "Lz,Rz", "--n", "ten"], 3),
        (["check", "no/such/file.cfl"], 2),
        (["sweep", "--theta-min", "0.1", "--theta-max", "1.5", "--steps", "0"], 3),
    ],
)
def test_exit_codes(argv, code):
    got, out, err = call(*argv)
    assert got == code
    assert out == ""
    assert err


def test_domain_message():
    _, _, err = call("probs", "--theta", "2.0", "--settings", "Lz,Rz")
    assert "DomainError" in err


def test_chain():
    code, doc, _ = call_json("chain", "--theta", PI3)
    assert code == 0
    assert doc["quantum_conditional"] == pytest.approx(0.25, abs=1e-12)
    assert all(abs(l["probability"] - 1) < 1e-9 for l in doc["links"])
    code, doc, _ = call_json("chain", "--theta", "0")
    assert doc["discrepancy"] == 0


def test_correlations_residuals():
    code, doc, _ = call_json("correlations", "--theta", PI4)
    assert code == 0
    assert max(doc["residuals"].values()) < 1e-12


def test_tight_eps_signals_failure():
    code, doc, _ = call_json("chain", "--theta", PI3, "--eps", "0")
    assert code in (0, 1)
    perfect = all(l["probability"] == 1 for l in doc["links"])
    assert code == (0 if perfect else 1)


@pytest.mark.parametrize("theta, q", [(PI4, 1 / 12), (PI3, 3 / 56)])
def test_hv_enum(theta, q):
    code, doc, _ = call_json("hv-enum", "--theta", theta)
    assert code == 0
    assert doc["admissible_count"] == 5
    assert doc["qm_event_probability"] == pytest.approx(q, abs=1e-12)
    assert doc["hv_event_possible"] is False


def test_check_files():
    a = str(DERIV / "stapp-A.cfl")
    code, doc, _ = call_json("check", a, "--semantics", "operational")
    assert code == 1
    assert doc["reason"] == "LOC1_EVIDENCE_DEPENDS_ON_REPLACED_SETTING"
    assert doc["failing_step"] == 3
    code, doc, _ = call_json("check", a, "--semantics", "realist")
    assert code == 0
    assert doc["contradiction"]["claimed_probability"] == 1
    assert doc["contradiction"]["quantum_probability"] == pytest.approx(0.25)


def test_check_theta_override_and_builtin_name():
    code, doc, _ = call_json("check", "stapp-B", "--semantics", "realist", "--theta", PI4)
    assert code == 0
    assert doc["contradiction"]["quantum_probability"] == pytest.approx(0.5)
    code, _, _ = call_json("check", "stapp-B", "--theta", "3")
    assert code == 2


def test_check_garbled_reports_position():
    code, out, err = call("check", str(DERIV / "garbled.cfl"))
    assert code == 2
    assert "garbled.cfl:3:14:" in err


def test_sample_zero_cell():
    code, doc, _ = call_json("sample", "--theta", PI4, "--settings", "Lz,Rtheta", "--n", "100000", "--seed", "7")
    assert code == 0
    assert doc["cells"]["+-"]["count"] == 0
    assert sum(c["count"] for c in doc["cells"].values()) == 100000


def test_sweep():
    code, out, _ = call("sweep", "--theta-min", "0.1", "--theta-max", "1.5", "--steps", "15", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 15
    for r in rows:
        assert float(r["quantum_conditional"]) == pytest.approx(math.cos(float(r["theta"])) ** 2, abs=1e-9)
    code, doc, _ = call_json("sweep", "--theta-min", "0.1", "--theta-max", "1.5", "--steps", "15")
    for r in doc["rows"]:
        assert abs(r["quantum_conditional"] - math.cos(r["theta"]) ** 2) < 1e-9


@pytest.mark.parametrize(
    "argv",
    [
        ["probs", "--theta", "0.4", "--settings", "Lx,Rtheta"],
        ["chain", "--theta", "0.4"],
        ["correlations", "--theta", "0.4"],
        ["hv-enum", "--theta", "0.4"],
        ["check", "stapp-A"],
        ["sample", "--theta", "0.4", "--settings", "Lz,Rz", "--n", "100"],
        ["sweep", "--theta-min", "0.1", "--theta-max", "0.2", "--steps", "2"],
    ],
)
def test_every_command_has_both_formats(argv):
    _, out, _ = call(*argv)
    doc = json.loads(out)
    assert doc["schema"] == SCHEMA and doc["command"] == argv[0]
    _, out, _ = call(*argv, "--format", "csv")
    assert out.splitlines()[0].split(",") == CSV_HEADERS[argv[0]]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hardycf", "chain", "--theta", "0.5", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("theta,quantity")
