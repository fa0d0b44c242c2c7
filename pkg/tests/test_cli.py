import io
import json
import subprocess
import sys

import pytest

from orbitline.cli import main
from orbitline.errors import ParseError, ValidationError
from orbitline.io import dumps, parse_system, system_from_json
from orbitline.poly import Polynomial

SQUARES = {"generators": [{"f": {"coeffs": ["0/1", "0/1", "1/1"]}, "g": {"coeffs": ["0/1", "0/1", "1/1"]}}]}
SHIFTED = {"generators": [{"f": {"coeffs": ["1", "0", "1"]}, "g": {"coeffs": ["2", "0", "1"]}}], "base": {"x": "2", "y": "2"}}
MIXED = {
    "generators": [
        {"f": {"coeffs": ["0", "0", "0", "1"]}, "g": {"coeffs": ["0", "0", "1"]}},
        {"f": {"coeffs": ["0", "0", "0", "0", "1"]}, "g": {"coeffs": ["0", "0", "1"]}},
    ],
    "base": {"x": "2", "y": "2"},
    "sequences": {"main": "pre:/cyc:1"},
}


@pytest.fixture
def write(tmp_path):
    def _write(obj, name="s.json"):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj), encoding="utf-8")
        return str(path)

    return _write


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def report(*argv):
    code, text = run(*argv)
    return code, json.loads(text.strip().splitlines()[-1])


# ------------------------------------------------------------ parse_system

def test_parse_canonical_encoding(write):
    sf = parse_system(write(SQUARES))
    assert sf.system.s == 1
    assert sf.system[1].f == Polynomial([0, 0, 1]) == sf.system[1].g


def test_parse_canonicalizes_coefficients(write):
    data = {"generators": [{"f": {"coeffs": ["2/4", "0", "1"]}, "g": {"coeffs": ["0", "1"]}}]}
    sf = parse_system(write(data))
    assert sf.to_json()["generators"][0]["f"]["coeffs"][0] == "1/2"


def test_parse_roundtrip_is_stable(write):
    sf = parse_system(write(MIXED))
    once = sf.to_json()
    again = parse_system(io.StringIO(json.dumps(once))).to_json()
    assert once == again


def test_parse_rejects_constant_coordinate(write):
    data = {"generators": [{"f": {"coeffs": ["0", "1"]}, "g": {"coeffs": ["5"]}}]}
    with pytest.raises(ValidationError) as info:
        parse_system(write(data))
    assert info.value.field == "generators[1].g"


def test_parse_error_has_position(write):
    with pytest.raises(ParseError) as info:
        parse_system(write('{"generators": [\n  {"f": }\n]}'))
    assert info.value.line == 2 and info.value.column is not None


@pytest.mark.parametrize(
    "data, field",
    [
        ({}, "generators"),
        ({"generators": [{"f": {"coeffs": ["1", "1"]}}]}, "generators[1]"),
        ({"generators": SQUARES["generators"], "base": {"x": "1"}}, "base"),
        ({"generators": SQUARES["generators"], "sequences": {"s": "cyc:2"}}, "sequences.s"),
        ({"generators": SQUARES["generators"], "budgets": {"max_words": -1}}, "budgets.max_words"),
        ({"generators": SQUARES["generators"], "rng_seed": "x"}, "rng_seed"),
    ],
)
def test_validation_names_field(data, field):
    with pytest.raises(ValidationError) as info:
        system_from_json(data)
    assert info.value.field == field


def test_dumps_formats():
    from fractions import Fraction

    assert dumps({"b": 1, "a": 0.1}) == '{"b":1,"a":0.10000000000000001}'
    assert dumps(Fraction(2, 4)) == '"1/2"'
    assert dumps([1.0, True, None]) == "[1.0,true,null]"


# ------------------------------------------------------------- dispatch

def test_certificate_exit_codes(write, capsys):
    code, rep = report("certificate", "--system", write(SQUARES), "--max-k", "3")
    assert code == 0 and rep["results"]["certificate"]["k"] == 1
    code, rep = report("certificate", "--system", write(SHIFTED), "--max-k", "3")
    assert code == 2 and rep["status"] == "not_found"
    assert rep["results"]["bounds"]["max_k"] == 3
    code, text = run("certificate", "--system", "/nonexistent/s.json", "--max-k", "3")
    assert code == 1 and text == ""
    assert "FileNotFoundError" in capsys.readouterr().err


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as info:
        main(["certificate"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 1
    assert "usage" in capsys.readouterr().err


def test_deterministic_output(write):
    path = write(MIXED)
    argv = ["finiteness", "--system", path, "--criterion", "heightsum", "--k-max", "5"]
    a, b = run(*argv), run(*argv)
    assert a == b and a[0] == 0
    argv = ["orbit", "--system", path, "--depth", "3", "--seed", "4"]
    assert run(*argv) == run(*argv)


def test_timing_is_opt_in(write):
    _, rep = report("height", "--x", "3/2")
    assert "wall_time" not in rep
    _, rep = report("height", "--x", "3/2", "--timing")
    assert rep["wall_time"] >= 0


def test_verify_roundtrip(write):
    code, text = run("certificate", "--system", write(SQUARES), "--max-k", "2")
    rep_path = write(text, "cert.json")
    code, rep = report("verify", "--report", rep_path)
    assert code == 0 and rep["results"]["verified"]

    _, text = run("rigidity", "--A", '{"coeffs":["5/4","-1/2","1/4"]}', "--B", "1,0,0,2", "--C", "1,0,1", "--D", "0,0,0,1")
    assert json.loads(text)["results"]["witness"]["l"] == {"alpha": "2/1", "beta": "1/1"}
    _, rep = report("verify", "--report", write(text, "rig.json"))
    assert rep["results"]["checks"] == {"rigidity": True}

    _, text = run("solve-linear", "--F-i", "0,1,0,1", "--F-j", "0,4,0,1")
    assert json.loads(text)["results"]["count"] == 2
    _, rep = report("verify", "--report", write(text, "sl.json"))
    assert rep["results"]["checks"] == {"solve_linear": True}


def test_verify_detects_tampering(write):
    _, text = run("solve-linear", "--F-i", "0,1,0,1", "--F-j", "0,4,0,1")
    data = json.loads(text)
    data["results"]["solutions"][0]["a"]["alpha"] = "7/1"
    code, rep = report("verify", "--report", write(data, "bad.json"))
    assert code == 0 and rep["results"]["verified"] is False


def test_orbit_json_lines(write):
    code, text = run("orbit", "--system", write(SQUARES), "--base", "2,2", "--depth", "2")
    lines = [json.loads(l) for l in text.strip().splitlines()]
    assert code == 0
    assert [l["point"] for l in lines[:-1]] == [["2/1", "2/1"], ["4/1", "4/1"], ["16/1", "16/1"]]
    assert lines[-1]["summary"]["records"] == 3


def test_intersect_general_line(write):
    data = {"generators": [{"f": {"coeffs": ["0", "2"]}, "g": {"coeffs": ["0", "2"]}}]}
    code, text = run("intersect", "--system", write(data), "--base", "5,2", "--depth", "2", "--line", "2,1")
    lines = [json.loads(l) for l in text.strip().splitlines()]
    # X = 2Y + 1 holds at (5, 2) but not at (10, 4) or (20, 8)
    assert [l["point"] for l in lines[:-1]] == [["5/1", "2/1"]]


def test_other_subcommands(write):
    path = write(MIXED)
    code, rep = report("canonical-height", "--system", path, "--x", "2", "--seq", "main")
    assert code == 0 and abs(rep["results"]["estimate"] - 0.6931471805599453) <= rep["results"]["error_bound"] + 1e-15
    code, rep = report("monomial-equiv", "--P", "0,-3,0,1")
    assert rep["results"]["equivalent"] is False
    code, rep = report("integral-solutions", "--F", "0,0,1", "--G", "0,0,0,0,1", "--bound", "100")
    assert rep["results"]["count"] == 41
    code, rep = report("conjugate", "--system", write(SQUARES), "--l", "1,1")
    assert rep["results"]["system"]["generators"][0]["g"]["coeffs"] == ["2/1", "-2/1", "1/1"]
    code, rep = report("common-word", "--system", write({"generators": [
        {"f": {"coeffs": ["0", "0", "1"]}, "g": {"coeffs": ["0", "0", "1"]}},
        {"f": {"coeffs": ["0", "0", "0", "1"]}, "g": {"coeffs": ["0", "0", "0", "1"]}},
    ]}), "--phi", "cyc:1,2", "--psi", "cyc:2,1")
    assert code == 0 and rep["results"]["m"] == 0 and rep["results"]["k"] == 2
    code, rep = report("verify-decomposition", "--F", "0,0,0,0,1", "--G", "1,0,0,0,1", "--witness",
                       json.dumps({"E": {"coeffs": ["0", "0", "1"]}, "H": {"coeffs": ["0", "0", "1"]},
                                   "a": {"alpha": "1", "beta": "0"}, "b": {"alpha": "1", "beta": "0"},
                                   "c": {"alpha": "1", "beta": "0"}}))
    assert code == 0 and rep["results"]["verified"] is False


def test_finiteness_degree(write):
    data = {"generators": [{"f": {"coeffs": ["0", "0", "0", "1"]}, "g": {"coeffs": ["0", "0", "1"]}}], "base": {"x": "2", "y": "2"}}
    code, rep = report("finiteness", "--system", write(data), "--criterion", "degree", "--seq", "cyc:1")
    assert code == 0 and rep["results"]["report"]["stop_depth"] == 1


def test_budget_env_cap(write, monkeypatch):
    monkeypatch.setenv("ORBITLINE_BUDGET_DIGITS", "50")
    code, text = run("orbit", "--system", write(SQUARES), "--base", "2,2", "--depth", "20", "--budget-digits", "10000")
    summary = json.loads(text.strip().splitlines()[-1])["summary"]
    assert summary["truncated"] is True


def test_module_entry_point(write):
    proc = subprocess.run(
        [sys.executable, "-m", "orbitline", "height", "--x", "2"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["results"]["log_arg"] == 2
