import json
import subprocess
import sys

import pytest

from superalg.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 8 and lines[0].startswith("harmonic-isotropic")


def test_analyze_kepler(capsys):
    code, out, _ = run(capsys, "analyze", "kepler")
    assert code == 0
    d = json.loads(out)
    assert d["k2"] == "1"
    assert d["degree_label"] == "quadratic"
    assert {(r["i"], r["j"]) for r in d["G"]} == {(0, 0), (1, 2)}
    assert {(r["i"], r["j"], r["coeff"]) for r in d["bracketAB"]} == {(1, 1, "-2")}


def test_analyze_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "analyze", "post-winternitz", "--seed", "7", "--json", str(a))[0] == 0
    assert run(capsys, "analyze", "post-winternitz", "--seed", "7", "--json", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("SUPERALG_SEED", "3")
    _, from_env, _ = run(capsys, "analyze", "holt")
    _, explicit, _ = run(capsys, "analyze", "holt", "--seed", "3")
    assert from_env == explicit
    monkeypatch.setenv("SUPERALG_SEED", "three")
    assert run(capsys, "analyze", "holt")[0] == 2


def test_analyze_with_parameter(capsys):
    code, out, _ = run(capsys, "analyze", "holt", "--param", "delta=2")
    assert code == 0
    coeffs = {(r["i"], r["j"]): r["coeff"] for r in json.loads(out)["bracketAB"]}
    assert coeffs[(0, 0)] == "512"


def test_analyze_json_file(capsys, tmp_path):
    doc = {
        "name": "oscillator",
        "parameters": [],
        "hamiltonian": "(px^2 + py^2)/2 + (x^2 + y^2)/2",
        "L": "x*py - y*px",
        "A": "px*py + x*y",
        "domain": [],
    }
    path = tmp_path / "osc.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "analyze", str(path))
    assert code == 0 and json.loads(out)["degree_label"] == "linear"


def test_analyze_rejects_bad_document(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "bad", "hamiltonian": "px^2", "L": "x", "A": "y", "domain": []}))
    code, _, err = run(capsys, "analyze", str(path))
    assert code == 2 and "not an integral" in err


def test_unknown_system_is_usage_error(capsys):
    assert run(capsys, "analyze", "pendulum")[0] == 2


def test_validate_all(capsys):
    code, out, _ = run(capsys, "validate", "--all")
    assert code == 0
    assert out.count("PASS") == 8


def test_validate_reports_mismatch(capsys, tmp_path):
    from superalg.catalog import builtin_document

    doc = builtin_document("holt")
    doc["expected"] = dict(doc["expected"], k2="31")
    path = tmp_path / "holt.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "validate", str(path))
    assert code == 1
    assert "k2: expected 31, derived 32" in out


def test_trace_svg(capsys):
    code, out, err = run(capsys, "trace", "harmonic-isotropic", "--constants", "10,2,3")
    assert code == 0
    assert out.startswith("<svg") and "<path" in out
    assert "connected components" in err


def test_trace_csv_negative_constants(capsys):
    code, out, _ = run(capsys, "trace", "kepler", "--constants", "-1/10,0,1/10",
                       "--window", "-12,12,-12,12", "--csv", "-")
    assert code == 0
    assert out.splitlines()[0] == "curve_id,vertex_index,x,y,residual"


def test_trace_is_byte_identical(capsys):
    argv = ("trace", "holt", "--constants", "4,2,2", "--csv", "-")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


@pytest.mark.parametrize("argv", [
    ("trace", "harmonic-isotropic", "--constants", "1,2"),
    ("trace", "harmonic-isotropic", "--constants", "1,1,0", "--window", "1,0,0,1"),
    ("trace", "harmonic-isotropic", "--constants", "1,1,0", "--grid", "4"),
    ("integrate", "holt", "--ic", "1,0,0", "--t-end", "1", "--dt", "0.01"),
    ("integrate", "curved-oscillator", "--ic", "1,0,0,1", "--t-end", "1", "--dt", "0.01",
     "--method", "leapfrog"),
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


def test_eliminate(capsys, tmp_path):
    out = tmp_path / "eq.txt"
    code, _, _ = run(capsys, "eliminate", "harmonic-isotropic", "--constants", "1,1,0", "--out", str(out))
    assert code == 0 and out.read_text().endswith("= 0\n")


def test_eliminate_failure_exit_1(capsys):
    code, _, err = run(capsys, "eliminate", "trig-momentum", "--constants", "1/2,1,1/3")
    assert code == 1 and "NotEliminable" in err


def test_integrate(capsys, tmp_path):
    csv_path = tmp_path / "t.csv"
    code, out, _ = run(capsys, "integrate", "kepler", "--ic", "1,0,0,1", "--t-end", "5", "--dt", "0.001",
                       "--csv", str(csv_path))
    assert code == 0
    assert "H=-0.5" in out
    assert csv_path.read_text().startswith("t,x,y,px,py,H,L,A")


def test_integrate_singularity_exit_1(capsys):
    code, _, err = run(capsys, "integrate", "holt", "--param", "delta=0", "--ic", "1,0,-2,0",
                       "--t-end", "5", "--dt", "0.001")
    assert code == 1 and "SingularityError" in err


def test_console_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "superalg", "list"], capture_output=True, text=True)
    assert r.returncode == 0 and "kepler" in r.stdout
