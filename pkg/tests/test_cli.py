import io
import json

import gmpy2
import pytest
from gmpy2 import mpfr

from kissingpoly import __version__
from kissingpoly.cli import run
from kissingpoly.numerics import workprec


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_hankel_example():
    code, out, _ = call("hankel", "--n", "1", "--omega", "0")
    assert code == 0
    doc = json.loads(out)
    assert doc["h"].startswith("1.333333333333")
    assert len(doc["h"].replace(".", "")) == 78
    prov = doc["provenance"]
    assert prov["version"] == __version__ and prov["bits"] == 256 and prov["flags"]["n"] == 1
    assert list(doc)[0] == "provenance"


def test_hankel_derivative_and_complex_serialization():
    code, out, _ = call("--bits", "128", "hankel", "--n", "2", "--omega", "3,0.5", "--deriv", "1")
    doc = json.loads(out)
    assert code == 0 and isinstance(doc["h"], list) and len(doc["h"]) == 2
    assert doc["derivative"]["order"] == 1
    assert len(doc["h"][0].lstrip("-").replace("0.", "", 1).replace(".", "")) >= 39


def test_global_flags_after_subcommand():
    code, out, _ = call("hankel", "--n", "0", "--omega", "1", "--bits", "64")
    assert code == 0 and json.loads(out)["provenance"]["bits"] == 64


def test_scan_example_csv():
    code, out, _ = call("scan", "--n", "0", "--range", "1:10", "--grid", "1000")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# kissingpoly " + __version__) and "bits=256" in lines[0]
    assert lines[2] == "omega,suspected_double,residual"
    vals = [mpfr(l.split(",")[0], 256) for l in lines[3:]]
    with workprec(256):
        pi = gmpy2.const_pi()
        assert all(abs(v - k * pi) < mpfr("1e-25") for k, v in zip((1, 2, 3), vals))
    assert len(vals) == 3


def test_verify_toda_exit_zero():
    code, out, err = call("verify", "--suite", "toda", "--tol", "1e-20")
    assert code == 0 and "PASS criterion 2" in err
    assert json.loads(out)["passed"] is True


def test_verify_failure_exit_two():
    # an impossible tolerance must make the suite fail
    code, _, err = call("verify", "--suite", "heine", "--tol", "1e-300")
    assert code == 2 and "FAIL criterion 3" in err


def test_usage_errors_name_the_flag():
    code, _, err = call("hankel", "--n", "x", "--omega", "1")
    assert code == 1 and "--n" in err
    code, _, err = call("scan", "--n", "0", "--range", "5:1")
    assert code == 1 and "--range" in err
    code, _, err = call("--bits", "10", "hankel", "--n", "1", "--omega", "1")
    assert code == 1 and "--bits" in err
    code, _, err = call("frobnicate")
    assert code == 1


def test_compute_error_names_class():
    code, _, err = call("oracle", "--n", "6", "--omega", "1")
    assert code == 1 and "CostCapExceeded" in err
    code, _, err = call("poly", "--n", "1", "--omega", "3.14159265358979323846264338327950288419716939937510582097494459")
    assert code == 1 and "NearSingular" in err


def test_trajectory_file_and_determinism(tmp_path):
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["trajectory", "--n", "3", "--omega-range", "0:2", "--steps", "4", "--bits", "128", "--threads", "1"]
    assert call(*args, "--out", str(f1))[0] == 0
    assert call(*args, "--out", str(f2))[0] == 0
    a, b = f1.read_bytes(), f2.read_bytes()
    assert a == b
    lines = a.decode().splitlines()
    assert lines[0].startswith("# kissingpoly") and lines[2] == "omega,root_index,re,im,exists_flag"
    assert len(lines) == 3 + 5 * 3


def test_threads_environment_mirror(monkeypatch):
    monkeypatch.setenv("KP_THREADS", "3")
    code, out, _ = call("hankel", "--n", "0", "--omega", "1")
    assert json.loads(out)["provenance"]["threads"] == 3
    monkeypatch.setenv("KP_THREADS", "zero")
    code, _, err = call("hankel", "--n", "0", "--omega", "1")
    assert code == 1 and "KP_THREADS" in err


def test_threads_do_not_change_output():
    a = call("scan", "--n", "2", "--range", "5:13", "--grid", "400", "--threads", "1")[1]
    b = call("scan", "--n", "2", "--range", "5:13", "--grid", "400", "--threads", "2")[1]
    strip = lambda s: [l for l in s.splitlines() if not l.startswith("#")]
    assert strip(a) == strip(b)


@pytest.mark.parametrize("argv", [
    ["moments", "--n", "3", "--omega", "2"],
    ["poly", "--n", "2", "--omega", "1", "--tilde", "--eval", "0.5,0.1"],
    ["recurrence", "--m", "3", "--omega", "1"],
    ["peel", "--parity", "odd", "--N", "1", "--k", "0", "--refine"],
    ["kissing", "--N", "1", "--range", "5:10"],
    ["oracle", "--n", "2", "--omega", "1", "--order", "40", "--eval", "0.2,0.1"],
    ["zeros", "--n", "1", "--quadrant"],
    ["zeros", "--n", "2", "--refine-from", "grid", "--grid", "4", "--re-range", "4:10", "--im-range", "0:5"],
])
def test_subcommands_run(argv):
    for fmt in ("json", "csv"):
        code, out, err = call(*argv, "--bits", "128", "--format", fmt)
        assert code == 0, err
        if fmt == "json":
            assert "provenance" in json.loads(out)
        else:
            assert out.startswith("# kissingpoly")


def test_recurrence_values():
    doc = json.loads(call("recurrence", "--m", "2", "--omega", "1")[1])
    assert doc["beta"][0][0].startswith("0.41228292743739")


def test_zeros_mirror_images():
    q = json.loads(call("zeros", "--n", "1", "--quadrant", "--bits", "128")[1])["zeros"]
    full = json.loads(call("zeros", "--n", "1", "--bits", "128")[1])["zeros"]
    assert len(full) == 4 * len(q)
