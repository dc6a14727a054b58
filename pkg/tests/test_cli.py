import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from qads.cli import main
from qads.cyclo import make_field, qnum
from qads.report import emit_report, render_csv, render_json, scalar_to_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_params(capsys):
    code, out, _ = run(capsys, "params", "--D", "3", "--M", "6")
    d = json.loads(out)
    assert code == 0
    assert d["M_S"] == 6 and d["k_S"] == "11/2"
    assert d["compact_window"] == [0, 1, 2, 3, 4, 5]
    assert d["ads_window"] == [6, 7, 8, 9, 10, 11]


def test_parity_error_exit_code(capsys):
    code, out, err = run(capsys, "params", "--D", "4", "--M", "9")
    assert code == 2 and out == ""
    e = json.loads(err)
    assert e["error"] == "ParameterError"
    assert "D even requires M even" in e["message"]


@pytest.mark.parametrize(
    "argv",
    [
        ["scan", "--D", "2", "--M", "8"],
        ["scan", "--D", "2", "--M", "8", "--n-range", "a..b"],
        ["level", "--D", "3", "--M", "8", "--n", "-1"],
        ["bogus"],
        ["gram", "--D", "3", "--M", "8", "--n", "2", "--form", "other"],
        ["params", "--D", "3", "--M", "8", "--R-sq", "-1"],
    ],
)
def test_bad_arguments_are_structured(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert json.loads(err)["error"] == "ParameterError"


def test_resource_error(capsys):
    code, _, err = run(capsys, "level", "--D", "3", "--M", "8", "--n", "6", "--budget", "1000")
    assert code == 3
    e = json.loads(err)
    assert e["error"] == "ResourceError" and e["needed"] == 4096


def test_sink_error(capsys, tmp_path):
    code, _, err = run(capsys, "params", "--D", "2", "--M", "8", "--output-path", str(tmp_path / "no" / "x.json"))
    assert code == 5
    assert json.loads(err)["error"] == "SinkError"


def test_scan_json_and_csv_agree(capsys):
    code, out, _ = run(capsys, "scan", "--D", "4", "--M", "10", "--form", "compact", "--n-range", "0..4")
    rows = json.loads(out)["rows"]
    assert code == 0 and [r["n"] for r in rows] == [0, 1, 2, 3, 4]
    assert all(r["verdict"] == "positive-definite" for r in rows[:4])
    code, out, _ = run(capsys, "scan", "--D", "4", "--M", "10", "--n-range", "0..4", "--output", "csv")
    table = list(csv.DictReader(io.StringIO(out)))
    assert len(table) == len(rows)
    assert [int(r["dim_level"]) for r in table] == [r["dim_level"] for r in rows]


def test_empty_scan_has_header(capsys):
    code, out, _ = run(capsys, "scan", "--D", "2", "--M", "8", "--n-range", "3..2", "--output", "csv")
    assert code == 0
    assert out.splitlines() == ["n,dim_level,dim_cyclic,verdict,E_min,witness_index,dim_quotient,quotient_verdict,E_min_quotient,skipped"]
    code, out, _ = run(capsys, "scan", "--D", "2", "--M", "8", "--n-range", "3..2")
    assert json.loads(out)["rows"] == []


def test_output_file(capsys, tmp_path):
    p = tmp_path / "scan.json"
    code, out, _ = run(capsys, "scan", "--D", "2", "--M", "6", "--n-range", "0..3", "--output-path", str(p))
    assert code == 0 and out == ""
    assert len(json.loads(p.read_text())["rows"]) == 4


@pytest.mark.parametrize(
    "argv",
    [
        ["rmatrix", "--D", "2", "--M", "8"],
        ["level", "--D", "3", "--M", "8", "--n", "3"],
        ["gram", "--D", "3", "--M", "8", "--n", "2", "--form", "ads"],
        ["sectors", "--D", "2", "--M", "8", "--n-max", "8"],
        ["hilbert", "--D", "2", "--M", "8", "--output", "csv"],
        ["adjoints", "--D", "2", "--M", "8", "--n-max", "3"],
    ],
)
def test_commands_run_and_are_deterministic(capsys, argv):
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2 and out1


def test_rmatrix_report(capsys):
    _, out, _ = run(capsys, "rmatrix", "--D", "3", "--M", "6")
    d = json.loads(out)
    assert d["residuals"] == {"braid": [], "projectors": [], "metric": []}
    assert d["projector_ranks"] == [9, 6, 1]


def test_hilbert_claim_needs_budget(capsys):
    code, _, err = run(capsys, "hilbert", "--D", "3", "--M", "6")
    assert code == 3
    code, out, _ = run(capsys, "hilbert", "--D", "3", "--M", "6", "--budget", "100000000")
    assert code == 0
    assert [e["dimension"] for e in json.loads(out)["entries"]] == [1, 4, 9, 16, 25, 36]


def test_adjoints_precondition(capsys):
    code, _, err = run(capsys, "adjoints", "--D", "2", "--M", "8", "--n-max", "5")
    assert code == 2


def test_scalar_serialization():
    F = make_field(8)
    d = scalar_to_json(qnum(2, F))
    assert d["conductor"] == 16
    assert [Fraction(c) for c in d["coeffs"]] == qnum(2, F).coeffs()
    assert d["approx"].startswith("1.847759065022573512")
    z = scalar_to_json(F.zeta)
    assert z["approx"].endswith("j") and "+" in z["approx"]


def test_json_round_trip():
    F = make_field(6)
    report = {"a": [1, "x", None, True], "b": {"c": Fraction(3, 4)}, "q": F.zeta}
    text = render_json(report)
    assert json.loads(text) == json.loads(render_json(json.loads(text)))
    assert json.loads(text)["b"]["c"] == "3/4"


def test_csv_drops_nested_columns():
    text = render_csv({"rows": [{"n": 0, "nested": {"x": 1}, "v": "a"}]})
    assert text.splitlines() == ["n,v", "0,a"]


def test_emit_to_file_object():
    buf = io.StringIO()
    emit_report({"x": 1}, "json", buf)
    assert json.loads(buf.getvalue()) == {"x": 1}


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qads", "params", "--D", "2", "--M", "6"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["M_S"] == 3


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0
    assert "FAIL" not in out
    code2, out2, _ = run(capsys, "selftest")
    assert out == out2
