import json
import subprocess
import sys

import pytest

from sparsezeros.cli import main
from sparsezeros.fields import field_of_size
from sparsezeros.laurent import series_field
from sparsezeros.parser import parse_poly
from sparsezeros.poly import SparsePoly

from conftest import E1


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_roots_x2_minus_x(capsys):
    code, data = run_json(capsys, "roots", "x^2 - x", "--q", "3")
    assert code == 0
    assert data["summary"]["count"] == 2 and data["summary"]["bound"] == 3 and data["summary"]["slack"] == 1
    assert sorted(r["value"] for r in data["roots"]) == ["0", "1"]


def test_roots_e1_flags_equality(capsys):
    code, data = run_json(capsys, "roots", E1, "--q", "2")
    assert code == 0 and data["schema"] == "v1"
    assert data["summary"]["count"] == 4 and data["summary"]["equality"] is True


def test_roots_text(capsys):
    code, out, _ = run(capsys, "roots", E1)
    assert code == 0 and "(equality)" in out


def test_roots_deg(capsys):
    code, data = run_json(capsys, "roots", "x^4 + x", "--deg", "2")
    assert code == 0
    assert sorted(r["degree"] for r in data["roots"]) == [1, 1, 2, 2]
    assert "completeness" in data["summary"]


def test_bound(capsys):
    code, data = run_json(capsys, "bound", "--q", "2", "--k", "2", "--d", "2")
    assert code == 0 and data["total"] == 16 and data["per_degree"] == [4, 12]


def test_polygon(capsys):
    code, data = run_json(capsys, "polygon", E1)
    assert code == 0 and data["proper"]["proper_order"] == [1, 2]
    assert [s["N"] for s in data["proper"]["segments"]] == [2, 1]


def test_oracle_negative_window(capsys):
    code, data = run_json(capsys, "oracle", E1, "--prec", "6", "--window", "-3:3")
    assert code == 0 and data["count"] == 4 and data["window"] == [-3, 3]


def test_extremal_variants(capsys):
    assert run_json(capsys, "extremal", "--basis", "1,T")[1]["count"] == 4
    code, data = run_json(capsys, "extremal", "--basis", "1,T", "--F", "q^2", "--d", "2")
    assert code == 0 and data["per_degree"] == [4, 12]
    code, data = run_json(capsys, "extremal", "--basis", "1", "--q", "3", "--F", "9", "--d", "2")
    assert code == 0 and data["count"] == 9
    code, data = run_json(capsys, "extremal", "--basis", "1,T^2", "--xe", "2")
    assert code == 0 and data["count"] == 4


def test_tree_dot_and_json(capsys):
    code, out, _ = run(capsys, "tree", E1)
    assert code == 0 and out.startswith("digraph roots {") and "->" in out
    code, data = run_json(capsys, "tree", E1)
    assert data["phi"]["T"] == [0, 1] and len(data["trees"]) == 2


def test_verify(capsys):
    code, data = run_json(capsys, "verify", E1, "--oracle-prec", "5")
    assert code == 0 and data["passed"] and data["oracle_ok"]


def test_input_sources(capsys, tmp_path):
    src = tmp_path / "f.txt"
    src.write_text(E1)
    assert run_json(capsys, "roots", "--file", str(src))[1]["summary"]["count"] == 4
    K = series_field(field_of_size(2))
    js = tmp_path / "f.json"
    js.write_text(json.dumps(parse_poly(E1, K).to_json()))
    assert run_json(capsys, "roots", "--from-json", str(js))[1]["summary"]["count"] == 4
    code, _, err = run(capsys, "roots", E1, "--file", str(src))
    assert code == 1 and "exactly one input" in err


def test_json_round_trips_through_schema(capsys, tmp_path):
    code, data = run_json(capsys, "roots", "x^3 + g*x + T", "--q", "4")
    K = series_field(field_of_size(4))
    assert str(parse_poly(data["poly"], K)) == data["poly"]
    assert SparsePoly.from_json(parse_poly(data["poly"], K).to_json()) == parse_poly(data["poly"], K)


@pytest.mark.parametrize(
    "argv",
    [
        ["roots", "x^2 +* x"],
        ["roots"],
        ["roots", "x", "--q", "6"],
        ["roots", "x", "--q", "4", "--p", "3"],
        ["frobnicate"],
        ["oracle", "x", "--window", "3:1"],
        ["roots", "x + x"],
        ["roots", "x", "--prec", "0"],
    ],
)
def test_usage_errors_exit_1(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_cap_exits_3(capsys, monkeypatch):
    monkeypatch.setenv("SPARSEZEROS_MAX_ENUM", "10")
    assert run(capsys, "oracle", E1, "--prec", "6")[0] == 3


def test_campaign(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"q": 2, "samples": 15, "seed": 5, "inject": [E1]}))
    code, data = run_json(capsys, "campaign", "--config", str(cfg), "--out", str(tmp_path / "rep"))
    assert code == 0 and data["passed"]
    assert (tmp_path / "rep" / "run0-q2" / "summary.csv").exists()


def test_failed_check_exits_2_with_reproducer(capsys, tmp_path, monkeypatch):
    from sparsezeros import cli

    def fake(*a, **kw):
        return {"count": 1, "bound": 2, "tree": {}, "distance_centers": 0, "phi_ok": None, "oracle_ok": None,
                "violations": ["injected"], "passed": False}

    monkeypatch.setattr(cli, "verify_instance", fake)
    code, out, err = run(capsys, "verify", "x + T", "--out", str(tmp_path))
    assert code == 2 and "reproducer" in err
    (repro,) = tmp_path.glob("repro-*.txt")
    assert "x + T" in repro.read_text()


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sparsezeros.cli", "bound", "--q", "3", "--k", "1", "--d", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "total = 9" in proc.stdout
