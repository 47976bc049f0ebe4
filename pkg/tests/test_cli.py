import json

import pytest

import cm_fixtures
from mahler3.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_run_single_id_json(capsys):
    code, out, _ = run(capsys, "verify", "run", "--id", "R1", "--digits", "25", "--json", "-", "--no-timing")
    assert code == 0
    report = json.loads(out.strip().splitlines()[-1])
    assert report["id"] == "R1" and report["status"] == "verified" and report["runtime_ms"] == 0


def test_verify_run_filter(capsys):
    code, out, _ = run(capsys, "verify", "run", "--filter", "svalue")
    assert code == 0 and out.count("verified") == 10


def test_conjectural_skip_exits_zero(capsys):
    code, out, err = run(capsys, "verify", "run", "--filter", "conjectural")
    assert code == 0 and out.count("conditional-skipped") == 5 and "warning" in err


def test_conjectural_with_coefficient_file(capsys, tmp_path):
    path = tmp_path / "g32.txt"
    cm_fixtures.write("g32", path)
    code, out, _ = run(capsys, "verify", "run", "--id", "S4-f2m64", "--coeff-file", str(path))
    assert code == 0 and "verified" in out


def test_usage_errors_exit_two(capsys, tmp_path):
    assert run(capsys, "verify", "run", "--id", "NOPE")[0] == 2
    assert run(capsys, "verify", "run", "--filter", "nope")[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("# g32 32 3 -8 1\n1 3\n")
    code, _, err = run(capsys, "verify", "run", "--id", "S4-f2m64", "--coeff-file", str(bad))
    assert code == 2 and "bad.txt:2:" in err
    assert run(capsys, "eval", "--quantity", "L3", "--args", "zz")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["eval", "--quantity", "nope"])
    assert info.value.code == 2


def test_domain_error_exits_one(capsys):
    code, _, err = run(capsys, "eval", "--quantity", "f2", "--args", "10")
    assert code == 1 and "error" in err
    assert run(capsys, "eval", "--quantity", "qk", "--args", "4")[0] == 1


def test_eval_quantities(capsys):
    code, out, err = run(capsys, "eval", "--quantity", "dirichlet", "--args", "-4", "2", "--digits", "20")
    assert code == 0 and out.strip() == "0.91596559417721901505"
    assert "hurwitz" in err
    code, out, _ = run(capsys, "eval", "--quantity", "s2", "--args", "tau=1/2", "--digits", "20")
    assert code == 0 and float(out) == pytest.approx(64)
    code, out, _ = run(capsys, "eval", "--quantity", "pfq", "--args", "1,1,1", "2,2", "1", "--digits", "8")
    assert code == 0 and float(out) == pytest.approx(1.6449340668, rel=1e-7)


def test_coeffs_export(capsys, tmp_path):
    code, out, _ = run(capsys, "coeffs", "--form", "h", "--count", "9")
    assert code == 0
    assert out.splitlines()[0] == "# h 16 3 -4 1"
    assert out.splitlines()[5] == "5 -6"
    assert run(capsys, "coeffs", "--form", "nope", "--count", "9")[0] == 2


def test_list(capsys):
    code, out, _ = run(capsys, "verify", "list")
    assert code == 0 and "A614656" in out and "S4-f4m82944" in out


def test_integrate(capsys):
    code, out, _ = run(capsys, "integrate", "--family", "smyth", "--samples", "100000", "--seed", "2")
    data = json.loads(out)
    assert code == 0 and abs(data["value"] - 0.3230659472) < 1e-3
