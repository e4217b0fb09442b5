import json

import pytest

from pilab.cli import main
from pilab.radix import read_digit_file


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_construct_primes_stdout(capsys):
    code, out, _ = run(capsys, "construct", "--family", "primes", "--digits", "30")
    assert code == 0
    assert out.strip() == "235711131719232931374143475359"


def test_construct_stoneham_stdout(capsys):
    code, out, _ = run(capsys, "construct", "--family", "stoneham", "--b", "2", "--c", "3",
                       "--digits", "12")
    assert code == 0
    assert out.strip() == "000010101011"


def test_order_stdout(capsys):
    code, out, _ = run(capsys, "order", "--g", "10", "--m", "7")
    assert code == 0
    assert out.strip() == "6"


def test_constants_stdout(capsys):
    code, out, _ = run(capsys, "constants", "--name", "pi", "--digits", "20")
    assert code == 0
    assert out.strip() == "3.14159265358979323846"


def test_constants_digit_file_and_manifest(tmp_path, capsys):
    out_file = tmp_path / "pi.digits"
    code, _, _ = run(capsys, "constants", "--name", "pi", "--digits", "200",
                     "--out", str(out_file))
    assert code == 0
    stream = read_digit_file(out_file)
    assert stream.length == 200
    assert stream.label == "pi"
    manifest = json.loads((tmp_path / "pi.digits.manifest.json").read_text())
    assert manifest["subcommand"] == "constants"
    assert manifest["params"]["digits"] == 200
    assert manifest["outputs"] == [str(out_file)]
    assert "generated_at" in manifest


def test_cf_json(capsys):
    code, out, _ = run(capsys, "cf", "--const", "pi", "--depth", "4")
    assert code == 0
    payload = json.loads(out)
    assert payload["convergents"][1] == {"k": 1, "a": "7", "p": "22", "q": "7"}
    assert payload["convergents"][4]["q"] == "33102"


def test_audit_case_two_failing_rows_exit_zero(tmp_path, capsys):
    out_file = tmp_path / "audit.json"
    code, _, _ = run(capsys, "audit", "--lemma", "caseII", "--k", "1", "--mu", "2",
                     "--out", str(out_file))
    assert code == 0  # failing rows are findings, not errors
    payload = json.loads(out_file.read_text())
    assert payload["lemma"] == "caseII"
    assert payload["q"] == "7"
    assert any(not row["pass"] for row in payload["rows"])
    assert "/" in payload["rows"][0]["margin_lower"]


def test_audit_reports_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, _, _ = run(capsys, "audit", "--lemma", "caseI", "--k", "2", "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_audit_prime_report(capsys):
    code, out, _ = run(capsys, "audit", "--lemma", "prime", "--k", "2", "--nmax", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["q"] == "107"
    assert payload["rows"][0]["case"] == "I"
    assert "scaled_lower" in payload["rows"][0]


def test_coset_json(capsys):
    code, out, _ = run(capsys, "coset", "--k", "1")
    assert code == 0
    payload = json.loads(out)
    assert payload["hypothesis_ok"] is True
    assert payload["h_equals_subgroup"] is True
    assert payload["g_elements"] == [1, 2, 3, 4, 5, 6]


def test_artin_csv(tmp_path, capsys):
    csv_path = tmp_path / "artin.csv"
    code, out, _ = run(capsys, "artin", "--limit", "300", "--csv", str(csv_path))
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "q,ord,is_artin"
    assert lines[1] == "3,1,false"
    assert "7,6,true" in lines
    payload = json.loads(out)
    assert payload["count_artin"] <= payload["count_primes"]
    assert (tmp_path / "artin.csv.manifest.json").exists()


def test_weyl_points_file(tmp_path, capsys):
    pts = tmp_path / "points.txt"
    golden = (1 + 5**0.5) / 2
    pts.write_text("\n".join(str((n * golden) % 1.0) for n in range(1, 2001)) + "\n")
    code, out, _ = run(capsys, "weyl", "--points", str(pts), "--m", "1,2")
    assert code == 0
    payload = json.loads(out)
    assert payload["n_points"] == 2000
    assert float(payload["rows"][0]["magnitude"]) < 0.01


def test_normality_report(tmp_path, capsys):
    digits_file = tmp_path / "champ.digits"
    code, _, _ = run(capsys, "construct", "--family", "integers", "--digits", "5000",
                     "--out", str(digits_file))
    assert code == 0
    code, out, _ = run(capsys, "normality", "--in", str(digits_file), "--N", "5000",
                       "--kmax", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["blocks"]["1"]["windows"] == 5000
    assert payload["blocks"]["2"]["windows"] == 4999
    assert float(payload["blocks"]["1"]["max_abs_dev"]) < 0.15


def test_expsum_json(capsys):
    code, out, _ = run(capsys, "expsum", "--p", "31", "--g", "10", "--c", "0.5")
    assert code == 0
    payload = json.loads(out)
    assert payload["order"] == 15
    assert float(payload["max_magnitude"]) == pytest.approx(2.8284271247461903, rel=1e-9)


def test_report_wall_criterion(tmp_path, capsys):
    digits_file = tmp_path / "champ.digits"
    run(capsys, "construct", "--family", "integers", "--digits", "1100", "--out", str(digits_file))
    out_file = tmp_path / "wall.json"
    code, _, _ = run(capsys, "report", "--in", str(digits_file), "--N", "1000",
                     "--kmax", "2", "--mmax", "3", "--out", str(out_file))
    assert code == 0
    payload = json.loads(out_file.read_text())
    assert payload["n_points"] == 1000
    assert len(payload["weyl"]) == 3
    assert "star_discrepancy" in payload
    manifest = json.loads((tmp_path / "wall.json.manifest.json").read_text())
    assert str(digits_file) in manifest["inputs"]
    assert manifest["inputs"][str(digits_file)].startswith("sha256:")


def test_report_on_pi_stream(capsys):
    code, out, _ = run(capsys, "report", "--const", "pi", "--N", "500", "--kmax", "1",
                       "--mmax", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["label"] == "pi"
    assert payload["blocks"]["1"]["windows"] == 500


def test_artin_threads_flag(tmp_path, capsys):
    code1, out1, _ = run(capsys, "artin", "--limit", "2000", "--threads", "1")
    code4, out4, _ = run(capsys, "artin", "--limit", "2000", "--threads", "4")
    assert code1 == code4 == 0
    assert out1 == out4


def test_report_byte_identical(tmp_path, capsys):
    digits_file = tmp_path / "champ.digits"
    run(capsys, "construct", "--family", "integers", "--digits", "1100", "--out", str(digits_file))
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, _, _ = run(capsys, "report", "--in", str(digits_file), "--N", "1000",
                         "--kmax", "1", "--mmax", "2", "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_domain_error_exit_one(capsys):
    code, _, err = run(capsys, "order", "--g", "10", "--m", "106")
    assert code == 1
    assert "not a unit" in err


def test_stoneham_gcd_error_exit_one(capsys):
    code, _, err = run(capsys, "construct", "--family", "stoneham", "--b", "10", "--c", "2",
                       "--digits", "10")
    assert code == 1
    assert "gcd" in err


def test_usage_error_exit_two(capsys):
    code, _, _ = run(capsys, "order", "--g", "10", "--m", "7", "--bogus-flag")
    assert code == 2
    code, _, _ = run(capsys, "no-such-command")
    assert code == 2


def test_help_texts_exist(capsys):
    for sub in ("constants", "construct", "cf", "audit", "order", "coset", "artin",
                "weyl", "normality", "expsum", "report"):
        code, out, _ = run(capsys, sub, "--help")
        assert code == 0
        assert "usage" in out.lower()
