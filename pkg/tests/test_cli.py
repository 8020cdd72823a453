import json
import math

import pytest

from sqfullrep.cli import main, parse_int
from sqfullrep.campaign import FIELDS, parse_report


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_int():
    assert parse_int("1e9") == 10 ** 9
    assert parse_int("123") == 123
    with pytest.raises(Exception):
        parse_int("1.5")


def test_constants(capsys):
    code, out, _ = run(capsys, "constants")
    d = json.loads(out)
    assert code == 0
    assert d["zeta_2"] == pytest.approx(math.pi ** 2 / 6, rel=1e-15)
    assert len(d["fingerprint"]) == 12


def test_sieve_primes_and_theta(capsys):
    code, out, _ = run(capsys, "sieve", "--lo", "1e6", "--hi", "1000100")
    assert code == 0
    assert out.split() == ["1000003", "1000033", "1000037", "1000039", "1000081", "1000099"]
    code, out, _ = run(capsys, "sieve", "--lo", "1", "--hi", "10", "--emit", "theta")
    assert json.loads(out) == pytest.approx(math.log(210), rel=1e-15)
    code, out, _ = run(capsys, "--format", "json", "sieve", "--lo", "0", "--hi", "10")
    assert json.loads(out) == [2, 3, 5, 7]


def test_sieve_bad_range(capsys):
    code, _, err = run(capsys, "sieve", "--lo", "10", "--hi", "5")
    assert code == 2 and "error" in err


def test_squarefull_commands(capsys):
    code, out, _ = run(capsys, "squarefull", "list", "--hi", "10")
    assert code == 0
    assert out.splitlines() == ["f,a,b", "1,1,1", "4,2,1", "8,1,2", "9,3,1"]
    _, out, _ = run(capsys, "squarefull", "count", "--x", "100", "--B", "1")
    assert json.loads(out) == 10
    _, out, _ = run(capsys, "squarefull", "decompose", "--f", "128", "--format", "json")
    assert json.loads(out) == [{"f": 128, "a": 4, "b": 2}]
    code, _, err = run(capsys, "squarefull", "decompose", "--f", "12")
    assert code == 2 and "12" in err


def test_repr_point_and_interval(capsys):
    _, out, _ = run(capsys, "repr", "--N", "10")
    d = json.loads(out)
    assert d["value"] == pytest.approx(math.log(6), rel=1e-15) and d["term_count"] == 2
    code, out, _ = run(capsys, "repr", "--X", "1e4", "--H", "100", "--route", "both")
    d = json.loads(out)
    assert code == 0 and d["route_delta"] <= 1e-9
    code, _, _ = run(capsys, "repr", "--X", "10", "--H", "0")
    assert code == 2
    code, _, _ = run(capsys, "repr")
    assert code == 2


def test_asym_commands(capsys):
    _, out, _ = run(capsys, "asym", "main-term", "--X", "1e6", "--H", "1000")
    d = json.loads(out)
    assert d["main_term"] == pytest.approx(2.17325e6, rel=1e-5) and d["admissible"] is False
    _, out, _ = run(capsys, "asym", "qx-fit", "--x-grid", "1e4,1e6")
    lines = out.splitlines()
    assert lines[0].startswith("x_or_X,predicted,actual") and len(lines) == 3
    _, out, _ = run(capsys, "asym", "window-fit", "--x", "1e8")
    assert out.splitlines()[1].split(",")[2] == "41"
    _, out, _ = run(capsys, "asym", "sigma", "--X", "1e6", "--H", "1000", "--B", "16")
    rec = dict(zip(*[line.split(",") for line in out.splitlines()]))
    assert float(rec["sigma2"]) == 1867000
    _, out, _ = run(capsys, "asym", "meanvalue", "--X", "1e5", "--H", "100", "--samples", "10", "--seed", "3")
    _, out2, _ = run(capsys, "asym", "meanvalue", "--X", "1e5", "--H", "100", "--samples", "10", "--seed", "3",
                     "--threads", "2")
    assert out == out2


def test_verify_csv_and_json(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--x-grid", "1e5")
    assert code == 0
    assert out.splitlines()[0] == ",".join(FIELDS)
    path = tmp_path / "r.json"
    code, out, err = run(capsys, "--format", "json", "--out", str(path), "verify", "--x-grid", "1e5",
                         "--metadata")
    assert code == 0 and out == ""
    rows = parse_report(path.read_text(), "json")
    assert rows[0].X == 10 ** 5
    assert json.loads(err)["second_term_variant"] == "zeta2_denominator"


def test_verify_empty_grid(capsys):
    code, out, _ = run(capsys, "verify", "--x-grid", "")
    assert code == 0 and out == ",".join(FIELDS) + "\n"


def test_verify_fixed_B(capsys):
    code, out, _ = run(capsys, "verify", "--x-grid", "1e5", "--B-rule", "fixed:8")
    assert code == 0 and parse_report(out)[0].B == 8.0


@pytest.mark.parametrize("argv", [
    ["verify", "--x-grid", "10"],
    ["verify", "--x-grid", "1e5", "--h-exponent", "1.5"],
    ["verify", "--x-grid", "1e5", "--B-rule", "fixed"],
    ["verify", "--x-grid", "1e5", "--B-rule", "cubic"],
    ["verify"],
    ["nonsense"],
])
def test_config_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_row_failure_exit_1(capsys, monkeypatch):
    from sqfullrep import campaign

    def boom(*a, **k):
        raise MemoryError("no room")

    monkeypatch.setattr(campaign, "interval_sum_rearranged", boom)
    code, out, _ = run(capsys, "verify", "--x-grid", "1e5")
    assert code == 1 and "error:MemoryError" in out


def test_unwritable_out_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "--out", str(tmp_path / "nope" / "x.csv"), "constants")
    assert code == 2 and "nope" in err


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == 0
