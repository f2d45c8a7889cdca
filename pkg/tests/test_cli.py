import io
import subprocess
import sys

import pytest

from subshift.cli import main
from subshift.specfile import bundled_spec_path


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def spec(name):
    return bundled_spec_path(name)


def test_count_full_shift():
    code, out, _ = run("count", "--spec", spec("full2"), "--n", 9)
    assert code == 0
    assert out == "n,box_size,count,rate\n9,10,1024,1.000000000000\n"


def test_count_golden_rows():
    code, out, _ = run("count", "--spec", spec("golden_mean"), "--n", 0, 18)
    assert out.splitlines()[1:] == ["0,1,2,1.000000000000", "18,19,10946,0.706216639011"]


def test_empty_subshift_exit_3():
    code, out, err = run("entropy", "--spec", spec("empty"))
    assert code == 3
    assert err == "error: empty subshift\n"


def test_parse_error_exit_2(tmp_path):
    bad = tmp_path / "bad.sft"
    bad.write_text("alphabet: 0 1\ngroup: Z\ndimension: 2\nforbidden:\n(0,0)=2\n")
    code, _, err = run("count", "--spec", bad, "--n", 1)
    assert code == 2
    assert err.startswith("error: line 5, column 1:")
    code, _, err = run("count", "--spec", tmp_path / "missing.sft", "--n", 1)
    assert code == 2 and err.startswith("error:")


def test_usage_error_exit_1():
    assert run("frobnicate")[0] == 1
    assert run("count", "--spec", spec("full2"))[0] == 1
    assert run("sample", "--spec", spec("full2"), "--length", 3, "--seed", -1)[0] == 1


def test_entropy_golden():
    code, out, _ = run("entropy", "--spec", spec("golden_mean"), "--nmax", 6)
    assert code == 0
    tables = out.split("\n\n")
    assert tables[0].splitlines()[0] == "n,box_size,count,rate"
    assert len(tables[0].splitlines()) == 8
    assert tables[-1] == "quantity,value\nentropy_exact,0.694241913631\n"


def test_entropy_hard_squares_bracket():
    code, out, _ = run("entropy", "--spec", spec("hard_squares"), "--nmax", 1, "--widths", "1..3")
    assert code == 0
    last = out.split("\n\n")[-1].splitlines()
    assert last[0] == "width,lower,upper" and len(last) == 4


def test_dim_and_sample():
    code, out, _ = run("dim", "--spec", spec("golden_mean"), "--step", 0.01)
    assert code == 0
    assert "dim_lower,0.690000000000" in out and "dim_upper,0.700000000000" in out
    code, out, _ = run("sample", "--spec", spec("golden_mean"), "--seed", 7, "--length", 20)
    row = out.splitlines()[1].split(",")
    assert row[:2] == ["7", "20"] and "1 1" not in row[2] and len(row[2].split()) == 20


def test_complexity_sources():
    code, out, _ = run("complexity", "--spec", spec("golden_mean"), "--nmax", 14, "--source", "zero")
    assert out.splitlines()[-1] == "14,15,13,0.866666666667"
    code, out, _ = run("complexity", "--spec", spec("hard_squares"), "--nmax", 2)
    assert code == 3 and "1-D" in _


def test_vitali_encode():
    code, out, _ = run("vitali", "--spec", spec("golden_mean"), "--seed", 2)
    assert code == 0 and "bounds_met,true" in out
    code, out, _ = run("encode", "--spec", spec("golden_mean"), "--seed", 2)
    assert code == 0 and "roundtrip,true" in out and "m,8" in out


def test_verify_hard_squares_table():
    code, out, _ = run("verify", "--spec", spec("hard_squares"))
    rows = {line.split(",")[0]: line.split(",")[-1] for line in out.splitlines()[1:]}
    assert rows["strip_brackets_nested"] == "PASS"
    assert rows["strip_bracket_width_8"] == "PASS"
    assert code == (1 if "FAIL" in rows.values() else 0)


@pytest.mark.parametrize("argv", [
    ["count", "--spec", "golden_mean", "--n", "12", "--workers", "3"],
    ["count", "--spec", "hard_squares", "--n", "2", "--workers", "4"],
    ["entropy", "--spec", "golden_mean", "--nmax", "10", "--workers", "2"],
    ["dim", "--spec", "even_shift"],
    ["complexity", "--spec", "golden_mean", "--seed", "5", "--nmax", "500"],
    ["sample", "--spec", "even_shift", "--seed", "18446744073709551615", "--length", "50"],
    ["vitali", "--spec", "hard_squares", "--seed", "3", "--n", "3", "--block", "2"],
    ["encode", "--spec", "golden_mean", "--seed", "9"],
])
def test_subprocess_determinism(argv):
    argv = [a if a not in ("golden_mean", "hard_squares", "even_shift") else str(spec(a)) for a in argv]
    cmd = [sys.executable, "-m", "subshift", *argv]
    first = subprocess.run(cmd, capture_output=True, check=True)
    second = subprocess.run(cmd, capture_output=True, check=True)
    assert first.stdout == second.stdout and first.stdout
    if "--workers" in argv:
        serial = argv[: argv.index("--workers")]
        third = subprocess.run([sys.executable, "-m", "subshift", *serial], capture_output=True, check=True)
        assert third.stdout == first.stdout
