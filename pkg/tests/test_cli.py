import math
import subprocess
import sys

import pytest

from polegamma import cli
from polegamma.cli import RunConfig, UsageError, main, parse_complex


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


LANCZOS_INF = ("--method", "lanczos", "--n", "8", "--r-target", "inf")


@pytest.mark.parametrize(
    "text, value",
    [("5", 5), ("-3", -3), ("2+1i", 2 + 1j), ("2-1.5i", 2 - 1.5j), ("1e-3+2e2j", 1e-3 + 200j), ("-i", -1j), ("3i", 3j), ("-5+1e-12i", -5 + 1e-12j)],
)
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["", "2+", "1i2", "abc", "2 + 1i", "1.2.3", "2+x"])
def test_parse_complex_rejects(text):
    with pytest.raises(UsageError):
        parse_complex(text)


def test_runconfig_rules():
    with pytest.raises(UsageError):
        RunConfig("lanczos", 8)
    with pytest.raises(UsageError):
        RunConfig("lanczos", 8, r="8", target=cli.RTarget.infinity())
    with pytest.raises(UsageError):
        RunConfig("stirling", 6)
    with pytest.raises(UsageError):
        RunConfig("stirling", 8, r="7.5")
    with pytest.raises(UsageError):
        RunConfig("nodes", 2, r="2.5")
    with pytest.raises(UsageError):
        RunConfig("spouge", 2, target=cli.RTarget.infinity())
    RunConfig("stirling", 8)
    RunConfig("stirling", 8, r="8")


def test_coeffs_spouge_table(capsys):
    code, out, _ = run(capsys, "coeffs", "--method", "spouge", "--n", "8", "--r", "8.1603", "--paper-table")
    assert code == 0
    rows = {line.split()[0]: line.split()[1] for line in out.splitlines()[1:]}
    assert rows["c_inf"] == "2.5066e+00"
    assert float(rows["c_1"]) == pytest.approx(9.9957e03, abs=5)
    assert float(rows["c_8"]) == pytest.approx(-1.9305e-03, abs=5e-7)


def test_coeffs_stirling_table(capsys):
    code, out, _ = run(capsys, "coeffs", "--method", "stirling", "--paper-table")
    rows = {line.split()[0]: line.split()[1] for line in out.splitlines()[1:]}
    assert code == 0 and rows["r"] == "8" and rows["c_1"] == "8.4314e+03" and rows["c_8"] == "-5.3918e-04"


def test_coeffs_lanczos_inf_table(capsys):
    code, out, _ = run(capsys, "coeffs", *LANCZOS_INF, "--paper-table")
    rows = {line.split()[0]: line.split()[1] for line in out.splitlines()[1:]}
    assert float(rows["r"]) == pytest.approx(7.90609386, abs=1e-8)
    assert rows["c_1"] == "7.6305e+03"


def test_coeffs_record_to_file(capsys, tmp_path):
    path = tmp_path / "c.txt"
    code, out, _ = run(capsys, "coeffs", *LANCZOS_INF, "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("method = lanczos\nN = 8\n")


def test_coeffs_nodes(capsys):
    code, out, _ = run(capsys, "coeffs", "--method", "nodes", "--n", "2", "--nodes", "1,2.5,4", "--r", "2.25")
    assert code == 0 and "nodes = 1,5/2,4" in out


@pytest.mark.parametrize("table, header", [(3, ["Lanczos", "Spouge", "SVD", "Interp"]), (4, ["Stirling", "Lanczos", "Chebyshev", "Geometric"])])
def test_coeffs_full_tables(capsys, table, header):
    code, out, _ = run(capsys, "coeffs", "--table", str(table))
    lines = out.splitlines()
    assert code == 0 and lines[0].split() == header and len(lines) == 11


def test_table4_geometric_r(capsys):
    _, out, _ = run(capsys, "coeffs", "--table", "4")
    assert out.splitlines()[1].split() == ["r", "8", "7.90609387", "7.91894081", "7.87294863"]


def test_solve_r_examples(capsys):
    assert run(capsys, "solve-r", "--method", "spouge", "--n", "3", "--zbar", "20")[1] == "2.69870240\n"
    assert run(capsys, "solve-r", "--method", "lanczos", "--n", "10", "--zbar", "50")[1] == "10.40407749\n"
    assert run(capsys, "solve-r", "--method", "geometric", "--n", "8", "--r-target", "inf", "--r0", "8")[1] == "7.87294863\n"


def test_solve_r_spouge_inf_usage(capsys):
    code, out, err = run(capsys, "solve-r", "--method", "spouge", "--n", "2", "--r-target", "inf")
    assert code == 2 and out == "" and "Spouge" in err


def test_solve_r_needs_target(capsys):
    assert run(capsys, "solve-r", "--method", "lanczos", "--n", "3", "--r", "3.5")[0] == 2


def test_solve_r_table(capsys, tmp_path):
    path = tmp_path / "t1.csv"
    code, out, _ = run(capsys, "solve-r", "--table", "1", "--max-n", "2", "--out", str(path))
    lines = out.splitlines()
    assert code == 0 and lines[0].split()[0] == "N" and len(lines) == 3
    assert lines[1].split()[1] == "1.00185747"
    assert path.read_text().splitlines()[0] == "N,0.5,1,2,50,100"


def test_eval_outputs(capsys):
    code, out, _ = run(capsys, "eval", *LANCZOS_INF, "--z", "5")
    assert code == 0 and abs(float(out) - 24) < 24 * 1e-13
    assert run(capsys, "eval", *LANCZOS_INF, "--z=-3")[1] == "pole at -3, residue -1/6\n"
    out = run(capsys, "eval", *LANCZOS_INF, "--z", "200.5")[1]
    assert out.startswith("overflow: ln Gamma = ")
    lg = float(out.split("= ")[1])
    from polegamma.kernels import ReferenceOracle

    assert abs(lg / float(ReferenceOracle().log_gamma(200.5).real) - 1) < 1e-10


def test_eval_bad_literal(capsys):
    code, _, err = run(capsys, "eval", *LANCZOS_INF, "--z", "2+x")
    assert code == 2 and "malformed" in err


def test_coeff_file_roundtrip_bit_exact(capsys, tmp_path):
    path = tmp_path / "geo.txt"
    gen = ("--method", "geometric", "--n", "8", "--r-target", "inf", "--r0", "8")
    run(capsys, "coeffs", *gen, "--out", str(path))
    for z in ("0.5", "7.25-3i", "-4.5+0.5i", "150", "171.9", "0.5+60i"):
        inline = run(capsys, "eval", *gen, f"--z={z}")[1]
        from_file = run(capsys, "eval", "--coeff-file", str(path), f"--z={z}")[1]
        assert inline == from_file


def test_coeff_file_errors(capsys, tmp_path):
    assert run(capsys, "eval", "--coeff-file", str(tmp_path / "missing"), "--z", "1")[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("method = spouge\n")
    assert run(capsys, "eval", "--coeff-file", str(bad), "--z", "1")[0] == 2


def test_numeric_failure_exit(capsys):
    # N=1 nodes 1 and 1+1e-40 make the system numerically singular at 30 digits
    code, _, err = run(capsys, "coeffs", "--method", "nodes", "--n", "1", "--nodes", "1,1.0000000000000000000000000000000000000001", "--r", "0.5", "--digits", "30")
    assert code == 3 and "numerical failure" in err


def test_argparse_usage_exit(capsys):
    assert run(capsys, "coeffs", "--method", "bogus")[0] == 2
    assert run(capsys)[0] == 2


def test_sweep_csv(capsys, tmp_path):
    path = tmp_path / "s.csv"
    code, out, _ = run(capsys, "sweep", "--method", "spouge", "--n", "8", "--zbar", "100", "--lo", "1", "--hi", "100", "--count", "60", "--out", str(path))
    assert code == 0
    rows = path.read_text().splitlines()
    assert rows[0] == "coord,rel_err" and len(rows) == 61
    errs = [float(r.split(",")[1]) for r in rows[1:]]
    # calibrated at 100, so the right edge is where the error vanishes
    assert errs[-1] < 1e-12 and max(errs) > 1e3 * errs[-1]
    assert "max rel_err" in out


def test_sweep_lanczos_dips(capsys, tmp_path):
    path = tmp_path / "l.csv"
    run(capsys, "sweep", "--method", "lanczos", "--n", "8", "--zbar", "100", "--lo", "1", "--hi", "9", "--count", "33", "--spacing", "linear", "--out", str(path))
    rows = dict(r.split(",") for r in path.read_text().splitlines()[1:])
    for k in range(1, 10):
        assert float(rows[str(k)]) < 1e-13


def test_sweep_compare(capsys, tmp_path):
    code, out, _ = run(
        capsys, "sweep", "--method", "geometric", "--n", "8", "--r-target", "inf", "--r0", "8",
        "--lo", "0.5", "--hi", "1000", "--count", "200", "--compare", "lanczos", "--out", str(tmp_path / "c.csv"),
    )
    assert code == 0
    ratio = float(out.strip().splitlines()[-1].split("= ")[1])
    assert ratio >= 100


def test_sweep_to_stdout(capsys):
    code, out, err = run(capsys, "sweep", *LANCZOS_INF, "--axis", "critical", "--lo", "1", "--hi", "10", "--count", "3")
    assert code == 0 and out.splitlines()[0] == "coord,rel_err" and "max rel_err" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "polegamma", "solve-r", "--method", "spouge", "--n", "1", "--zbar", "0.5"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "1.00185747\n"
