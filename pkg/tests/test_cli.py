import numpy as np
import pytest

from gausscompose import ButcherTableau, gauss_tableau, write_tableau
from gausscompose.cli import main
from gausscompose.tableau_io import read_tableau
from reference_tableaux import CONJUGATE4, PHI2, PSI2, max_dev


def test_factorize_two(tmp_path, capsys):
    assert main(["factorize", "--stages", "2", "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "1.5773502691896257" in out
    assert max_dev(read_tableau(tmp_path / "phi.txt"), PHI2) <= 1e-15
    assert max_dev(read_tableau(tmp_path / "psi.txt"), PSI2) <= 1e-15
    assert max_dev(read_tableau(tmp_path / "conjugate.txt"), CONJUGATE4) <= 1e-15


def test_factorize_one(tmp_path):
    assert main(["factorize", "--stages", "1", "--out-dir", str(tmp_path)]) == 0
    np.testing.assert_array_equal(read_tableau(tmp_path / "phi.txt").A, [[1.0]])
    np.testing.assert_array_equal(read_tableau(tmp_path / "psi.txt").A, [[0.0]])


def test_factorize_three_reports_deviation(capsys):
    assert main(["factorize", "--stages", "3"]) == 0
    line = [l for l in capsys.readouterr().out.splitlines() if l.startswith("theorem")][0]
    assert float(line.split()[2]) <= 1e-13


@pytest.mark.parametrize("argv", [["factorize", "--stages", "11"],
                                  ["factorize", "--tableau", "/nonexistent/file"]])
def test_factorize_input_errors(argv):
    assert main(argv) == 2


def test_factorize_coincident(tmp_path):
    p = tmp_path / "bad.txt"
    write_tableau(ButcherTableau([[0.25, 0.25], [0.25, 0.25]], [0.5, 0.5], [0.5, 0.5]), p)
    assert main(["factorize", "--tableau", str(p)]) == 2


def test_table1(tmp_path, capsys):
    csv = tmp_path / "t.csv"
    fig = tmp_path / "f.csv"
    assert main(["table1", "--csv", str(csv), "--figure-csv", str(fig)]) == 0
    out = capsys.readouterr().out
    assert "PASS reference rows" in out
    lines = csv.read_text().splitlines()
    assert lines[0] == "h,dense_error,dense_error_rate,collocation_error,collocation_error_rate"
    assert len(lines) == 8
    assert fig.read_text().startswith("x,dense_error,collocation_error\n")


def test_table1_custom_list():
    assert main(["table1", "--eps", "1e6", "--h-list", "1/8,1/16"]) == 0
    assert main(["table1", "--h-list", "0.3", "0.15"]) == 2
    assert main(["table1", "--h-list", "1/8", "1/32"]) == 2


def test_energy(tmp_path):
    csv = tmp_path / "e.csv"
    code = main(["energy", "--problem", "harmonic", "--method", "gauss4", "--steps", "300",
                 "--max-drift", "1e-12", "--csv", str(csv)])
    assert code == 0
    assert csv.read_text().splitlines()[0] == "t,energy_error"
    assert len(csv.read_text().splitlines()) == 302


def test_energy_threshold_violation():
    assert main(["energy", "--problem", "pendulum", "--method", "rk4", "--steps", "300",
                 "--max-drift", "1e-12"]) == 1
    assert main(["energy", "--problem", "pendulum", "--method", "rk4", "--steps", "1000",
                 "--expect-drift"]) == 0


def test_energy_bad_identifiers():
    assert main(["energy", "--problem", "pendulum", "--method", "bogus"]) == 2
    with pytest.raises(SystemExit):
        main(["energy", "--problem", "bogus", "--method", "gauss4"])


def test_convergence(tmp_path, capsys):
    assert main(["convergence", "--method", "gauss4", "--levels", "3", "--t-end", "2",
                 "--expected-order", "4", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "convergence.csv").read_text().startswith("h,error,rate\n")
    assert main(["convergence", "--method", "gauss4", "--levels", "3", "--t-end", "2",
                 "--expected-order", "6"]) == 1
    assert main(["convergence", "--method", "gauss4", "--levels", "2"]) == 2


def test_check(tmp_path, capsys):
    good = tmp_path / "g.txt"
    write_tableau(gauss_tableau(2), good)
    assert main(["check", "--tableau", str(good), "--expected-order", "4"]) == 0
    out = capsys.readouterr().out
    assert "symplectic" in out and "symmetric: yes" in out
    conj = tmp_path / "c.txt"
    write_tableau(ButcherTableau(CONJUGATE4["A"], CONJUGATE4["b"], CONJUGATE4["c"]), conj)
    assert main(["check", "--tableau", str(conj), "--expected-order", "4"]) == 0
    assert "not symplectic" in capsys.readouterr().out
    bad = tmp_path / "b.txt"
    write_tableau(ButcherTableau([[0.5]], [0.9], [0.5]), bad)
    assert main(["check", "--tableau", str(bad)]) == 1
    junk = tmp_path / "j.txt"
    junk.write_text("2\n0 1\n")
    assert main(["check", "--tableau", str(junk)]) == 2


def test_newton_flags():
    assert main(["convergence", "--method", "gauss4", "--levels", "3", "--t-end", "1",
                 "--newton-tol", "0"]) == 2
