import subprocess
import sys

import pytest

from brick14.cli import EXIT_INADMISSIBLE, EXIT_MISMATCH, EXIT_OK, EXIT_SOLVER, EXIT_USAGE, main
from brick14.numerics import SparseSym
from brick14.study import CSV_HEADER, parse_csv


def test_verify_sk1(capsys):
    assert main(["verify", "--types", "sk1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "x1-:PASS x1+:PASS x2-:PASS x2+:PASS x3-:PASS x3+:PASS" in out
    assert "x1:PASS x2:PASS x3:PASS" in out
    assert "consistent reading weighted/squared" in out


def test_verify_sk4_prints_kernel(capsys):
    assert main(["verify", "--types", "sk4", "--dofs", "centroid"]) == EXIT_OK
    assert "-x2*x3 + x1^2*x2*x3" in capsys.readouterr().out


def test_verify_sk6_centroid_witness(capsys):
    assert main(["verify", "--types", "sk6", "--dofs", "centroid"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "witness on x1+: -x2^2 + x1*x2^2*x3^2  face integral = -8/9" in out


def test_verify_default_has_twelve_rows(capsys):
    main(["verify"])
    assert "12 rows" in capsys.readouterr().out.splitlines()[-1]


def test_solve_prints_errors(capsys, tmp_path):
    mat, sol = tmp_path / "a.txt", tmp_path / "u.txt"
    code = main(["solve", "--type", "sk1", "--cells", "3,3,3", "--dump-matrix", str(mat), "--export", str(sol)])
    assert code == EXIT_OK
    line = capsys.readouterr().out.strip().splitlines()[-1]
    l2, energy = (float(p.split("=")[1]) for p in line.split())
    assert 0 < l2 < energy < 1
    a = SparseSym.load(mat)
    assert a.symmetry_defect() == 0.0
    assert sol.read_text().splitlines()[1] == "kind index x y z coefficient"


def test_solve_linear_is_exact(capsys):
    assert main(["solve", "--type", "sk2", "--solution", "linear", "--box", "0,0,0,2,1,1", "--cells", "3,2,2"]) == 0
    energy = float(capsys.readouterr().out.split("energy=")[1])
    assert energy <= 1e-9


def test_solve_grid_file(capsys, tmp_path):
    g = tmp_path / "g.txt"
    g.write_text("0 0.2 0.6 1\n0 0.5 1\n0 0.3 1\n")
    assert main(["solve", "--type", "new", "--dofs", "integral", "--grid-file", str(g)]) == EXIT_OK


def test_exit_codes(capsys):
    assert main(["solve", "--type", "sk3"]) == EXIT_INADMISSIBLE
    assert main(["solve", "--type", "sk1", "--maxit", "1"]) == EXIT_SOLVER
    assert main(["solve", "--type", "sk1", "--box", "0,0,0,1,1"]) == EXIT_USAGE
    assert main(["convergence", "--types", "sk4", "--meshes", "1,2"]) == EXIT_INADMISSIBLE
    with pytest.raises(SystemExit) as info:
        main(["solve", "--type", "sk9"])
    assert info.value.code == EXIT_USAGE


def test_convergence_writes_reports(capsys, tmp_path):
    c, j = tmp_path / "s.csv", tmp_path / "s.json"
    code = main(["convergence", "--types", "sk1", "--dofs", "centroid", "--meshes", "2,4,8",
                 "--csv", str(c), "--json", str(j), "--no-timing"])
    assert code == EXIT_OK
    rows = parse_csv(c.read_text())
    assert c.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    assert [r["ndofs"] for r in rows] == [63, 365, 2457]
    assert "sk1   centroid  energy" in capsys.readouterr().out


def test_convergence_mismatch_exit(capsys):
    # two coarse meshes are far from asymptotic for the one-order-lower type
    assert main(["convergence", "--types", "sk6", "--dofs", "centroid", "--meshes", "2,4,8"]) == EXIT_MISMATCH


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "brick14.cli", "verify", "--types", "sk2"], capture_output=True, text=True)
    assert out.returncode == 0 and "sk2/integral" in out.stdout
