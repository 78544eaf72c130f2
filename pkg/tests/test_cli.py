"""Command line behavior: outputs, exit codes, determinism."""

import numpy as np
import pytest

from noisyqr.cli import main
from noisyqr.linalg import save_matrix_csv


def run_cli(argv):
    """main() returns an exit code; argparse errors raise SystemExit."""
    try:
        return main(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0


@pytest.fixture
def ortho_pair(tmp_path):
    b = tmp_path / "b.csv"
    c = tmp_path / "c.csv"
    save_matrix_csv(b, np.eye(3)[:, :2])
    save_matrix_csv(c, np.eye(3)[:, 2:3])
    return b, c


class TestBoundsCommand:
    def test_orthonormal_example(self, ortho_pair, capsys):
        b, c = ortho_pair
        code = run_cli(["bounds", "--matrix", str(b), "--column", str(c), "--gamma", "1"])
        out = capsys.readouterr().out
        assert code == 0
        assert "[kappa_bound_via_q]" in out
        assert "bound (upper): actual <= 1.0" in out
        assert "actual: 1.0" in out
        assert "[residual_identity_check]" in out

    def test_with_noise_split(self, ortho_pair, tmp_path, capsys):
        b, c = ortho_pair
        x = tmp_path / "x.csv"
        y = tmp_path / "y.csv"
        save_matrix_csv(x, np.eye(3)[:, 2:3])
        save_matrix_csv(y, np.zeros((3, 1)))
        code = run_cli(
            [
                "bounds",
                "--matrix", str(b),
                "--column", str(c),
                "--gamma", "1",
                "--x", str(x),
                "--y", str(y),
                "--eps", "1.0",
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "[kappa_bound_general]" in out
        assert "[kappa_bound_eps]" in out

    def test_csv_output(self, ortho_pair, tmp_path, capsys):
        b, c = ortho_pair
        dest = tmp_path / "reports.csv"
        code = run_cli(
            ["bounds", "--matrix", str(b), "--column", str(c), "--gamma", "1", "--csv", str(dest)]
        )
        assert code == 0
        lines = dest.read_text().splitlines()
        assert lines[0].startswith("op,direction,preconditions_met,bound_value")
        assert len(lines) >= 5

    def test_malformed_csv_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("2,2\n1.0,2.0\n3.0,nope\n")
        c = tmp_path / "c.csv"
        save_matrix_csv(c, np.ones((2, 1)))
        code = run_cli(["bounds", "--matrix", str(bad), "--column", str(c), "--gamma", "1"])
        err = capsys.readouterr().err
        assert code == 1
        assert err.startswith("error: ")
        assert ":3:" in err
        assert err.count("\n") == 1

    def test_rank_deficient_exit_2(self, tmp_path, capsys):
        b = tmp_path / "b.csv"
        save_matrix_csv(b, np.column_stack([np.ones(3), np.ones(3)]))
        c = tmp_path / "c.csv"
        save_matrix_csv(c, np.eye(3)[:, 2:3])
        code = run_cli(["bounds", "--matrix", str(b), "--column", str(c), "--gamma", "1"])
        assert code == 2
        assert capsys.readouterr().err.startswith("error: ")


class TestFlagHandling:
    def test_unknown_flag_rejected(self, capsys):
        code = run_cli(["specfun", "--fn", "log-gamma", "--x", "2", "--bogus", "1"])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_missing_subcommand(self, capsys):
        assert run_cli([]) == 1

    def test_bad_numeric_domain_exit_1(self, capsys):
        code = run_cli(["specfun", "--fn", "log-gamma", "--x", "-3"])
        assert code == 1


class TestSpecfunCommand:
    def test_marcum(self, capsys):
        code = run_cli(
            ["specfun", "--fn", "marcum", "--order", "1", "--alpha", "1", "--beta", "1"]
        )
        out = capsys.readouterr().out
        assert code == 0
        value = float(out.splitlines()[0].split("=")[1])
        assert value == pytest.approx(0.7328798037968202, abs=1e-12)
        assert "abs_error_bound=" in out

    def test_missing_argument(self, capsys):
        code = run_cli(["specfun", "--fn", "marcum", "--order", "1", "--alpha", "1"])
        assert code == 1

    def test_norm_tail(self, capsys):
        code = run_cli(
            ["specfun", "--fn", "norm-tail", "--x-norm", "1", "--sigma", "0.05",
             "--eps", "0.9", "--m", "50"]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert float(out.splitlines()[0].split("=")[1]) == pytest.approx(0.99950155, abs=1e-6)


class TestSimCommands:
    def test_norm_tail_grid_rows(self, tmp_path, capsys):
        out_csv = tmp_path / "grid.csv"
        code = run_cli(
            ["sim-norm-tail", "--m", "10", "--x-norm", "1", "--eps", "0.9",
             "--sigma-grid", "1e-3:1:5", "--trials", "2000", "--seed", "7",
             "--out", str(out_csv)]
        )
        assert code == 0
        lines = out_csv.read_text().splitlines()
        assert len(lines) == 6
        capsys.readouterr()

    def test_byte_identical_reruns_and_workers(self, tmp_path, capsys):
        args = ["sim-norm-tail", "--m", "10", "--x-norm", "1", "--eps", "0.9",
                "--sigma-grid", "1e-2:1:4", "--trials", "3000", "--seed", "11"]
        files = []
        for tag, extra in (("a", []), ("b", []), ("c", ["--workers", "8"])):
            dest = tmp_path / f"{tag}.csv"
            assert run_cli(args + ["--out", str(dest)] + extra) == 0
            files.append(dest.read_bytes())
        capsys.readouterr()
        assert files[0] == files[1] == files[2]

    def test_sigma_and_grid_mutually_exclusive(self, capsys):
        code = run_cli(["sim-norm-tail", "--m", "5", "--eps", "0.5",
                        "--sigma", "0.1", "--sigma-grid", "1e-2:1:3"])
        assert code == 1

    def test_projection(self, tmp_path, capsys):
        dest = tmp_path / "proj.csv"
        code = run_cli(
            ["sim-projection", "--m", "12", "--n", "3", "--sigma", "0.1",
             "--x-norm", "1", "--eps", "1.05", "--trials", "20000", "--seed", "3",
             "--out", str(dest)]
        )
        assert code == 0
        assert len(dest.read_text().splitlines()) == 2
        capsys.readouterr()

    def test_ls(self, tmp_path, capsys):
        dest = tmp_path / "ls.csv"
        code = run_cli(
            ["sim-ls", "--m", "15", "--n", "3", "--x-norm", "1", "--sigma", "0.1",
             "--eps1", "0.4", "--eps2", "1", "--trials", "10000", "--seed", "5",
             "--out", str(dest)]
        )
        assert code == 0
        assert len(dest.read_text().splitlines()) == 2
        capsys.readouterr()

    def test_qr_noise(self, tmp_path, capsys):
        dest = tmp_path / "qr.csv"
        code = run_cli(
            ["sim-qr-noise", "--m", "25", "--n", "3", "--sigma", "1e-3",
             "--eps1", "0.05", "--eps2", "1", "--trials", "500", "--seed", "5",
             "--out", str(dest)]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "product bound" in out
        assert len(dest.read_text().splitlines()) == 2

    def test_figures_mode(self, tmp_path, capsys):
        code = run_cli(
            ["sim-norm-tail", "--figures", str(tmp_path), "--trials", "500", "--seed", "2"]
        )
        assert code == 0
        assert (tmp_path / "fig1_norm_tail.csv").exists()
        assert (tmp_path / "fig2_norm_tail.csv").exists()
        capsys.readouterr()


class TestErrataReport:
    def test_sections_and_decisive_values(self, capsys):
        code = run_cli(["errata-report", "--trials", "20000", "--seed", "1"])
        out = capsys.readouterr().out
        assert code == 0
        assert "== 1. Marcum Q at alpha = 0" in out
        assert "== 2. residual law F-argument" in out
        assert "== 3. chain growth prefactor" in out
        assert "== 4. tall-matrix tail constant" in out
        # the half-order row pins the discrepancy: 0.05 vs 0.0056
        row = next(ln for ln in out.splitlines() if ln.startswith("0.5,1.9599639845"))
        cells = row.split(",")
        assert float(cells[2]) == pytest.approx(0.05, abs=1e-9)
        assert float(cells[3]) == pytest.approx(0.005574596681754426, abs=1e-12)
        # implemented residual form accepted, printed form rejected
        impl = next(ln for ln in out.splitlines() if ln.startswith("implemented,"))
        printed = next(ln for ln in out.splitlines() if ln.startswith("printed,"))
        assert abs(float(impl.split(",")[3])) <= 4.0
        assert abs(float(printed.split(",")[3])) > 10.0
        assert "0.9734" in out

    def test_deterministic(self, capsys, tmp_path):
        a = tmp_path / "a.txt"
        b = tmp_path / "b.txt"
        run_cli(["errata-report", "--trials", "5000", "--seed", "9", "--out", str(a)])
        run_cli(["errata-report", "--trials", "5000", "--seed", "9", "--out", str(b)])
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()
