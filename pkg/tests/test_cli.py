import subprocess
import sys

import pytest

from fpconstraint.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from fpconstraint.csvio import parse_block, read_csv

HEALTHY = "potential=quadratic:2.0\nkernel=gauss0:1e-3\nsource=indicator:0.3:0.5\ngamma=1.0\ndim=3\n"


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "model.cfg"
    path.write_text(HEALTHY + "n_intervals=400\n")
    return path


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, parse_block(out), err


def test_solve_dump_solution(config, tmp_path, capsys):
    code, out, _ = run(["solve", "--config", config, "--mu", 5, "--dump-solution", "--out", tmp_path], capsys)
    assert code == EXIT_OK
    assert out["N"] == "400" and out["mu"] == "5.0"
    assert abs(float(out["F"]) - float(out["duality_value"])) < 1e-10 * max(1.0, float(out["F"]))
    assert "mass_rel_error" in out
    _, cols, data = read_csv(tmp_path / "solution.csv")
    assert cols[:2] == ["r", "u"] and data.shape == (401, 4)


def test_invert_zero_target(config, tmp_path, capsys):
    code, out, _ = run(["invert", "--config", config, "--ell", 0, "--out", tmp_path], capsys)
    assert code == EXIT_OK
    assert out["mu_found"] == "0.0" and out["n_solves"] == "0" and out["status"] == "Converged"
    assert (tmp_path / "inversion.txt").is_file()


def test_invert_round_trip(config, tmp_path, capsys):
    _, solved, _ = run(["solve", "--config", config, "--mu", 5, "--out", tmp_path], capsys)
    code, out, _ = run(["invert", "--config", config, "--ell", solved["F"], "--out", tmp_path], capsys)
    assert code == EXIT_OK
    assert float(out["mu_found"]) == pytest.approx(5.0, rel=1e-6)


def test_invert_no_bracket_exit_code(tmp_path, capsys):
    code, out, _ = run(["invert", "--preset", "fig_bad", "--n", 500, "--ell", 1e7, "--mu-max", 1e5,
                        "--out", tmp_path], capsys)
    assert code == EXIT_NUMERIC and out["status"] == "NoBracket"


def test_scan_preset_model(tmp_path, capsys):
    code, out, _ = run(["scan", "--preset", "fig_ok2", "--mu-lo", 0, "--mu-hi", 1e7, "--samples", 60,
                        "--out", tmp_path], capsys)
    assert code == EXIT_OK and out["sign_changes"] == "0" and out["monotone"] == "true"
    params, cols, data = read_csv(tmp_path / "fscan.csv")
    assert data.shape == (60, 3) and params["N"] == "56921"


def test_moments(tmp_path, capsys):
    cfg = tmp_path / "unit.cfg"
    cfg.write_text("potential=quadratic:1.0\nradius=6\nn_intervals=600\n")
    code, out, _ = run(["moments", "--config", cfg, "--mu", 1, "--out", tmp_path], capsys)
    assert code == EXIT_OK
    assert float(out["rel_error_m0"]) < 1e-9 and float(out["rel_error_m2"]) < 1e-3


def test_asymptote_flags_unresolved(config, tmp_path, capsys):
    code, out, _ = run(["asymptote", "--config", config, "--mu", 1e2, 1e4, "--out", tmp_path], capsys)
    assert code == EXIT_OK and out["all_resolved"] == "false" and "warning" in out
    _, cols, data = read_csv(tmp_path / "asymptote.csv")
    assert cols[-1] == "resolved" and data[:, -1].tolist() == [1.0, 0.0]


def test_run_preset_and_dump_system(tmp_path, capsys):
    code, out, _ = run(["run", "--preset", "fig_ok1", "--n", 200, "--out", tmp_path,
                        "--dump-system", tmp_path / "K.csv", "--mu", 2], capsys)
    assert code == EXIT_OK and out["preset"] == "fig_ok1"
    params, cols, _ = read_csv(tmp_path / "K.csv")
    assert cols == ["index", "sub", "diag", "super", "load"] and params["mu"] == "2.0"


def test_custom_dump_system(config, tmp_path, capsys):
    code, _, _ = run(["solve", "--config", config, "--mu", 3, "--load-style", "cell",
                      "--dump-system", tmp_path / "K.csv", "--out", tmp_path], capsys)
    assert code == EXIT_OK
    params, _, _ = read_csv(tmp_path / "K.csv")
    assert params["mu"] == "3.0" and params["load_style"] == "cell"


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("gamma=1\ncolour=blue\n")
    code, _, err = run(["solve", "--config", cfg, "--mu", 1, "--out", tmp_path], capsys)
    assert code == EXIT_USAGE
    assert "line 2" in err and "colour=blue" in err


def test_missing_config(tmp_path, capsys):
    code, _, err = run(["solve", "--config", tmp_path / "nope.cfg", "--mu", 1], capsys)
    assert code == EXIT_USAGE and "cannot read" in err


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_invert_requires_ell(config):
    with pytest.raises(SystemExit) as exc:
        main(["invert", "--config", str(config)])
    assert exc.value.code == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "fpconstraint.cli", "run", "--preset", "fig_bad2", "--n", "200",
         "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "sign_changes=" in proc.stdout
