import json

import pytest

from mmudn import blockage as blk
from mmudn.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, read_output_csv, run

FAST_SIM = [
    "--set",
    "replications=6",
    "--set",
    "fading_draws=4",
    "--set",
    "window_side_m=1500",
]


def _run(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- blockage ---------------------------------------------------------------


def test_blockage_matches_library(tmp_path, capsys):
    out = tmp_path / "blockage.csv"
    code, _, _ = _run(capsys, "blockage", "--output", str(out))
    assert code == EXIT_OK
    header, rows = read_output_csv(str(out))
    assert any(line.startswith("floor_height_m") for line in header)
    assert len(rows) == len(blk.REFERENCE_REGIONS)
    for row in rows:
        p = blk.blockage_params(blk.REFERENCE_REGIONS[row["region"]]["stats"])
        assert row["beta"] == pytest.approx(p.beta, rel=1e-9)
        assert row["eta"] == pytest.approx(p.eta, rel=1e-9)
        assert row["r_los_2d_m"] == pytest.approx(p.r_los_2d, rel=1e-9)
        assert row["r_los_3d_m"] == pytest.approx(p.r_los_3d, rel=1e-9)


def test_blockage_custom_input_not_mutated(tmp_path, capsys):
    src = tmp_path / "stats.csv"
    src.write_text(
        "region,avg_perimeter_m,avg_area_m2,coverage_fraction,"
        "lognormal_mu,lognormal_sigma,floor_height_m,bs_height_m\n"
        "Test,120.0,600.0,0.3,1.5,0.3,3.0,12.0\n"
    )
    before = src.read_text()
    code, _, _ = _run(
        capsys, "blockage", "--input", str(src), "--output", str(tmp_path / "o.csv")
    )
    assert code == EXIT_OK
    assert src.read_text() == before
    _, rows = read_output_csv(str(tmp_path / "o.csv"))
    assert rows[0]["region"] == "Test"


# --- se / allocate ------------------------------------------------------------


def test_se_csv_round_trip(tmp_path, capsys):
    out = tmp_path / "se.csv"
    code, _, _ = _run(
        capsys, "se", "--output", str(out), "--set", "lambda_hat_grid=10,100"
    )
    assert code == EXIT_OK
    _, rows = read_output_csv(str(out))
    assert [r["lambda_hat"] for r in rows] == [10.0, 100.0]
    assert all(r["lower_bound"] <= r["upper_bound"] for r in rows)


def test_allocate_stdout_and_json(tmp_path, capsys):
    code, out_text, _ = _run(capsys, "allocate", "--set", "lambda_hat_grid=10,100")
    assert code == EXIT_OK
    assert "lambda_hat_m,region,beta_m,beta_mu,r_d,r_u,r_d_decoupled,gain" in out_text
    # Every emitted line above the table is a config echo.
    assert all(
        line.startswith("#") for line in out_text.splitlines() if " = " in line
    )
    code, json_text, _ = _run(
        capsys, "allocate", "--format", "json", "--set", "lambda_hat_grid=10"
    )
    assert code == EXIT_OK
    doc = json.loads(json_text)
    assert doc["rows"][0]["lambda_hat_m"] == 10.0
    assert any(line.startswith("zeta") for line in doc["config"])


def test_allocate_bits_columns(tmp_path, capsys):
    out = tmp_path / "alloc.csv"
    code, _, _ = _run(
        capsys, "allocate", "--output", str(out), "--set", "lambda_hat_grid=100"
    )
    assert code == EXIT_OK
    _, rows = read_output_csv(str(out))
    row = rows[0]
    assert row["r_d_bits"] == pytest.approx(row["r_d"] / 0.6931471805599453, rel=1e-8)


# --- simulate ---------------------------------------------------------------------


def test_simulate_identical_reruns(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        code, _, _ = _run(
            capsys, "simulate", "--seed", "3", "--output", str(out), *FAST_SIM
        )
        assert code == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_simulate_seed_echoed(tmp_path, capsys):
    out = tmp_path / "sim.csv"
    code, _, _ = _run(capsys, "simulate", "--seed", "42", "--output", str(out), *FAST_SIM)
    assert code == EXIT_OK
    header, rows = read_output_csv(str(out))
    assert "seed = 42" in header
    assert rows[0]["tier"] == "muw"


def test_sweep_runs_grid(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, _, _ = _run(
        capsys,
        "sweep",
        "--output",
        str(out),
        "--set",
        "lambda_hat_grid=10,100",
        *FAST_SIM,
    )
    assert code == EXIT_OK
    _, rows = read_output_csv(str(out))
    assert [r["lambda_hat"] for r in rows] == [10.0, 100.0]


# --- config handling and exit codes -----------------------------------------------


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("zeta = 0.5\nlambda_hat_grid = 10,100  # comment\n")
    code, out_text, _ = _run(capsys, "allocate", "--config", str(cfg))
    assert code == EXIT_OK
    assert "# zeta = 0.5" in out_text


def test_unknown_key_exits_2(tmp_path, capsys):
    code, _, err = _run(capsys, "allocate", "--set", "zetta=0.5")
    assert code == EXIT_CONFIG
    assert "zetta" in err


def test_bad_value_exits_2(capsys):
    code, _, err = _run(capsys, "allocate", "--set", "zeta=abc")
    assert code == EXIT_CONFIG
    assert "zeta" in err


def test_missing_config_file_exits_2(capsys):
    code, _, _ = _run(capsys, "allocate", "--config", "/nonexistent/x.cfg")
    assert code == EXIT_CONFIG


def test_strict_assumption_violation_exits_3(capsys):
    code, _, err = _run(
        capsys,
        "allocate",
        "--set",
        "lambda_hat_grid=1.05",
        "--set",
        "strict_assumptions=true",
    )
    assert code == EXIT_NUMERIC
    assert "dominate" in err


def test_failure_leaves_no_output_file(tmp_path, capsys):
    out = tmp_path / "never.csv"
    code, _, _ = _run(
        capsys,
        "allocate",
        "--output",
        str(out),
        "--set",
        "lambda_hat_grid=1.05",
        "--set",
        "strict_assumptions=true",
    )
    assert code == EXIT_NUMERIC
    assert not out.exists()
