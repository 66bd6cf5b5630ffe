"""End-to-end drives of the command line interface through main(argv)."""

from __future__ import annotations

import json
from fractions import Fraction

import pytest

from gacount import cli, enumeration, geometry
from gacount import __version__


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_list_models(capsys):
    code, out, _ = run(capsys, "list-models")
    assert code == 0
    models = json.loads(out)
    assert len(models) == 6
    ids = {m["id"] for m in models}
    assert ids == {"P1", "P2", "P3", "BlP2-1", "BlP2-2", "BlP2-3"}
    for m in models:
        assert m["small_primes"] == [2, 3]
        assert len(m["rho"]) == m["rank"]


def test_count_csv_and_stdout(capsys, tmp_path):
    out_path = tmp_path / "counts.csv"
    code, out, _ = run(
        capsys, "count", "--model", "P1", "--bound", "1000",
        "--ladder", "4", "--out", str(out_path),
    )
    assert code == 0
    assert "B,N,elapsed_ms" in out
    lines = out_path.read_text().strip().splitlines()
    assert lines[0] == "B,N,elapsed_ms"
    assert len(lines) == 5
    model = geometry.load_model("P1")
    for line in lines[1:]:
        b_txt, n_txt, ms_txt = line.split(",")
        assert float(ms_txt) >= 0.0
        expected = enumeration.count_points(model, model.rho, int(b_txt))
        assert int(n_txt) == expected
    assert lines[-1].split(",")[0] == "1000"


def test_count_custom_lambda(capsys):
    code, out, _ = run(
        capsys, "count", "--model", "BlP2-1", "--lambda", "3,2",
        "--bound", "500", "--ladder", "3",
    )
    assert code == 0
    assert "lambda = (3, 2)" in out
    b1 = geometry.load_model("BlP2-1")
    last = [l for l in out.splitlines() if l and l[0].isdigit()][-1]
    assert int(last.split(",")[1]) == enumeration.count_points(b1, (3, 2), 500)


def test_count_threads_match(capsys):
    code1, out1, _ = run(capsys, "count", "--model", "P2", "--bound", "200",
                         "--ladder", "3")
    code2, out2, _ = run(capsys, "count", "--model", "P2", "--bound", "200",
                         "--ladder", "3", "--threads", "4")
    assert code1 == code2 == 0
    rows1 = [l.split(",")[:2] for l in out1.splitlines() if l and l[0].isdigit()]
    rows2 = [l.split(",")[:2] for l in out2.splitlines() if l and l[0].isdigit()]
    assert rows1 == rows2


def test_fit_no_predict_with_plot_data(capsys, tmp_path):
    plot = tmp_path / "plot.dat"
    code, out, _ = run(
        capsys, "fit", "--model", "P1", "--bmin", "100", "--bmax", "100000",
        "--ladder", "6", "--no-predict", "--plot-data", str(plot),
    )
    assert code == 0
    assert "fitted leading constant" in out
    assert "predicted constant" not in out
    text = plot.read_text()
    assert "# prediction" not in text
    assert len(text.strip().splitlines()) == 6


def test_fit_with_prediction_json(capsys, tmp_path):
    plot = tmp_path / "plot.dat"
    report_path = tmp_path / "fit.json"
    code, out, _ = run(
        capsys, "fit", "--model", "P1", "--bmin", "1000", "--bmax", "1000000",
        "--ladder", "6", "--pmax", "2000",
        "--plot-data", str(plot), "--json", str(report_path),
    )
    assert code == 0
    assert "predicted constant" in out
    assert plot.read_text().strip().splitlines()[-1].startswith("# prediction")
    report = json.loads(report_path.read_text())
    assert report["artifact_version"] == __version__
    assert report["command"] == "fit"
    assert report["model"] == "P1"
    res = report["results"]
    assert abs(res["predicted_constant"] - 12.0 / 3.14159265**2) < 1e-2
    assert abs(res["fitted_constant"] / res["predicted_constant"] - 1.0) < 0.05
    assert res["a_hat"] is not None


def test_emit_plot_data_empty_ladder(tmp_path):
    path = tmp_path / "empty.dat"
    ladder = enumeration.CountLadder("P1", (Fraction(2),), ())
    cli.emit_plot_data(ladder, None, str(path))
    assert path.read_text() == ""


def test_constant_out_payload(capsys, tmp_path):
    out_path = tmp_path / "constant.json"
    code, out, _ = run(
        capsys, "constant", "--model", "P2", "--pmax", "300",
        "--small-depth", "8", "--out", str(out_path),
    )
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert sorted(payload) == sorted(
        ["model", "arch_density", "euler_partial", "tail_bound",
         "tamagawa", "rank", "rho", "predicted_constant"]
    )
    assert payload["model"] == "P2"
    assert payload["rank"] == 1
    assert payload["rho"] == ["3"]
    assert payload["arch_density"] == 12.0
    assert abs(payload["predicted_constant"] - payload["tamagawa"] / 3.0) < 1e-12


def test_verify_denef_pass(capsys):
    code, out, _ = run(capsys, "verify-denef", "--model", "P2", "--p", "5,7")
    assert code == 0
    assert "PASS" in out
    assert "FAIL" not in out


def test_verify_denef_prime_range(capsys):
    code, out, _ = run(capsys, "verify-denef", "--model", "P1", "--p", "5..13")
    assert code == 0
    for p in (5, 7, 11, 13):
        assert f" {p} " in out or f"p={p}" in out or str(p) in out


def test_verify_charsum_pass_and_fail(capsys):
    code, out, _ = run(capsys, "verify-charsum", "--p", "5,7", "--nmax", "2",
                       "--dmax", "2")
    assert code == 0
    assert "FAIL" not in out
    code, out, _ = run(capsys, "verify-charsum", "--p", "5", "--nmax", "1",
                       "--dmax", "1", "--tol", "0")
    assert code == 1
    assert "FAIL" in out


def test_zeta_check_exit_codes(capsys):
    code, out, _ = run(capsys, "zeta-check", "--model", "P1", "--s", "3.0",
                       "--bcut", "2000", "--acut", "10", "--pmax", "200")
    assert code == 0
    assert "PASS" in out
    code, _, err = run(capsys, "zeta-check", "--model", "P2", "--s", "4.0",
                       "--bcut", "100")
    assert code == 3
    assert "capability" in err.lower()


def test_zeta_check_bad_lambda_usage(capsys):
    code, _, err = run(capsys, "zeta-check", "--model", "P1",
                       "--lambda", "2,2", "--s", "3.0", "--bcut", "100")
    assert code == 2
    assert "usage error" in err


def test_all_acceptance_subset(capsys):
    code, out, _ = run(capsys, "all-acceptance", "--only", "A4")
    assert code == 0
    assert out.count("PASS") == 1
    assert "acceptance: 1/1 criteria pass" in out


def test_all_acceptance_unknown_id(capsys):
    code, _, err = run(capsys, "all-acceptance", "--only", "A99")
    assert code == 2
    assert "usage error" in err


def test_unknown_model_rejected():
    with pytest.raises(SystemExit) as exc:
        cli.main(["count", "--model", "P9", "--bound", "100"])
    assert exc.value.code == 2


def test_unknown_flag_rejected():
    with pytest.raises(SystemExit) as exc:
        cli.main(["list-models", "--badflag"])
    assert exc.value.code == 2


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out
