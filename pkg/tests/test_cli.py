import json

import pytest

from core.gram import GramMatrix
from pwl_bases import main, run


def _checks(report):
    return {c.name: c for c in report.checks}


def test_gram_exact_json(tmp_path):
    out = tmp_path / "gram.json"
    report = run(["gram", "--system", "r1", "--N", "4", "--exact", "--out", str(out)])
    assert report.exit_code == 0
    matrix = GramMatrix.from_json(out.read_text())
    assert len(matrix.labels) == 9
    assert report.outputs == [str(out)]


def test_gram_csv_output(tmp_path):
    out = tmp_path / "gram.csv"
    assert main(["gram", "--system", "hat", "--N", "5", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "row,col,value"


def test_spectra_compare(tmp_path):
    report = run(["spectra", "--N", "16", "--compare", "--out", str(tmp_path / "s.csv")])
    checks = _checks(report)
    assert checks["spectra_gap"].passed
    assert checks["GS_equals_DGCD"].passed
    assert len((tmp_path / "s.csv").read_text().splitlines()) == 17


@pytest.mark.parametrize("system, extra", [("r1", []), ("rn", ["--n", "2", "--bound", "2"]), ("tensor-hat", ["--N", "3"])])
def test_riesz(tmp_path, system, extra):
    report = run(["riesz", "--system", system, *extra, "--out", str(tmp_path / "r.csv")])
    assert _checks(report)["riesz_interval"].passed


def test_tau(tmp_path):
    report = run(["tau", "--N", "9", "--terms", "1000", "--out", str(tmp_path / "tau.csv")])
    assert report.exit_code == 0
    assert set(_checks(report)) == {"tau_1", "abs_tau_sum", "abs_tau_rest", "rest_below_tau_1"}


@pytest.mark.parametrize(
    "argv",
    [
        ["--kind", "T_hat_1d", "--M", "2000", "--bound", "3"],
        ["--kind", "T_tensor", "--n", "2", "--M", "32", "--bound", "2", "--samples", "32"],
        ["--kind", "T_ridge", "--n", "2", "--M", "2000", "--bound", "1", "--samples", "32"],
    ],
)
def test_transfer_verify(tmp_path, argv):
    report = run(["transfer-verify", *argv, "--out", str(tmp_path / "t.csv")])
    checks = _checks(report)
    assert checks["transfer_fidelity"].passed
    assert not checks["neumann_contraction"].gating


def test_expand_and_reconstruct(tmp_path):
    expansion = tmp_path / "e.json"
    report = run(["expand", "--function", "hat:3", "--basis", "hat", "--N", "16", "--out", str(expansion)])
    assert _checks(report)["unit_coefficients"].passed
    report = run([
        "reconstruct", "--expansion", str(expansion), "--function", "hat:3", "--grid", "101",
        "--out", str(tmp_path / "r.csv"),
    ])
    assert _checks(report)["max_abs_error"].measured < 1e-9
    assert len((tmp_path / "r.csv").read_text().splitlines()) == 102


def test_expand_ridge_sign(tmp_path):
    report = run(["expand", "--function", "S:-1,-2", "--basis", "CS_ridge", "--N", "3", "--out", str(tmp_path / "e.json")])
    assert _checks(report)["unit_coefficients"].passed


def test_convergence(tmp_path):
    report = run([
        "convergence", "--function", "square", "--basis", "sine", "--q", "2", "--schedule", "1,3,9",
        "--out", str(tmp_path / "c.csv"),
    ])
    checks = _checks(report)
    assert checks["strictly_decreasing"].passed
    assert checks["error_matches_tail"].passed
    assert checks["rate"].measured < 0.0


def test_criterion_is_informational(tmp_path):
    assert main(["criterion", "--n", "4", "--out", str(tmp_path / "c.csv")]) == 0
    report = run(["criterion", "--n", "4", "--out", str(tmp_path / "c.csv")])
    assert not _checks(report)["criterion_holds"].passed


@pytest.mark.parametrize("argv", [["--family", "S", "--index", "3"], ["--family", "C", "--index", "1,-2"], ["--tensor", "--index", "5"]])
def test_relu_export(tmp_path, argv):
    report = run(["relu-export", *argv, "--samples", "2000", "--out", str(tmp_path / "net.json")])
    assert report.exit_code == 0
    assert json.loads((tmp_path / "net.json").read_text())["schema"] == "relu-net/1"


def test_relu_export_refuses_tensor_products(tmp_path):
    assert main(["relu-export", "--tensor", "--index", "2,3", "--out", str(tmp_path / "net.json")]) == 1


def test_eval_and_plotdata(tmp_path):
    report = run(["eval", "--function", "hat:2", "--grid", "11", "--out", str(tmp_path / "e.csv")])
    assert _checks(report)["hat_2_interpolates_sine"].passed
    run(["plotdata", "--grid", "5", "--out", str(tmp_path / "p.csv")])
    assert (tmp_path / "p.csv").read_text().splitlines()[0] == "t,C,S,C_2,S_2"


def test_runs_are_deterministic(tmp_path):
    for name in ("a.csv", "b.csv"):
        run(["eval", "--function", "S:1,2", "--samples", "64", "--seed", "5", "--out", str(tmp_path / name)])
    assert (tmp_path / "a.csv").read_text() == (tmp_path / "b.csv").read_text()


def test_exit_codes(tmp_path):
    assert main(["gram", "--N", "0", "--out", str(tmp_path / "g.json")]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["gram", "--no-such-flag"])
    assert exc.value.code == 2


def test_json_report_to_stdout(tmp_path, capsys):
    assert main(["tau", "--N", "4", "--terms", "100", "--json-report", "--out", str(tmp_path / "t.csv")]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["command"] == "tau"
    assert data["exit_code"] == 0
    assert data["parameters"]["N"] == 4


def test_yaml_file_and_folder(tmp_path):
    folder = tmp_path / "configs"
    folder.mkdir()
    report_path = tmp_path / "gram.report.json"
    (folder / "a_gram.yaml").write_text(
        f"command: gram\nsystem: r1\nN: 3\nout: {tmp_path / 'g.json'}\njson_report: {report_path}\n"
    )
    assert main([str(folder / "a_gram.yaml")]) == 0
    assert json.loads(report_path.read_text())["exit_code"] == 0
    assert main([str(folder)]) == 0

    (folder / "b_bad.yaml").write_text("command: gram\nwidth: 2\n")
    assert main([str(folder)]) == 1
    assert main([str(folder / "b_bad.yaml")]) == 1
