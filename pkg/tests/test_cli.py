import csv
import json

import pytest

from sombrero.cli import main

FIG1 = ["--g", "3", "--N", "5", "--l", "0", "--a", "1.2"]


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize(
    "argv,code",
    [
        (["validate"] + FIG1, 0),
        (["validate", "--g", "3", "--N", "3", "--l", "0", "--a", "0.6"], 0),
        (["validate", "--g", "1", "--N", "3", "--l", "2", "--a", "0.5"], 2),
        (["validate", "--g", "3", "--N", "1", "--l", "0", "--a", "1"], 1),
    ],
)
def test_validate_exit_codes(argv, code, capsys):
    assert main(argv) == code


@pytest.mark.parametrize("argv", [["validate", "--g", "three"], ["nonsense"], []])
def test_usage_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 1


def test_validate_report(capsys):
    main(["validate"] + FIG1)
    out, err = capsys.readouterr()
    vals = dict(line.split(",") for line in out.strip().splitlines()[1:])
    assert float(vals["a_min"]) == pytest.approx(1.0) and float(vals["a_max"]) == pytest.approx(1.23, abs=5e-3)
    assert vals["hierarchy_valid"] == "true"
    assert "valid" in err


def test_solve_writes_decreasing_sequence(tmp_path):
    out = tmp_path / "a"
    assert main(["solve"] + FIG1 + ["--bc", "A", "--oracle", "--out", str(out)]) == 0
    rows = _rows(out / "iterations.csv")
    E = [float(r["energy"]) for r in rows]
    assert all(x > y for x, y in zip(E, E[1:]))
    summary = {r["name"]: r["value"] for r in _rows(out / "summary.csv")}
    assert abs(float(summary["E_final"]) - float(summary["oracle_energy"])) < 1e-5
    raw = (out / "iterations.csv").read_bytes()
    assert b"\r" not in raw
    assert rows[0]["energy"] == "4.58833588649"


def test_output_is_deterministic(tmp_path):
    for d in ("x", "y"):
        assert main(["solve"] + FIG1 + ["--emit-R", "--out", str(tmp_path / d)]) == 0
    for name in ("iterations.csv", "summary.csv", "profile.csv"):
        assert (tmp_path / "x" / name).read_bytes() == (tmp_path / "y" / name).read_bytes()


def test_solve_breakdown_exit(tmp_path, capsys):
    code = main(["solve", "--g", "3", "--N", "3", "--l", "3", "--a", "2.1", "--bc", "B", "--out", str(tmp_path)])
    assert code == 3
    assert "BoundaryBreakdown" in capsys.readouterr().err


def test_solve_not_converged_exit(tmp_path, capsys):
    assert main(["solve"] + FIG1 + ["--max-iter", "3", "--out", str(tmp_path)]) == 3
    assert "NotConverged" in capsys.readouterr().err
    assert len(_rows(tmp_path / "iterations.csv")) == 3


def test_solve_window_refusal_and_force(tmp_path):
    args = ["solve", "--g", "3", "--N", "5", "--l", "0", "--a", "2.0", "--out", str(tmp_path)]
    assert main(args) == 2
    assert main(args + ["--force"]) == 0


@pytest.mark.parametrize("l,zero", [(1, True), (0, False)])
def test_emit_R_origin(tmp_path, l, zero):
    a = "1.2" if l == 1 else "0.6"
    assert main(["solve", "--g", "3", "--N", "3", "--l", str(l), "--a", a, "--emit-R", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "profile.csv")
    assert float(rows[0]["r"]) == 0.0 and float(rows[0]["psi"]) == 0.0
    R0, R1 = float(rows[0]["R"]), float(rows[1]["R"])
    if zero:
        assert R0 == 0.0
    else:
        assert R0 > 0 and R0 == pytest.approx(R1, rel=1e-3)


def test_solve_json(tmp_path):
    assert main(["solve"] + FIG1 + ["--bc", "B", "--format", "json", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "solve.json").read_text())
    assert data["schema_version"] == 1
    lo, hi = data["bracket"]
    assert lo < data["E_final"] < hi


def test_table1(tmp_path, capsys):
    code = main(["table1", "--out", str(tmp_path)])
    rows = _rows(tmp_path / "table1.csv")
    assert len(rows) == 32
    bad = {(float(r["k"]), r["column"]) for r in rows if r["ok"] == "false"}
    # the printed g^2_min for k = 3.5 and k = 4 differs from (1 + k/a)^2 by ~0.03
    assert bad == {(3.5, "g2_min"), (4.0, "g2_min")}
    assert code == 2
    row = {(float(r["k"]), r["column"]): float(r["computed"]) for r in rows}
    assert row[(0.5, "a_max")] == pytest.approx(0.46, abs=0.025)
    assert row[(4.0, "g2_max")] == pytest.approx(9.82, abs=0.025)


def test_proto1d(tmp_path, capsys):
    assert main(["proto1d", "--g", "10", "--n", "6", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "proto1d.csv")
    assert all(float(r["margin"]) > 0 for r in rows)
    assert abs(float(rows[0]["shift"]) - 0.26572) < 1e-3
    assert main(["proto1d", "--g", "1.5"]) == 1


def test_sweep(tmp_path, monkeypatch):
    monkeypatch.setenv("SOMBRERO_THREADS", "2")
    code = main(["sweep", "--g", "3", "--N", "3", "--l", "1", "2", "--a", "1.2", "1.6", "--bc", "A", "--out", str(tmp_path)])
    rows = _rows(tmp_path / "summary.csv")
    status = {(r["l"], r["a"]): r["status"] for r in rows}
    assert status[("1", "1.2")] == "ok" and status[("2", "1.6")] == "ok"
    assert status[("1", "1.6")] == "invalid_window"
    assert (tmp_path / "g3_N3_l1_a1.2_A.csv").exists()
    assert code == 3


def test_angular_json(capsys):
    assert main(["angular", "--N", "2:3", "--l", "0:2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["schema_version"] == 1
    assert len(data["functions"]) == 2 * (1 + 2 + 3)


def test_figdata(tmp_path):
    assert main(["figdata", "--figure", "1", "--out", str(tmp_path)]) == 0
    for bc in "AB":
        rows = _rows(tmp_path / f"fig1_{bc}_psi.csv")
        assert list(rows[0]) == ["r"] + [f"psi_{m}" for m in range(1, 7)]
