import csv
import io
import json
import math
import subprocess
import sys

import pytest

from lrising import ChainParams, qfi_degenerate_limit, solve
from lrising.cli import (
    PHASE_COLUMNS,
    POINT_COLUMNS,
    SweepConfig,
    csv_line,
    format_value,
    main,
    parse_alpha,
    parse_grid,
    parse_sizes,
)
from lrising.errors import ParameterError

LABELS = ("x", "y", "z", "x_st", "y_st", "z_st")


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def json_rows(text):
    return [json.loads(l) for l in text.splitlines() if l.strip()]


class TestSerialization:
    def test_round_trip_digits(self):
        x = 0.1 + 0.2
        assert float(format_value(x)) == x
        assert format_value(math.inf) == "inf"
        assert format_value(True) == "true"
        assert format_value(None) == ""

    def test_csv_quoting(self):
        assert csv_line(["a,b", 1]) == '"a,b",1\n'

    def test_grid(self):
        assert parse_grid("0:1:3") == [0.0, 0.5, 1.0]
        assert parse_grid("0.1,0.2") == [0.1, 0.2]
        assert parse_alpha("0,inf") == [0.0, math.inf]
        with pytest.raises(ParameterError):
            parse_grid("0:1")
        with pytest.raises(ParameterError):
            parse_sizes("9")

    def test_config_invariants(self):
        with pytest.raises(ParameterError):
            SweepConfig(thetas=[2.0], alphas=[1.0], sizes=[8])
        with pytest.raises(ParameterError):
            SweepConfig(thetas=[], alphas=[1.0], sizes=[8])


class TestPoint:
    def test_separable_point(self, capsys):
        code, out, _ = run(["point", "--n", "10", "--alpha", "2", "--theta", "0"], capsys)
        assert code == 0
        header = out.splitlines()[0].split(",")
        assert tuple(header[: len(POINT_COLUMNS)]) == POINT_COLUMNS
        row = csv_rows(out)[0]
        assert float(row["f_y"]) == pytest.approx(1.0, abs=1e-9)
        assert float(row["f_z"]) == pytest.approx(1.0, abs=1e-9)
        assert float(row["gap"]) == pytest.approx(2.0, abs=1e-8)
        assert row["tool_version"] and row["schema"] == "1" and row["solver"]

    def test_antiferromagnet_best_label(self, capsys):
        code, out, _ = run(["point", "--n", "12", "--alpha", "1", "--theta", "1.4", "--format", "json"], capsys)
        assert code == 0
        rec = json_rows(out)[0]
        assert rec["best_label"] == "z_st"
        assert rec["best_label"] == max(LABELS, key=lambda k: rec[f"f_{k}"])

    def test_thermal_point(self, capsys):
        code, out, _ = run(["point", "--n", "12", "--alpha", "0.5", "--theta", "0.3", "--temp", "0.05"], capsys)
        assert code == 0
        row = csv_rows(out)[0]
        assert float(row["f_y"]) > 1
        assert float(row["T"]) == 0.05

    def test_inf_token(self, capsys):
        _, out, _ = run(["point", "--n", "4", "--alpha", "inf", "--theta", "0.3", "--format", "json"], capsys)
        assert '"alpha": "inf"' in out
        _, out, _ = run(["point", "--n", "4", "--alpha", "inf", "--theta", "0.3"], capsys)
        assert csv_rows(out)[0]["alpha"] == "inf"


class TestExitCodes:
    def test_config_error(self, capsys):
        code, _, err = run(["point", "--n", "7"], capsys)
        assert code == 2
        assert json.loads(err)["error"] == "ParameterError"

    def test_capacity_error(self, capsys):
        code, _, err = run(["thermal", "--n", "16", "--temp", "0.1"], capsys)
        assert code == 4
        assert json.loads(err)["exit_code"] == 4

    def test_fit_error_is_solver_class(self, capsys):
        code, _, _ = run(["scaling", "--sizes", "8,10,12", "--alpha", "1", "--theta", "0.5"], capsys)
        assert code == 3

    def test_module_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "lrising", "point", "--n", "5"], capture_output=True, text=True)
        assert res.returncode == 2


class TestPhaseDiagram:
    def test_shape(self, tmp_path):
        out = tmp_path / "pd.csv"
        code = main(["phase-diagram", "--sizes", "8,12,16", "--alpha=0:3:11", "--theta=-1.5:1.5:21", "--out", str(out)])
        assert code == 0
        text = out.read_text()
        assert text.splitlines()[0] == ",".join(PHASE_COLUMNS)
        rows = csv_rows(text)
        assert len(rows) == 231
        # theta-major, then alpha
        assert [r["theta"] for r in rows[:11]] == [rows[0]["theta"]] * 11
        for r in rows:
            assert not r["error"]
            assert float(r["f_" + r["best_label"]]) == max(float(r[f"f_{k}"]) for k in LABELS)
            for c in POINT_COLUMNS:
                if c not in ("T", "best_label", "xi2") and r[c] != "":
                    assert math.isfinite(float(r[c]))
        zero = [r for r in rows if float(r["theta"]) == 0.0]
        assert zero
        for r in zero:
            assert abs(float(r["scaling_power"])) < 1e-6
            assert float(r["f_y"]) == pytest.approx(1.0, abs=1e-8)
        afm = [r for r in rows if float(r["theta"]) == 1.5 and float(r["alpha"]) >= 0.9]
        for r in afm:
            assert r["scaling_label"] == "z_st"
            assert float(r["scaling_power"]) == pytest.approx(1.0, abs=0.05)

    def test_deterministic_across_workers(self, tmp_path):
        argv = ["phase-diagram", "--sizes", "6,8", "--alpha", "0,1,inf", "--theta=-1:1:5"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(argv + ["--out", str(a), "--workers", "1"]) == 0
        assert main(argv + ["--out", str(b), "--workers", "3"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_worker_env(self, tmp_path, monkeypatch):
        argv = ["phase-diagram", "--sizes", "4,6", "--alpha", "1", "--theta=0:1:3"]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(argv + ["--format", "json", "--out", str(a)]) == 0
        monkeypatch.setenv("LRISING_WORKERS", "2")
        assert main(argv + ["--format", "json", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_resume(self, tmp_path, fmt):
        argv = ["phase-diagram", "--sizes", "4,6", "--alpha", "0,2", "--theta=-1:1:4", "--format", fmt]
        full, part = tmp_path / "full", tmp_path / "part"
        assert main(argv + ["--out", str(full)]) == 0
        lines = full.read_bytes().splitlines(keepends=True)
        # interrupted after three records plus half a line
        keep = 3 + (fmt == "csv")
        part.write_bytes(b"".join(lines[:keep]) + lines[keep][:10])
        assert main(argv + ["--out", str(part), "--resume"]) == 0
        assert part.read_bytes() == full.read_bytes()

    def test_config_file_and_precedence(self, tmp_path):
        conf = tmp_path / "c.json"
        conf.write_text(json.dumps({"sizes": [4, 6], "alpha": [1.0], "theta": "0:0.5:2", "format": "json"}))
        out = tmp_path / "o"
        assert main(["phase-diagram", "--config", str(conf), "--out", str(out)]) == 0
        rows = json_rows(out.read_text())
        assert len(rows) == 2 and rows[0]["N"] == 6
        assert main(["phase-diagram", "--config", str(conf), "--format", "csv", "--sizes", "4,8", "--out", str(out)]) == 0
        rows = csv_rows(out.read_text())
        assert rows[0]["N"] == "8"


class TestThermal:
    def test_two_lobes(self, tmp_path):
        out = tmp_path / "t.jsonl"
        temps = "0.001,0.05,0.2,1,5"
        assert main(["thermal", "--n", "10", "--alpha", "3", "--theta=-1.5:1.5:16", "--temp", temps,
                     "--format", "json", "--out", str(out)]) == 0
        rows = json_rows(out.read_text())
        assert len(rows) == 16 * 5

        def best(r):
            return max(r[f"f_{k}"] for k in LABELS)

        lobes = {}
        for T in (0.001, 0.05, 0.2, 1.0, 5.0):
            at = [r for r in rows if r["T"] == T]
            lobes[T] = (max(best(r) for r in at if r["theta"] < 0), max(best(r) for r in at if r["theta"] > 0))
            assert all("bound" in r for r in at)
        assert lobes[0.001][0] > 2 and lobes[0.001][1] > 2
        ts = sorted(lobes)
        for side in (0, 1):
            assert all(lobes[b][side] <= lobes[a][side] + 1e-9 for a, b in zip(ts, ts[1:]))
        assert all(best(r) <= 1 for r in rows if r["T"] == 5.0)

    def test_fm_collapse(self, capsys):
        _, out, _ = run(["point", "--n", "10", "--alpha", "3", "--theta=-1.3", "--temp", "0.001", "--format", "json"], capsys)
        rec = json_rows(out)[0]
        spec = solve(ChainParams(10, 3.0, -1.3))
        ref = qfi_degenerate_limit(spec.state(0), spec.state(1), "z")
        assert rec["f_z"] == pytest.approx(ref, abs=1e-4)


class TestOracle:
    def test_perturbative(self, capsys):
        _, out, _ = run(["oracle", "perturbative", "--n", "50", "--alpha", "0", "--theta", "0.01", "--format", "json"], capsys)
        assert json_rows(out)[0]["f_y"] == pytest.approx(1.245, abs=1e-12)

    def test_variational(self, capsys):
        _, out, _ = run(["oracle", "variational", "--n", "100", "--tan-theta", "1"], capsys)
        assert float(csv_rows(out)[0]["qfi_y"]) == pytest.approx(math.sqrt(101), rel=1e-12)

    def test_critical_line(self, capsys):
        _, out, _ = run(["oracle", "perturbative", "--alpha", "2", "--critical", "--order", "2"], capsys)
        row = csv_rows(out)[0]
        assert float(row["theta_c"]) == pytest.approx(-0.4450, abs=1e-4)
        assert row["valid"] == "true"

    def test_domain_error_passthrough(self, capsys):
        code, _, err = run(["oracle", "variational", "--n", "10", "--theta=-0.2"], capsys)
        assert code == 2 and json.loads(err)["error"] == "DomainError"


class TestCritical:
    def test_all_to_all_afm(self, capsys):
        code, out, _ = run(["critical", "--alpha", "0", "--side", "AFM", "--sizes", "6,8,10,12"], capsys)
        assert code == 0
        rows = csv_rows(out)
        summary = rows[-1]
        assert summary["record"] == "summary"
        assert float(summary["theta_inf"]) == pytest.approx(math.pi / 2, abs=0.02)
        assert float(summary["beta"]) == pytest.approx(1.0, abs=0.05)
        assert all(r["boundary"] == "true" for r in rows[:-1])

    def test_short_range_fm(self, capsys):
        code, out, _ = run(["critical", "--alpha", "3", "--side", "FM", "--sizes", "8,10,12,14"], capsys)
        assert code == 0
        summary = csv_rows(out)[-1]
        assert float(summary["theta_inf"]) == pytest.approx(-0.8, abs=0.1)


class TestScalingCommand:
    def test_power_fit(self, capsys):
        code, out, _ = run(["scaling", "--alpha", "1", "--theta", "1.47", "--labels", "z_st", "--sizes", "8,10,12,14"], capsys)
        assert code == 0
        rows = csv_rows(out)
        assert [r["record"] for r in rows] == ["value"] * 4 + ["fit"]
        assert float(rows[-1]["exponent"]) == pytest.approx(1.0, abs=0.1)
