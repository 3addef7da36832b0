import csv
import io
import math
import subprocess
import sys

import pytest

from entrobound import (BoundInput, HermitianMatrix, equality_states_corollary2,
                        extremal_pair_proposition, save_matrix)
from entrobound.cli import fmt, main


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def report(text):
    return {k: v for k, v in (line.split(" = ") for line in text.strip().splitlines())}


def read_csv(text):
    return list(csv.reader(io.StringIO(text)))


@pytest.fixture
def pair_files(tmp_path):
    def make(a, b):
        pa, pb = tmp_path / "a.json", tmp_path / "b.json"
        save_matrix(a, pa)
        save_matrix(b, pb)
        return str(pa), str(pb)
    return make


def test_format():
    assert fmt(math.inf) == "inf"
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(1 / 3)) == 1 / 3


class TestCompute:
    def test_equal_files(self, capsys, pair_files):
        rho = HermitianMatrix.diag([0.2, 0.3, 0.5])
        code, out, _ = run(capsys, "compute", *pair_files(rho, rho))
        r = report(out)
        assert code == 0 and float(r["S(rho||sigma)"]) == 0.0 and float(r["T"]) == 0.0

    def test_regularised_family(self, capsys, pair_files):
        code, out, _ = run(capsys, "compute", *pair_files(*equality_states_corollary2(0.5)),
                           "--cd", "1")
        r = report(out)
        assert code == 0 and r["S(rho||sigma)"] == "inf"
        assert float(r["R(rho||sigma)"]) == pytest.approx(0.2027326, abs=1e-7)

    def test_positive_mode(self, capsys, pair_files):
        files = pair_files(*extremal_pair_proposition(1.0, 0.5))
        code, out, _ = run(capsys, "compute", *files, "--states", "positive")
        assert code == 0
        assert float(report(out)["S(rho||sigma)"]) == pytest.approx(0.8369882, abs=1e-7)
        code, _, err = run(capsys, "compute", *files)
        assert code == 2 and "unit trace" in err

    def test_bad_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"dim": 2}')
        code, _, err = run(capsys, "compute", str(bad), str(bad))
        assert code == 1 and "entries" in err
        code, _, _ = run(capsys, "compute", str(tmp_path / "missing.json"), str(bad))
        assert code == 1


class TestBound:
    def test_theorem(self, capsys):
        code, out, _ = run(capsys, "bound", "--which", "theorem", "--T", "0.2",
                           "--alpha", "0.1", "--beta", "0.1")
        assert code == 0 and float(out) == pytest.approx(0.2197225, abs=1e-7)

    def test_cor2_zero(self, capsys):
        assert run(capsys, "bound", "--which", "cor2", "--T", "0")[:2] == (0, "0 0\n")

    def test_prop(self, capsys):
        code, out, _ = run(capsys, "bound", "--which", "prop", "--T", "1", "--alpha", "0")
        assert code == 0 and float(out) == pytest.approx(1.3862944, abs=1e-7)

    def test_infeasible(self, capsys):
        code, _, err = run(capsys, "bound", "--which", "theorem", "--T", "0.01",
                           "--alpha", "0.1", "--beta", "0.3")
        assert code == 2 and "|alpha - beta|" in err

    def test_usage_errors(self, capsys):
        assert run(capsys, "bound", "--which", "nope", "--T", "1")[0] == 1
        assert run(capsys, "bound", "--which", "theorem")[0] == 1
        assert run(capsys, "bound", "--which", "theorem", "--T", "x")[0] == 1
        assert run(capsys)[0] == 1


class TestSweep:
    def test_single_row(self, capsys):
        code, out, _ = run(capsys, "sweep", "--which", "theorem", "--alpha", "0.1",
                           "--beta", "0.1", "--t-min", "0", "--steps", "1")
        rows = read_csv(out)
        assert code == 0 and rows[0] == ["T", "bound", "entropy_at_equality"]
        assert len(rows) == 2 and float(rows[1][1]) == 0.0

    def test_theorem_equality_column(self, capsys, tmp_path):
        path = tmp_path / "sweep.csv"
        code, out, _ = run(capsys, "sweep", "--which", "theorem", "--alpha", "0.1", "--beta",
                           "0.1", "--t-min", "0", "--t-max", "0.5", "--steps", "11",
                           "--out", str(path))
        rows = read_csv(path.read_text())[1:]
        assert code == 0 and out == "" and len(rows) == 11
        t, bound, eq = map(float, rows[4])
        assert t == pytest.approx(0.2) and bound == pytest.approx(0.2197225, abs=1e-7)
        assert abs(bound - eq) <= 1e-10

    def test_cor1_continuous_at_branch_point(self, capsys):
        beta = 0.2

        def slope(t):
            if t < beta:
                return math.log((beta + t) / (beta - t))
            return math.log1p(t / beta) + 1.0 if t > beta else math.inf

        _, out, _ = run(capsys, "sweep", "--which", "cor1", "--beta", str(beta),
                        "--t-min", "0.1", "--t-max", "0.3", "--steps", "41")
        rows = [list(map(float, r[:2])) for r in read_csv(out)[1:]]
        dt = rows[1][0] - rows[0][0]
        for (t0, b0), (t1, b1) in zip(rows, rows[1:]):
            assert abs(b1 - b0) < max(slope(t0), slope(t1)) * dt * 2
        probes = []
        for t in (beta - 1e-9, beta + 1e-9):
            _, out, _ = run(capsys, "sweep", "--which", "cor1", "--beta", str(beta),
                            "--t-min", repr(t), "--steps", "1")
            probes.append(float(read_csv(out)[1][1]))
        assert abs(probes[1] - probes[0]) < 1e-7

    def test_infeasible_range(self, capsys):
        code, _, _ = run(capsys, "sweep", "--which", "theorem", "--alpha", "0.1",
                         "--beta", "0.3", "--t-min", "0", "--t-max", "0.5")
        assert code == 2


class TestFuzz:
    def test_empty(self, capsys, tmp_path):
        path = tmp_path / "f.csv"
        code, out, _ = run(capsys, "fuzz", "--samples", "0", "--out", str(path))
        assert code == 0 and path.read_text() == "T,alpha,beta,entropy,bound,slack\n"
        assert "violations=0" in out

    def test_deterministic(self, capsys, tmp_path):
        args = ["fuzz", "--dim", "3", "--samples", "300", "--seed", "7"]
        p1, p2 = tmp_path / "1.csv", tmp_path / "2.csv"
        assert run(capsys, *args, "--out", str(p1))[0] == 0
        assert run(capsys, *args, "--out", str(p2))[0] == 0
        assert p1.read_bytes() == p2.read_bytes()
        slacks = [float(r[5]) for r in read_csv(p1.read_text())[1:]]
        assert slacks == sorted(slacks) and min(slacks) >= -1e-9

    def test_violation_exit_code(self, capsys, monkeypatch):
        from entrobound import cli
        from entrobound.sharpness import FuzzOutcome, SlackRecord

        bad = FuzzOutcome([SlackRecord(0.1, 0.1, 0.1, 1.0, 0.5, -0.5)], 0)
        monkeypatch.setattr(cli, "fuzz_slack", lambda *a, **k: bad)
        code, _, err = run(capsys, "fuzz", "--samples", "1")
        assert code == 3 and "falsified" in err

    def test_dim_check(self, capsys):
        assert run(capsys, "fuzz", "--dim", "1", "--samples", "1")[0] == 2


class TestVerifyAndSharpness:
    def test_verify_lemmas(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "lemmas", "--seed", "1",
                           "--samples", "100")
        assert code == 0 and "trace distance >= |alpha - beta|" in out
        assert "t/(gamma+t)" in out and "[FAIL]" not in out

    def test_sharpness(self, capsys):
        code, out, _ = run(capsys, "sharpness", "--T", "0.2", "--alpha", "0.1",
                           "--beta", "0.1,0.9")
        rows = read_csv(out)
        assert code == 0 and len(rows) == 2 and rows[1][-1] == "true"

    def test_sharpness_empty_grid(self, capsys):
        assert run(capsys, "sharpness", "--T", "0.01", "--alpha", "0.1", "--beta", "0.3")[0] == 2


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "entrobound.cli", "bound", "--which", "cor1",
                          "--T", "0.25", "--beta", "0.25"], capture_output=True, text=True)
    assert out.returncode == 0
    assert float(out.stdout) == pytest.approx(0.5 * math.log(2), abs=1e-15)
