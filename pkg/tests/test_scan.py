import csv
import io
import json
import math
import os
import signal
import subprocess
import sys
import time

import pytest

from sunsieve import cli, scan
from sunsieve.scan import BLOCK_SIZE, CheckpointError, ScanCheckpoint, scan_range
from sunsieve.witness import WitnessRecord, load_report, run_task

RANGE = (2, 3 * BLOCK_SIZE + 300)


@pytest.fixture(scope="module")
def reference(tmp_path_factory):
    root = tmp_path_factory.mktemp("ref")
    out = {}
    for fmt in ("csv", "json"):
        path = root / f"ref.{fmt}"
        summary = scan_range("almost-4", *RANGE, workers=1, out=path, fmt=fmt)
        out[fmt] = (path.read_bytes(), summary)
    return out


def test_reference_contents(reference):
    data, summary = reference["csv"]
    rows = list(csv.DictReader(io.StringIO(data.decode())))
    assert [int(r["n"]) for r in rows] == list(range(*RANGE))
    assert summary["complete"] and summary["failure_count"] == 0
    assert summary["records"] == RANGE[1] - RANGE[0]
    assert json.loads(reference["json"][0]) == [run_task("almost-4", n).to_json() for n in range(*RANGE)]


@pytest.mark.parametrize("fmt", ["csv", "json"])
@pytest.mark.parametrize("workers", [1, 4, 16])
def test_output_independent_of_workers(tmp_path, reference, fmt, workers):
    path = tmp_path / f"r.{fmt}"
    summary = scan_range("almost-4", *RANGE, workers=workers, out=path, fmt=fmt)
    assert path.read_bytes() == reference[fmt][0]
    assert summary == reference[fmt][1]


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_resume_in_process(tmp_path, reference, fmt):
    path, ck = tmp_path / f"r.{fmt}", tmp_path / "ck.json"
    partial = scan_range("almost-4", *RANGE, workers=1, out=path, checkpoint=ck, fmt=fmt, max_blocks=2)
    assert not partial["complete"] and partial["last_completed"] == RANGE[0] + 2 * BLOCK_SIZE - 1
    # garbage past the recorded offset mimics a write torn by a crash
    with open(path, "ab") as fh:
        fh.write(b"99999,almost-4,torn")
    summary = scan_range("almost-4", *RANGE, workers=2, out=path, checkpoint=ck, fmt=fmt)
    assert path.read_bytes() == reference[fmt][0]
    assert summary == reference[fmt][1]
    # rerunning a finished scan is a no-op
    again = scan_range("almost-4", *RANGE, workers=1, out=path, checkpoint=ck, fmt=fmt)
    assert again == summary and path.read_bytes() == reference[fmt][0]


def test_kill_and_resume(tmp_path):
    stop = 40 * BLOCK_SIZE
    ref = tmp_path / "ref.csv"
    scan_range("sun-prime", 2, stop, workers=1, out=ref)
    out, ck = tmp_path / "r.csv", tmp_path / "ck.json"
    cmd = [sys.executable, "-m", "sunsieve", "verify", "--task", "sun-prime", "--from", "2", "--to", str(stop - 1),
           "--out", str(out), "--checkpoint", str(ck), "--workers", "1"]
    proc = subprocess.Popen(cmd, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    deadline = time.time() + 60
    while not ck.exists() and time.time() < deadline:
        time.sleep(0.01)
    proc.send_signal(signal.SIGKILL)
    proc.wait()
    assert ck.exists()
    killed_at = ScanCheckpoint.load(ck)
    assert not killed_at.complete
    done = subprocess.run(cmd, capture_output=True, text=True)
    assert done.returncode == 0, done.stderr
    assert out.read_bytes() == ref.read_bytes()
    assert json.loads(done.stdout)["complete"]


def test_checkpoint_mismatch_rejected(tmp_path):
    path, ck = tmp_path / "r.csv", tmp_path / "ck.json"
    scan_range("almost-3", 2, 3000, out=path, checkpoint=ck, max_blocks=1)
    with pytest.raises(CheckpointError):
        scan_range("almost-4", 2, 3000, out=path, checkpoint=ck)
    with pytest.raises(CheckpointError):
        scan_range("almost-3", 2, 4000, out=path, checkpoint=ck)
    with pytest.raises(CheckpointError):
        scan_range("almost-3", 2, 3000, out=path, checkpoint=ck, fmt="json")
    path.write_text("")
    with pytest.raises(CheckpointError):
        scan_range("almost-3", 2, 3000, out=path, checkpoint=ck)
    ck.write_text("{not json")
    with pytest.raises(CheckpointError):
        scan_range("almost-3", 2, 3000, out=path, checkpoint=ck)
    ck.write_text(json.dumps({"task": "almost-3"}))
    with pytest.raises(CheckpointError):
        scan_range("almost-3", 2, 3000, out=path, checkpoint=ck)


def test_scan_argument_validation():
    with pytest.raises(ValueError):
        scan_range("sun-prime", 1, 10)
    with pytest.raises(ValueError):
        scan_range("sun-prime", 10, 10)
    with pytest.raises(ValueError):
        scan_range("other", 2, 10)


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_verify_clean(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, stdout, _ = run_cli(capsys, "verify", "--task", "sun-prime", "--from", "2", "--to", "500", "--out", str(out))
    assert code == 0
    summary = json.loads(stdout)
    assert summary["failure_count"] == 0 and summary["largest_failure"] is None
    assert len(load_report(out)) == 499
    assert run_cli(capsys, "audit", str(out))[0] == 0


def test_cli_verify_stdout(capsys):
    code, stdout, stderr = run_cli(capsys, "verify", "--task", "combined-11", "--from", "2", "--to", "40", "--format", "json")
    assert code == 0
    assert len(json.loads(stdout)) == 39
    assert json.loads(stderr)["records"] == 39


def test_cli_verify_failures_exit_2(tmp_path, capsys, monkeypatch):
    real = scan.run_task

    def flaky(task, n):
        return WitnessRecord.failure(n, task) if n % 97 == 0 else real(task, n)

    monkeypatch.setattr(scan, "run_task", flaky)
    out = tmp_path / "r.csv"
    code, stdout, _ = run_cli(capsys, "verify", "--task", "almost-3", "--from", "2", "--to", "400",
                              "--out", str(out), "--workers", "1")
    assert code == 2
    summary = json.loads(stdout)
    assert summary["failures"] == [97, 194, 291, 388] and summary["largest_failure"] == 388
    assert "97,almost-3,,,,,," in out.read_text().splitlines()
    # failure rows never pass the audit
    assert run_cli(capsys, "audit", str(out))[0] == 2


def test_cli_operational_errors(tmp_path, capsys):
    code, _, err = run_cli(capsys, "verify", "--task", "sun-prime", "--from", "2", "--to", "50",
                           "--out", str(tmp_path / "missing" / "r.csv"))
    assert code == 1 and "error" in err
    assert run_cli(capsys, "verify", "--task", "sun-prime", "--from", "9", "--to", "3")[0] == 1
    assert run_cli(capsys, "audit", str(tmp_path / "nope.csv"))[0] == 1
    assert run_cli(capsys, "weights", "--r", "3", "--delta", "0.9", "--degree", "1")[0] == 1


def test_cli_density(capsys):
    code, stdout, _ = run_cli(capsys, "density", "--n", "10", "--variant", "2", "--z", "12", "--remainder", "7", "--remainder", "1")
    assert code == 0
    out = json.loads(stdout)
    assert out["rho"] == {"2": 1, "3": 0, "5": 1, "7": 2, "11": 1}
    assert [r["exact_count"] for r in out["remainders"]] == [3, 9]


def test_cli_sieve_functions(capsys):
    code, stdout, _ = run_cli(capsys, "sieve-functions", "eval", "--u-min", "1", "--u-max", "5", "--step", "0.5")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(stdout)))
    assert [float(r["u"]) for r in rows] == [1 + 0.5 * i for i in range(9)]
    by_u = {float(r["u"]): r for r in rows}
    e_gamma = 1.78107241799019798523650410311
    assert by_u[4.0]["f"] == f"{e_gamma / 2 * math.log(3):.12g}"
    assert by_u[2.0]["F"] == f"{e_gamma:.12g}"
    assert by_u[1.0]["D"] == "" and by_u[4.5]["integral"] == ""
    assert float(by_u[4.0]["D"]) == 0.0
    assert len(by_u[2.5]["F"].replace(".", "").lstrip("0")) <= 12


def test_cli_weights(capsys):
    code, stdout, _ = run_cli(capsys, "weights", "--r", "4", "--delta", "0.5", "--degree", "2")
    out = json.loads(stdout)
    assert code == 0 and out["admissible"]
    assert out["Lambda_r"] == pytest.approx(3.74931, abs=1e-5)


def test_cli_weighted_sieve(capsys, monkeypatch):
    monkeypatch.setenv(scan.WORKERS_ENV, "2")
    code, stdout, _ = run_cli(capsys, "weighted-sieve", "--n", "10007", "--variant", "1", "--r", "3")
    out = json.loads(stdout)
    assert code == 0 and out["comparable"]
    assert out["W_value"] <= out["almost_prime_count"] + 1e-9


def test_workers_env(monkeypatch):
    monkeypatch.setenv(scan.WORKERS_ENV, "3")
    assert scan.default_workers() == 3
    monkeypatch.delenv(scan.WORKERS_ENV)
    assert scan.default_workers() == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "sunsieve", "weights", "--r", "3", "--degree", "1"],
                         capture_output=True, text=True, env={**os.environ})
    assert res.returncode == 0 and json.loads(res.stdout)["r"] == 3
