"""The backend comparison script runs and reports both interpreters."""

import json
import subprocess
import sys
from pathlib import Path

SCRIPT = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_exactnum.py"


def test_bench_reports_both_backends():
    proc = subprocess.run(
        [sys.executable, str(SCRIPT), "--ops", "2000", "--repeats", "1", "--json"],
        capture_output=True,
        text=True,
        check=True,
        timeout=120,
    )
    doc = json.loads(proc.stdout)
    assert doc["pure"]["backend"] == "pure"
    assert set(doc["default"]["results"]) == {"arith", "area", "evaluate"}
    assert all(v > 0 for v in doc["pure"]["results"].values())


def test_bench_rejects_bad_ops():
    proc = subprocess.run(
        [sys.executable, str(SCRIPT), "--ops", "0"],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 2
