"""Driving full experiments through the command line interface.

Everything the library does is reachable from the qcqo console script;
this demo shells out the same way a batch job would.
Run with: python3 demos/cli_experiments.py (about 20 seconds)
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path


def run(args):
    print(f"$ qcqo {' '.join(args)}")
    result = subprocess.run(
        [sys.executable, "-m", "qcqo.cli", *args],
        capture_output=True, text=True, check=True,
    )
    for line in result.stdout.splitlines():
        print(f"  {line}")
    print()
    return result


def main():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        run(["generate", "--d", "6", "--rows", "500", "--seed", "9",
             "--out", str(tmp / "toy.csv")])

        out = tmp / "sweep"
        run(["run", "--dataset", str(tmp / "toy.csv"), "--algorithm", "adaptive",
             "--n", "10", "--T", "10", "--iters", "150", "--runs", "3",
             "--seed", "0", "--out", str(out)])

        summary = json.loads((out / "summary.json").read_text())
        finals = ["%.3g" % r["final_mse"] for r in summary["runs"]]
        print("summary.json highlights:")
        print("  initial mse %.6g" % summary["initial_mse"])
        print(f"  final mse per run {finals}")
        print("  wall seconds %.2f" % summary["wall_seconds"])
        print()

        head = (out / "run_000.csv").read_text().splitlines()[:3]
        print("run_000.csv starts with:")
        for line in head:
            print(f"  {line}")
        print()

        run(["qubits", "--d", "6", "--eps", "0.25,0.05,0.005", "--n", "10"])

        run(["diagnose", "--dataset", str(tmp / "toy.csv"), "--algorithm", "fixed",
             "--sigma", "1.0", "--n", "10", "--iters", "25", "--seed", "1",
             "--out", str(tmp / "diag.csv")])
        print("diagnose wrote", (tmp / "diag.csv").name, "with columns:")
        print(" ", (tmp / "diag.csv").read_text().splitlines()[0])


if __name__ == "__main__":
    main()
